"""Patch grids and horizontal stripe partitions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError

IMAGE_W = 48
IMAGE_H = 128
PATCH_W = 8
PATCH_H = 16
STRIDE_X = 4
STRIDE_Y = 8
N_STRIPES = 4


@dataclass(frozen=True)
class PatchGrid:
    """Dense overlapping patch layout over an image.

    ``rects`` holds (x0, y0, w, h) rows scanning left-to-right then
    top-to-bottom; a final row/column clamped to the boundary is appended
    when strides do not tile exactly.
    """

    image_w: int
    image_h: int
    patch_w: int
    patch_h: int
    stride_x: int
    stride_y: int
    rects: np.ndarray

    def __len__(self) -> int:
        return self.rects.shape[0]


def _positions(extent: int, patch: int, stride: int) -> list[int]:
    last = extent - patch
    xs = list(range(0, last + 1, stride))
    if xs[-1] != last:
        xs.append(last)
    return xs


def patch_grid(
    image_w: int = IMAGE_W,
    image_h: int = IMAGE_H,
    patch_w: int = PATCH_W,
    patch_h: int = PATCH_H,
    stride_x: int = STRIDE_X,
    stride_y: int = STRIDE_Y,
) -> PatchGrid:
    if patch_w > image_w or patch_h > image_h:
        raise ConfigError(
            f"patch {patch_w}x{patch_h} exceeds image {image_w}x{image_h}"
        )
    if stride_x <= 0 or stride_y <= 0:
        raise ConfigError(f"strides must be positive, got {stride_x}x{stride_y}")
    rects = np.array(
        [
            (x, y, patch_w, patch_h)
            for y in _positions(image_h, patch_h, stride_y)
            for x in _positions(image_w, patch_w, stride_x)
        ],
        dtype=np.int64,
    )
    return PatchGrid(image_w, image_h, patch_w, patch_h, stride_x, stride_y, rects)


def stripe_bounds(image_h: int, n_stripes: int = N_STRIPES) -> list[tuple[int, int]]:
    """Pixel row ranges of ``n_stripes`` non-overlapping horizontal stripes."""
    edges = [i * image_h // n_stripes for i in range(n_stripes + 1)]
    return [(edges[i], edges[i + 1]) for i in range(n_stripes)]


def patch_stripe_indices(grid: PatchGrid, n_stripes: int = N_STRIPES) -> np.ndarray:
    """Stripe index of each patch, assigned by the patch's top edge."""
    tops = grid.rects[:, 1]
    idx = tops * n_stripes // grid.image_h
    return np.minimum(idx, n_stripes - 1)
