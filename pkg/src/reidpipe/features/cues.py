"""Visual cue assembly: per-stripe local and whole-image global descriptors.

Cues C1-C4 fuse per-patch color histograms with per-patch texture blocks
(HSV1/HOG, HSV2/SILTP, LAB1/SILTP, LAB2/HOG). C5 and C6 fuse region-level
color-name descriptors with the same texture blocks (SCNCD/HOG, SCNCD/SILTP);
their global part concatenates the stripe descriptors and each local part
concatenates a second stripe subdivision.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..datamodel import ForegroundMask
from ..errors import ConfigError
from .colorspace import convert, to_gray
from .grid import IMAGE_H, IMAGE_W, N_STRIPES, patch_grid, patch_stripe_indices, stripe_bounds
from .histograms import patch_channel_histograms, patch_joint_histograms
from .scncd import ColorNamePalette, default_palette, scncd_descriptor
from .texture import patch_hog_histograms, patch_siltp_histograms

CUE_IDS = ("C1", "C2", "C3", "C4", "C5", "C6")

# cue -> (color space, color histogram kind, texture kind)
_RECIPES = {
    "C1": ("hsv", "joint", "hog"),
    "C2": ("hsv", "channel", "siltp"),
    "C3": ("lab", "joint", "siltp"),
    "C4": ("lab", "channel", "hog"),
    "C5": (None, "scncd", "hog"),
    "C6": (None, "scncd", "siltp"),
}

JOINT_BINS = 8
CHANNEL_BINS = 16


@dataclass(frozen=True)
class CueDescriptor:
    """Assembled descriptors of one visual cue for one image."""

    cue_id: str
    local: tuple[np.ndarray, ...]
    global_: np.ndarray
    normalized: bool = True


def l2_normalize(v: np.ndarray) -> np.ndarray:
    norm = np.linalg.norm(v)
    return v / norm if norm > 0 else v


def _l2_rows(m: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(m, axis=1, keepdims=True)
    return m / np.where(norms > 0, norms, 1.0)


def _color_weights(mask: ForegroundMask | None, mask_blend: float) -> np.ndarray | None:
    if mask is None:
        return None
    return (1.0 - mask_blend) * mask.weights + mask_blend


def assemble_cue(
    image: np.ndarray,
    cue_id: str,
    mask: ForegroundMask | None = None,
    *,
    n_stripes: int = N_STRIPES,
    mask_blend: float = 0.0,
    palette: ColorNamePalette | None = None,
) -> CueDescriptor:
    """Compute one cue's local (per-stripe) and global descriptors.

    The image must be (128, 48, 3) RGB in [0, 1]. A foreground mask weights
    the color histograms only; ``mask_blend`` mixes the unmasked histogram
    back in. Texture blocks ignore the mask.
    """
    if cue_id not in _RECIPES:
        raise ConfigError(f"unknown cue {cue_id!r}")
    image = np.asarray(image, dtype=np.float64)
    if image.shape != (IMAGE_H, IMAGE_W, 3):
        raise ConfigError(f"expected a {IMAGE_H}x{IMAGE_W}x3 image, got {image.shape}")

    space, color_kind, texture_kind = _RECIPES[cue_id]
    grid = patch_grid(IMAGE_W, IMAGE_H)
    stripes = patch_stripe_indices(grid, n_stripes)
    weights = _color_weights(mask, mask_blend)

    gray = to_gray(image)
    if texture_kind == "hog":
        texture = patch_hog_histograms(gray, grid.rects)
    else:
        texture = patch_siltp_histograms(gray, grid.rects)
    texture = _l2_rows(texture)

    if color_kind in ("joint", "channel"):
        space_img = convert(image, space)
        if color_kind == "joint":
            color = patch_joint_histograms(space_img, grid.rects, JOINT_BINS, weights)
        else:
            color = patch_channel_histograms(space_img, grid.rects, CHANNEL_BINS, weights)
        color = _l2_rows(color)
        per_patch = np.hstack([color, texture])
        global_vec = l2_normalize(per_patch.ravel())
        local = tuple(
            l2_normalize(per_patch[stripes == r].ravel()) for r in range(n_stripes)
        )
        return CueDescriptor(cue_id, local, global_vec)

    # SCNCD cues: color at region level, texture per patch as above.
    palette = palette or default_palette()

    def region_scncd(y0: int, y1: int) -> np.ndarray:
        w = None if weights is None else weights[y0:y1]
        return scncd_descriptor(image[y0:y1], palette, weights=w)

    bounds = stripe_bounds(IMAGE_H, n_stripes)
    color_global = np.concatenate([region_scncd(y0, y1) for y0, y1 in bounds])
    global_vec = l2_normalize(
        np.concatenate([l2_normalize(color_global), l2_normalize(texture.ravel())])
    )
    local = []
    for r, (y0, y1) in enumerate(bounds):
        sub = stripe_bounds(y1 - y0, n_stripes)
        color_r = np.concatenate([region_scncd(y0 + s0, y0 + s1) for s0, s1 in sub])
        texture_r = texture[stripes == r].ravel()
        local.append(
            l2_normalize(
                np.concatenate([l2_normalize(color_r), l2_normalize(texture_r)])
            )
        )
    return CueDescriptor(cue_id, tuple(local), global_vec)
