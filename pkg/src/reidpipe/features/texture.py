"""Texture descriptors: per-patch HOG and SILTP histograms."""

from __future__ import annotations

import numpy as np

from .. import kernels
from ..errors import ConfigError

HOG_BINS = 9
SILTP_TAU = 0.3
SILTP_BINS = 81


def hog_orientation_grid(gray: np.ndarray, bins: int = HOG_BINS) -> tuple[np.ndarray, np.ndarray]:
    """Per-pixel unsigned orientation bin and gradient magnitude."""
    gy, gx = np.gradient(gray)
    mag = np.hypot(gx, gy)
    ang = np.arctan2(gy, gx) % np.pi
    idx = np.clip((ang / np.pi * bins).astype(np.int64), 0, bins - 1)
    return idx, mag


def hog_descriptor(pixels: np.ndarray, bins: int = HOG_BINS) -> np.ndarray:
    """Gradient-magnitude histogram over ``bins`` unsigned orientations in [0, pi)."""
    idx, mag = hog_orientation_grid(np.asarray(pixels, dtype=np.float64), bins)
    rect = np.array([[0, 0, pixels.shape[1], pixels.shape[0]]], dtype=np.int64)
    return kernels.patch_histograms(idx, mag, rect, bins)[0]


def patch_hog_histograms(gray: np.ndarray, rects: np.ndarray, bins: int = HOG_BINS) -> np.ndarray:
    """Per-patch HOG histograms; gradients are taken patch-locally.

    Gradients at patch borders use the patch's own one-sided differences, so
    each row equals :func:`hog_descriptor` of the cropped patch.
    """
    out = np.empty((rects.shape[0], bins), dtype=np.float64)
    for k, (x0, y0, w, h) in enumerate(rects):
        out[k] = hog_descriptor(gray[y0 : y0 + h, x0 : x0 + w], bins)
    return out


def _check_siltp_params(radius: int, neighbors: int) -> None:
    if radius != 1 or neighbors != 4:
        raise ConfigError(
            f"SILTP supports radius=1 with 4 cross neighbors, got radius={radius}, neighbors={neighbors}"
        )


def siltp_descriptor(
    pixels: np.ndarray,
    tau: float = SILTP_TAU,
    radius: int = 1,
    neighbors: int = 4,
) -> np.ndarray:
    """Histogram of scale-invariant ternary codes over the patch interior."""
    _check_siltp_params(radius, neighbors)
    gray = np.asarray(pixels, dtype=np.float64)
    if gray.shape[0] < 3 or gray.shape[1] < 3:
        return np.zeros(SILTP_BINS, dtype=np.float64)
    codes = kernels.siltp_codes(gray, tau)
    return np.bincount(codes.ravel(), minlength=SILTP_BINS).astype(np.float64)


def patch_siltp_histograms(
    gray: np.ndarray,
    rects: np.ndarray,
    tau: float = SILTP_TAU,
) -> np.ndarray:
    """Per-patch SILTP histograms from one image-wide code grid.

    Interior codes of a patch only reference pixels inside the patch, so
    cropping the image-wide code grid is identical to per-patch computation.
    """
    codes = kernels.siltp_codes(np.asarray(gray, dtype=np.float64), tau)
    ones = np.ones(codes.shape, dtype=np.float64)
    inner = np.column_stack(
        [rects[:, 0], rects[:, 1], np.maximum(rects[:, 2] - 2, 0), np.maximum(rects[:, 3] - 2, 0)]
    ).astype(np.int64)
    return kernels.patch_histograms(codes, ones, inner, SILTP_BINS)
