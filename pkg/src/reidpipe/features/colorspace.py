"""Color space conversions on float RGB arrays in [0, 1].

Every conversion returns channels rescaled to [0, 1] so that downstream
histogram binning is uniform across spaces. Inputs are (..., 3) arrays.
"""

from __future__ import annotations

import numpy as np

from ..errors import ConfigError

_XYZ_MATRIX = np.array(
    [
        [0.4124564, 0.3575761, 0.1804375],
        [0.2126729, 0.7151522, 0.0721750],
        [0.0193339, 0.1191920, 0.9503041],
    ]
)
_D65_WHITE = np.array([0.95047, 1.0, 1.08883])


def to_hsv(rgb: np.ndarray) -> np.ndarray:
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    maxc = rgb.max(axis=-1)
    minc = rgb.min(axis=-1)
    delta = maxc - minc
    safe_max = np.where(maxc > 0, maxc, 1.0)
    s = np.where(maxc > 0, delta / safe_max, 0.0)
    safe_delta = np.where(delta > 0, delta, 1.0)
    rc = (maxc - r) / safe_delta
    gc = (maxc - g) / safe_delta
    bc = (maxc - b) / safe_delta
    h = np.select([maxc == r, maxc == g], [bc - gc, 2.0 + rc - bc], default=4.0 + gc - rc)
    h = np.where(delta > 0, (h / 6.0) % 1.0, 0.0)
    return np.stack([h, s, maxc], axis=-1)


def _srgb_to_linear(c: np.ndarray) -> np.ndarray:
    return np.where(c <= 0.04045, c / 12.92, ((c + 0.055) / 1.055) ** 2.4)


def to_lab(rgb: np.ndarray) -> np.ndarray:
    """CIELAB under D65, rescaled to [0, 1] via L/100, (a+128)/255, (b+128)/255."""
    linear = _srgb_to_linear(rgb)
    xyz = linear @ _XYZ_MATRIX.T
    t = xyz / _D65_WHITE
    eps = (6.0 / 29.0) ** 3
    f = np.where(t > eps, np.cbrt(t), t / (3.0 * (6.0 / 29.0) ** 2) + 4.0 / 29.0)
    fx, fy, fz = f[..., 0], f[..., 1], f[..., 2]
    lum = 116.0 * fy - 16.0
    a = 500.0 * (fx - fy)
    b = 200.0 * (fy - fz)
    out = np.stack([lum / 100.0, (a + 128.0) / 255.0, (b + 128.0) / 255.0], axis=-1)
    return np.clip(out, 0.0, 1.0)


def to_normalized_rgb(rgb: np.ndarray) -> np.ndarray:
    """Chromaticity r, g, b; zero-sum pixels map to the uniform point (1/3, 1/3, 1/3)."""
    total = rgb.sum(axis=-1, keepdims=True)
    safe = np.where(total > 0, total, 1.0)
    out = np.where(total > 0, rgb / safe, 1.0 / 3.0)
    return out


def to_l1l2l3(rgb: np.ndarray) -> np.ndarray:
    """l1l2l3 chromaticity; zero-denominator (gray) pixels map to (1/3, 1/3, 1/3)."""
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    rg = (r - g) ** 2
    rb = (r - b) ** 2
    gb = (g - b) ** 2
    denom = rg + rb + gb
    safe = np.where(denom > 0, denom, 1.0)
    stacked = np.stack([rg, rb, gb], axis=-1)
    return np.where(denom[..., None] > 0, stacked / safe[..., None], 1.0 / 3.0)


def to_rgb(rgb: np.ndarray) -> np.ndarray:
    return np.asarray(rgb, dtype=np.float64)


def to_gray(rgb: np.ndarray) -> np.ndarray:
    return rgb[..., 0] * 0.299 + rgb[..., 1] * 0.587 + rgb[..., 2] * 0.114


CONVERTERS = {
    "rgb": to_rgb,
    "nrgb": to_normalized_rgb,
    "l1l2l3": to_l1l2l3,
    "hsv": to_hsv,
    "lab": to_lab,
}


def convert(rgb: np.ndarray, space: str) -> np.ndarray:
    try:
        return CONVERTERS[space.lower()](rgb)
    except KeyError:
        raise ConfigError(f"unknown color space {space!r}") from None
