"""Principal component reduction with deterministic sign convention."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from ..datamodel import FeatureMatrix
from ..errors import DataError

PCA_DIM = 120


@dataclass(frozen=True)
class PcaModel:
    """Mean plus orthonormal projection basis (columns are components)."""

    mean: np.ndarray
    basis: np.ndarray

    @property
    def d_out(self) -> int:
        return self.basis.shape[1]


def fit_pca(training: FeatureMatrix | np.ndarray, d_out: int = PCA_DIM) -> PcaModel:
    """Fit the top ``d_out`` principal directions of mean-centered data.

    No whitening. Components are sign-fixed so their largest-magnitude entry
    is positive. ``d_out`` silently cannot exceed the data's row or column
    count; a warning is emitted and the dimension clamped.
    """
    x = training.values if isinstance(training, FeatureMatrix) else np.asarray(training)
    x = x.astype(np.float64)
    if x.ndim != 2 or x.shape[0] == 0:
        raise DataError(f"PCA needs a non-empty 2-D matrix, got shape {x.shape}")
    n, d = x.shape
    k = min(d_out, n, d)
    if k < d_out:
        warnings.warn(
            f"PCA dimension clamped from {d_out} to {k} ({n} rows, {d} columns)",
            stacklevel=2,
        )
    mean = x.mean(axis=0)
    _, _, vt = np.linalg.svd(x - mean, full_matrices=False)
    basis = vt[:k].T.copy()
    lead = np.argmax(np.abs(basis), axis=0)
    signs = np.sign(basis[lead, np.arange(k)])
    signs[signs == 0] = 1.0
    basis *= signs
    return PcaModel(mean=mean, basis=basis)


def apply_pca(model: PcaModel, v: np.ndarray) -> np.ndarray:
    """Center, project and re-normalize to unit L2 (rows of a matrix, or one vector)."""
    arr = np.asarray(v, dtype=np.float64)
    proj = (arr - model.mean) @ model.basis
    if proj.ndim == 1:
        norm = np.linalg.norm(proj)
        return proj / norm if norm > 0 else proj
    norms = np.linalg.norm(proj, axis=1, keepdims=True)
    return proj / np.where(norms > 0, norms, 1.0)
