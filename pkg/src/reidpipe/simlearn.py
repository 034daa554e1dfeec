"""Similarity learning on the polynomial feature map.

A similarity model holds one symmetric Mahalanobis weight matrix and one
symmetric bilinear weight matrix per (cue, region) block plus per-cue global
blocks. The pair score is the sum of local block scores plus gamma times the
global block sum. Training minimizes a logistic pair loss with Frobenius
regularization by full-batch gradient descent with backtracking line search;
the score is linear in the weights so the problem is convex.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError, DataError, DimError, NumericError

GAMMA_DEFAULT = 1.1
GLOBAL_SCOPE = "G"

# Per-representation cue roles: G = global only, L = local only, GL = both.
TABLE1: dict[str, dict[str, str]] = {
    "F0": {"C1": "GL", "C2": "GL", "C3": "GL", "C4": "GL"},
    "F1": {"C1": "GL", "C2": "GL", "C3": "GL", "C4": "GL", "C7": "G"},
    "F2": {"C1": "GL", "C2": "GL", "C3": "GL", "C4": "GL", "C8": "G"},
    "F3": {"C1": "GL", "C2": "GL", "C3": "GL", "C4": "GL", "C7": "G", "C8": "G"},
    "F4": {"C5": "GL", "C6": "GL", "C7": "G"},
    "F5": {"C5": "GL", "C6": "GL", "C8": "G"},
    "F6": {"C5": "GL", "C6": "GL", "C7": "G", "C8": "G"},
    "F7": {"C1": "L", "C2": "L", "C3": "L", "C4": "L", "C7": "G"},
    "F8": {"C1": "L", "C2": "L", "C3": "L", "C4": "L", "C8": "G"},
    "F9": {"C1": "L", "C2": "L", "C3": "L", "C4": "L", "C7": "G", "C8": "G"},
    "F10": {"C5": "L", "C6": "L", "C7": "G"},
    "F11": {"C5": "L", "C6": "L", "C8": "G"},
    "F12": {"C5": "L", "C6": "L", "C7": "G", "C8": "G"},
}

SCOPES = ("G", "L", "GL")

# A feature bank maps (cue, scope) -> (n_images, d) matrix, where scope is
# "G" or "r0".."r{R-1}". Banks are the resolved per-image descriptors.
BlockKey = tuple[str, str]
FeatureBank = dict[BlockKey, np.ndarray]


@dataclass(frozen=True)
class Representation:
    """A named assignment of cues to global/local roles."""

    rep_id: str
    cue_scopes: dict[str, str]
    n_regions: int = 4

    def __post_init__(self):
        for cue, scope in self.cue_scopes.items():
            if scope not in SCOPES:
                raise ConfigError(f"{self.rep_id}: cue {cue} has invalid scope {scope!r}")

    @classmethod
    def from_table(cls, rep_id: str, n_regions: int = 4) -> "Representation":
        if rep_id not in TABLE1:
            raise ConfigError(f"unknown representation {rep_id!r}")
        return cls(rep_id=rep_id, cue_scopes=dict(TABLE1[rep_id]), n_regions=n_regions)

    def block_keys(self) -> list[BlockKey]:
        keys: list[BlockKey] = []
        for cue in sorted(self.cue_scopes):
            scope = self.cue_scopes[cue]
            if scope in ("L", "GL"):
                keys.extend((cue, f"r{r}") for r in range(self.n_regions))
            if scope in ("G", "GL"):
                keys.append((cue, GLOBAL_SCOPE))
        return keys


@dataclass
class SimilarityModel:
    """Learned weight blocks; immutable once training returns it."""

    rep_id: str
    gamma: float
    bias: float
    blocks: dict[BlockKey, tuple[np.ndarray, np.ndarray]]

    def block_keys(self) -> list[BlockKey]:
        return sorted(self.blocks)


@dataclass(frozen=True)
class RankingList:
    """Gallery order for one probe, best match first.

    ``scores`` holds the similarity per gallery index; ``order`` is sorted by
    non-increasing score with ties broken by ascending gallery index.
    """

    probe_index: int
    order: np.ndarray
    scores: np.ndarray

    @property
    def dissimilarities(self) -> np.ndarray:
        return -self.scores


# ---------------------------------------------------------------------------
# Scoring
# ---------------------------------------------------------------------------

def _check_dims(x_a: np.ndarray, x_b: np.ndarray, w: np.ndarray) -> None:
    d = x_a.shape[-1]
    if x_b.shape[-1] != d or w.shape != (d, d):
        raise DimError(
            f"dimension mismatch: x_a {x_a.shape}, x_b {x_b.shape}, W {w.shape}"
        )


def score_mahalanobis(x_a: np.ndarray, x_b: np.ndarray, w_m: np.ndarray) -> float:
    """(x_a - x_b)^T W_M (x_a - x_b)."""
    _check_dims(x_a, x_b, w_m)
    diff = x_a - x_b
    return float(diff @ w_m @ diff)


def score_bilinear(x_a: np.ndarray, x_b: np.ndarray, w_b: np.ndarray) -> float:
    """x_a^T W_B x_b + x_b^T W_B x_a."""
    _check_dims(x_a, x_b, w_b)
    return float(x_a @ w_b @ x_b + x_b @ w_b @ x_a)


def score_pair(
    model: SimilarityModel,
    feats_a: dict[BlockKey, np.ndarray],
    feats_b: dict[BlockKey, np.ndarray],
) -> float:
    """Local block sum plus gamma times the global block sum."""
    local = 0.0
    global_ = 0.0
    for key in model.block_keys():
        w_m, w_b = model.blocks[key]
        try:
            x_a, x_b = feats_a[key], feats_b[key]
        except KeyError:
            raise ConfigError(f"missing descriptor for block {key}") from None
        term = score_mahalanobis(x_a, x_b, w_m) + score_bilinear(x_a, x_b, w_b)
        if key[1] == GLOBAL_SCOPE:
            global_ += term
        else:
            local += term
    return local + model.gamma * global_


def score_gallery(
    model: SimilarityModel,
    probe_feats: dict[BlockKey, np.ndarray],
    gallery: FeatureBank,
) -> np.ndarray:
    """Vectorized :func:`score_pair` of one probe against every gallery row."""
    scores: np.ndarray | None = None
    for key in model.block_keys():
        w_m, w_b = model.blocks[key]
        try:
            x_a = probe_feats[key]
            mat_b = gallery[key]
        except KeyError:
            raise ConfigError(f"missing descriptor for block {key}") from None
        if mat_b.shape[1] != x_a.shape[0]:
            raise DimError(
                f"block {key}: probe has d={x_a.shape[0]}, gallery d={mat_b.shape[1]}"
            )
        diff = mat_b - x_a
        m_term = np.einsum("ij,ij->i", diff @ w_m, diff)
        b_term = mat_b @ ((w_b + w_b.T) @ x_a)
        contrib = m_term + b_term
        if key[1] == GLOBAL_SCOPE:
            contrib = model.gamma * contrib
        scores = contrib if scores is None else scores + contrib
    if scores is None:
        raise ConfigError("model has no weight blocks")
    return scores


def rank_gallery(
    model: SimilarityModel,
    probe_feats: dict[BlockKey, np.ndarray],
    gallery: FeatureBank,
    probe_index: int = 0,
) -> RankingList:
    """Sort the gallery by descending similarity (ascending dissimilarity)."""
    n = next(iter(gallery.values())).shape[0] if gallery else 0
    if n == 0:
        raise DataError("gallery is empty")
    scores = score_gallery(model, probe_feats, gallery)
    order = np.argsort(-scores, kind="stable")
    return RankingList(probe_index=probe_index, order=order, scores=scores)


def bank_row(bank: FeatureBank, index: int) -> dict[BlockKey, np.ndarray]:
    """Extract one image's per-block feature vectors from a bank."""
    return {key: mat[index] for key, mat in bank.items()}


# ---------------------------------------------------------------------------
# Training
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TrainConfig:
    lam: float = 1e-3
    max_iters: int = 500
    rel_tol: float = 1e-6
    armijo: float = 1e-4
    neg_ratio: int = 10


def sample_pairs(
    labels_a: np.ndarray,
    labels_b: np.ndarray,
    seed: int | np.random.Generator,
    neg_ratio: int = 10,
) -> np.ndarray:
    """All positive cross-camera pairs plus ``neg_ratio`` negatives per positive.

    Returns an (n_pairs, 3) int array of (index_a, index_b, label) with
    label +1/-1, deterministic for a fixed seed.
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    labels_a = np.asarray(labels_a)
    labels_b = np.asarray(labels_b)
    same = labels_a[:, None] == labels_b[None, :]
    pos = np.argwhere(same)
    neg = np.argwhere(~same)
    if len(pos) == 0:
        raise DataError("no positive pairs available")
    n_neg = min(neg_ratio * len(pos), len(neg))
    if n_neg == 0:
        raise DataError("no negative pairs available")
    chosen = neg[rng.choice(len(neg), size=n_neg, replace=False)]
    pairs = np.vstack(
        [
            np.column_stack([pos, np.ones(len(pos), dtype=np.int64)]),
            np.column_stack([chosen, -np.ones(len(chosen), dtype=np.int64)]),
        ]
    )
    return pairs


def _sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


class _PairData:
    """Per-block pair feature stacks reused across iterations."""

    def __init__(self, bank_a: FeatureBank, bank_b: FeatureBank,
                 pairs: np.ndarray, keys: list[BlockKey]):
        idx_a = pairs[:, 0]
        idx_b = pairs[:, 1]
        self.y = pairs[:, 2].astype(np.float64)
        self.keys = keys
        self.a: dict[BlockKey, np.ndarray] = {}
        self.b: dict[BlockKey, np.ndarray] = {}
        self.diff: dict[BlockKey, np.ndarray] = {}
        for key in keys:
            try:
                mat_a, mat_b = bank_a[key], bank_b[key]
            except KeyError:
                raise ConfigError(f"missing descriptor for block {key}") from None
            if mat_a.shape[1] != mat_b.shape[1]:
                raise DimError(f"block {key}: camera banks disagree on dimension")
            self.a[key] = mat_a[idx_a]
            self.b[key] = mat_b[idx_b]
            self.diff[key] = self.a[key] - self.b[key]


def _pair_scores(
    data: _PairData,
    blocks: dict[BlockKey, tuple[np.ndarray, np.ndarray]],
    gamma: float,
) -> np.ndarray:
    s = np.zeros(len(data.y))
    for key in data.keys:
        w_m, w_b = blocks[key]
        a, b, diff = data.a[key], data.b[key], data.diff[key]
        term = np.einsum("ij,ij->i", diff @ w_m, diff)
        term += np.einsum("ij,ij->i", a @ w_b, b) + np.einsum("ij,ij->i", b @ w_b, a)
        s += gamma * term if key[1] == GLOBAL_SCOPE else term
    return s


def loss_and_gradient(
    data: _PairData,
    blocks: dict[BlockKey, tuple[np.ndarray, np.ndarray]],
    bias: float,
    gamma: float,
    lam: float,
) -> tuple[float, dict[BlockKey, tuple[np.ndarray, np.ndarray]], float]:
    """Logistic pair loss with Frobenius penalty, plus analytic gradients."""
    z = _pair_scores(data, blocks, gamma) - bias
    margins = -data.y * z
    loss = float(np.logaddexp(0.0, margins).sum())
    coef = -data.y * _sigmoid(margins)
    grad_bias = float(-coef.sum())
    grads: dict[BlockKey, tuple[np.ndarray, np.ndarray]] = {}
    for key in data.keys:
        w_m, w_b = blocks[key]
        scale = gamma if key[1] == GLOBAL_SCOPE else 1.0
        c = coef * scale
        a, b, diff = data.a[key], data.b[key], data.diff[key]
        cd = diff * c[:, None]
        g_m = cd.T @ diff + 2.0 * lam * w_m
        ca = a * c[:, None]
        g_b = ca.T @ b + (b * c[:, None]).T @ a + 2.0 * lam * w_b
        grads[key] = (g_m, g_b)
        loss += lam * (float(np.sum(w_m * w_m)) + float(np.sum(w_b * w_b)))
    return loss, grads, grad_bias


def _symmetrize(blocks: dict[BlockKey, tuple[np.ndarray, np.ndarray]]) -> None:
    for key, (w_m, w_b) in blocks.items():
        blocks[key] = (0.5 * (w_m + w_m.T), 0.5 * (w_b + w_b.T))


def train_model(
    bank_a: FeatureBank,
    bank_b: FeatureBank,
    pairs: np.ndarray,
    rep: Representation,
    gamma: float = GAMMA_DEFAULT,
    config: TrainConfig = TrainConfig(),
) -> SimilarityModel:
    """Fit weight blocks by full-batch gradient descent with line search.

    ``pairs`` rows are (index_a, index_b, +1/-1); both classes must be
    present. Weights start at zero (the loss is convex in them) and every
    accepted step is symmetrized.
    """
    pairs = np.asarray(pairs)
    labels = set(np.unique(pairs[:, 2]).tolist())
    if not labels.issuperset({-1, 1}) or len(pairs) == 0:
        raise DataError("training pairs must contain both classes")
    keys = rep.block_keys()
    data = _PairData(bank_a, bank_b, pairs, keys)
    blocks = {
        key: (
            np.zeros((data.a[key].shape[1],) * 2),
            np.zeros((data.a[key].shape[1],) * 2),
        )
        for key in keys
    }
    bias = 0.0
    loss, grads, grad_bias = loss_and_gradient(data, blocks, bias, gamma, config.lam)
    if not np.isfinite(loss):
        raise NumericError("initial loss is not finite")
    step = 1.0
    for _ in range(config.max_iters):
        grad_sq = grad_bias**2
        for g_m, g_b in grads.values():
            grad_sq += float(np.sum(g_m * g_m)) + float(np.sum(g_b * g_b))
        if grad_sq == 0.0:
            break
        accepted = False
        t = step
        for _ in range(60):
            trial = {
                key: (blocks[key][0] - t * grads[key][0], blocks[key][1] - t * grads[key][1])
                for key in keys
            }
            trial_bias = bias - t * grad_bias
            trial_loss, trial_grads, trial_gb = loss_and_gradient(
                data, trial, trial_bias, gamma, config.lam
            )
            if np.isfinite(trial_loss) and trial_loss <= loss - config.armijo * t * grad_sq:
                accepted = True
                break
            t *= 0.5
        if not accepted:
            break
        _symmetrize(trial)
        blocks, bias = trial, trial_bias
        prev_loss, loss, grads, grad_bias = loss, trial_loss, trial_grads, trial_gb
        if not np.isfinite(loss):
            raise NumericError("training loss became non-finite")
        step = t * 2.0
        if abs(prev_loss - loss) <= config.rel_tol * max(1.0, abs(prev_loss)):
            break
    return SimilarityModel(rep_id=rep.rep_id, gamma=gamma, bias=bias, blocks=blocks)


def pair_accuracy(
    model: SimilarityModel,
    bank_a: FeatureBank,
    bank_b: FeatureBank,
    pairs: np.ndarray,
) -> float:
    """Fraction of pairs whose score side of the bias matches the label."""
    pairs = np.asarray(pairs)
    data = _PairData(bank_a, bank_b, pairs, model.block_keys())
    z = _pair_scores(data, model.blocks, model.gamma) - model.bias
    pred = np.where(z > 0, 1, -1)
    return float(np.mean(pred == pairs[:, 2]))


# ---------------------------------------------------------------------------
# Persistence (SIMW format)
# ---------------------------------------------------------------------------

SIMW_MAGIC = b"SIMW"
SIMW_VERSION = 1
_GLOBAL_TAG = 0xFFFFFFFF


def save_model(model: SimilarityModel, path: str | Path) -> None:
    """Write magic, version, gamma, bias, then per-block tag/d/W_M/W_B (f32 LE)."""
    with open(path, "wb") as fh:
        fh.write(SIMW_MAGIC)
        fh.write(struct.pack("<Iff", SIMW_VERSION, model.gamma, model.bias))
        fh.write(struct.pack("<I", len(model.blocks)))
        for cue, scope in model.block_keys():
            w_m, w_b = model.blocks[(cue, scope)]
            region = _GLOBAL_TAG if scope == GLOBAL_SCOPE else int(scope[1:])
            cue_bytes = cue.encode("utf-8")
            fh.write(struct.pack("<II", region, len(cue_bytes)))
            fh.write(cue_bytes)
            fh.write(struct.pack("<I", w_m.shape[0]))
            fh.write(np.ascontiguousarray(w_m, dtype="<f4").tobytes())
            fh.write(np.ascontiguousarray(w_b, dtype="<f4").tobytes())


def load_model(path: str | Path, rep_id: str = "") -> SimilarityModel:
    path = Path(path)
    raw = path.read_bytes()
    if raw[:4] != SIMW_MAGIC:
        raise DataError(f"{path}: bad magic {raw[:4]!r}")
    version, gamma, bias = struct.unpack("<Iff", raw[4:16])
    if version != SIMW_VERSION:
        raise DataError(f"{path}: unsupported SIMW version {version}")
    (count,) = struct.unpack("<I", raw[16:20])
    pos = 20
    blocks: dict[BlockKey, tuple[np.ndarray, np.ndarray]] = {}
    for _ in range(count):
        region, cue_len = struct.unpack("<II", raw[pos : pos + 8])
        pos += 8
        cue = raw[pos : pos + cue_len].decode("utf-8")
        pos += cue_len
        (d,) = struct.unpack("<I", raw[pos : pos + 4])
        pos += 4
        n_bytes = d * d * 4
        w_m = np.frombuffer(raw, dtype="<f4", count=d * d, offset=pos).reshape(d, d)
        pos += n_bytes
        w_b = np.frombuffer(raw, dtype="<f4", count=d * d, offset=pos).reshape(d, d)
        pos += n_bytes
        scope = GLOBAL_SCOPE if region == _GLOBAL_TAG else f"r{region}"
        blocks[(cue, scope)] = (w_m.astype(np.float64), w_b.astype(np.float64))
    if pos != len(raw):
        raise DataError(f"{path}: trailing bytes after last block")
    return SimilarityModel(
        rep_id=rep_id or path.stem, gamma=float(gamma), bias=float(bias), blocks=blocks
    )
