"""Discriminant context information analysis (DCIA) post-ranking.

For each probe, the top of its ranking (content set) is selected by a
dynamic knee threshold, gallery images that co-occur in the neighbor
windows of the probe and of several correlated matches form the context
set, the shared-appearance principal subspace of probe+content+context is
removed, and a freshly trained model re-orders the content prefix.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np

from .errors import ContractError, DataError
from .simlearn import (
    FeatureBank,
    RankingList,
    Representation,
    SimilarityModel,
    TrainConfig,
    bank_row,
    rank_gallery,
    score_gallery,
    train_model,
)

K_COMMON = 13
ENERGY = 0.35
WINDOW = 25

_DCIA_KEY = ("dcia", "G")


@dataclass(frozen=True)
class ContentSet:
    """The correlated matches: top-m prefix of a ranking under a dynamic threshold."""

    probe_index: int
    members: tuple[int, ...]
    threshold: float

    @property
    def m(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class ContextSet:
    """Common neighbors of the probe window and the correlated-match windows."""

    probe_index: int
    per_match: dict[int, tuple[int, ...]]
    merged: tuple[int, ...]


@dataclass(frozen=True)
class DiscriminantBlock:
    """Eq.-style removal of the common-appearance subspace.

    ``d_p`` stacks the zero-mean probe/content/context vectors as columns,
    ``basis`` spans the leading principal subspace reaching the requested
    energy share, and ``d_p_star = d_p - basis basis^T d_p``.
    """

    d_p: np.ndarray
    basis: np.ndarray
    d_p_star: np.ndarray

    @property
    def probe_star(self) -> np.ndarray:
        return self.d_p_star[:, 0]

    def member_star(self, position: int) -> np.ndarray:
        return self.d_p_star[:, 1 + position]


def knee_point(sorted_dissimilarities: np.ndarray, window: int = WINDOW) -> tuple[int, float]:
    """Largest below-chord deviation of the dissimilarity-vs-rank curve.

    Returns (m, Th) with 1-based m. The chord joins the first and last point
    of the top-``window`` curve; the knee is the point farthest below it,
    ties to the smallest index. Degenerate curves (linear, or bending the
    other way) fall back to m=1, as do curves shorter than 3 points.
    """
    d = np.asarray(sorted_dissimilarities, dtype=np.float64)
    if d.size == 0:
        raise DataError("knee_point needs a non-empty curve")
    if np.any(np.diff(d) < 0):
        raise ContractError("dissimilarities must be ascending")
    t = min(window, d.size)
    if t < 3:
        return 1, float(d[0])
    win = d[:t]
    x = np.arange(t, dtype=np.float64)
    chord = win[0] + (win[-1] - win[0]) * x / (t - 1)
    below = chord - win
    best = int(np.argmax(below))
    # curves that are linear (or bend the other way) have no below-chord knee
    tol = 1e-12 * max(1.0, float(np.max(np.abs(win))))
    if below[best] <= tol:
        return 1, float(win[0])
    return best + 1, float(win[best])


def content_set(initial_ranking: RankingList, window: int = WINDOW) -> ContentSet:
    """Knee-limited top prefix of the ranking (the re-rankable candidates)."""
    d = initial_ranking.dissimilarities[initial_ranking.order]
    m, th = knee_point(d, window)
    members = tuple(int(g) for g in initial_ranking.order[:m])
    return ContentSet(probe_index=initial_ranking.probe_index, members=members, threshold=th)


def _member_window(
    g: int,
    gallery: FeatureBank,
    model: SimilarityModel,
    window: int,
    cache: dict[int, tuple[int, ...]] | None,
) -> tuple[int, ...]:
    """Knee-limited top set of gallery image ``g`` ranked against the rest."""
    if cache is not None and g in cache:
        return cache[g]
    scores = score_gallery(model, bank_row(gallery, g), gallery)
    order = np.argsort(-scores, kind="stable")
    order = order[order != g]
    if order.size == 0:
        result: tuple[int, ...] = ()
    else:
        m_g, _ = knee_point(-scores[order], window)
        result = tuple(int(i) for i in order[:m_g])
    if cache is not None:
        cache[g] = result
    return result


def context_set(
    initial_ranking: RankingList,
    content: ContentSet,
    gallery: FeatureBank,
    model: SimilarityModel,
    k: int = K_COMMON,
    window: int = WINDOW,
    neighbor_cache: dict[int, tuple[int, ...]] | None = None,
) -> ContextSet:
    """Common-neighbor context of each correlated match.

    A candidate from a match's window survives only if it also occurs in the
    probe's window or another match's window. Candidates are ordered by
    descending co-occurrence count; a flat count histogram (and any tie) is
    broken by higher candidate-to-probe similarity, then by index. At most
    ``k`` candidates are kept per match; the merged union excludes content
    members.
    """
    probe_window = set(content.members)
    windows = {
        g: _member_window(g, gallery, model, window, neighbor_cache)
        for g in content.members
    }
    counts: Counter[int] = Counter()
    for members in windows.values():
        counts.update(members)
    counts.update(probe_window)

    per_match: dict[int, tuple[int, ...]] = {}
    for g in content.members:
        candidates = [c for c in windows[g] if counts[c] >= 2]
        candidates.sort(
            key=lambda c: (-counts[c], -initial_ranking.scores[c], c)
        )
        per_match[g] = tuple(candidates[:k])
    merged = sorted(set().union(*per_match.values()) - probe_window) if per_match else []
    return ContextSet(
        probe_index=content.probe_index,
        per_match=per_match,
        merged=tuple(int(c) for c in merged),
    )


def discriminant_removal(vectors: np.ndarray, energy: float = ENERGY) -> DiscriminantBlock:
    """Remove the leading principal subspace holding ``energy`` of the variance.

    ``vectors`` stacks probe, content and context feature vectors as rows
    (l x d, l >= 2). The returned block holds the column-stacked zero-mean
    matrix, the selected orthonormal basis and the projected residual.
    """
    x = np.asarray(vectors, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < 2:
        raise DataError(f"need at least 2 vectors, got shape {x.shape}")
    centered = x - x.mean(axis=0)
    d_p = centered.T
    _, s, vt = np.linalg.svd(centered, full_matrices=False)
    sv2 = s**2
    total = float(sv2.sum())
    if total <= 0.0:
        basis = np.zeros((x.shape[1], 0))
        return DiscriminantBlock(d_p=d_p, basis=basis, d_p_star=d_p.copy())
    cum = np.cumsum(sv2)
    k = int(np.searchsorted(cum, energy * total - 1e-12) + 1)
    rank = int(np.sum(s > s[0] * 1e-12))
    k = min(k, rank)
    basis = vt[:k].T.copy()
    d_p_star = d_p - basis @ (basis.T @ d_p)
    return DiscriminantBlock(d_p=d_p, basis=basis, d_p_star=d_p_star)


@dataclass(frozen=True)
class DciaResult:
    """Everything DCIA derives from one initial ranking."""

    ranking: RankingList
    content: ContentSet
    context: ContextSet
    block: DiscriminantBlock


def apply_dcia(
    initial_ranking: RankingList,
    probe_vector: np.ndarray,
    gallery_vectors: np.ndarray,
    gallery_bank: FeatureBank,
    model: SimilarityModel,
    *,
    energy: float = ENERGY,
    k: int = K_COMMON,
    window: int = WINDOW,
    neighbor_cache: dict[int, tuple[int, ...]] | None = None,
) -> DciaResult:
    """Content/context extraction plus discriminant removal for one probe.

    ``probe_vector`` and ``gallery_vectors`` are the concatenated feature
    vectors DCIA operates on; ``gallery_bank`` feeds the model when ranking
    gallery members against each other for the context windows.
    """
    content = content_set(initial_ranking, window)
    context = context_set(
        initial_ranking, content, gallery_bank, model, k, window, neighbor_cache
    )
    stack = np.vstack(
        [probe_vector]
        + [gallery_vectors[g] for g in content.members]
        + [gallery_vectors[c] for c in context.merged]
    )
    block = discriminant_removal(stack, energy)
    return DciaResult(ranking=initial_ranking, content=content, context=context, block=block)


def train_postrank_model(
    dcia_results: list[DciaResult],
    probe_labels: np.ndarray,
    gallery_labels: np.ndarray,
    config: TrainConfig = TrainConfig(),
) -> SimilarityModel:
    """Train the re-ranking model on discriminant probe/member pairs.

    Only probes with at least two content members contribute. The model
    treats the flattened discriminant representation as a single global cue.
    """
    vec_a: list[np.ndarray] = []
    vec_b: list[np.ndarray] = []
    labels: list[int] = []
    for result in dcia_results:
        if result.content.m < 2:
            continue
        p = result.ranking.probe_index
        for pos, g in enumerate(result.content.members):
            vec_a.append(result.block.probe_star)
            vec_b.append(result.block.member_star(pos))
            labels.append(1 if probe_labels[p] == gallery_labels[g] else -1)
    if not labels:
        raise DataError("no trainable probes: every content set has fewer than 2 members")
    n = len(labels)
    pairs = np.column_stack([np.arange(n), np.arange(n), np.asarray(labels)])
    bank_a = {_DCIA_KEY: np.vstack(vec_a)}
    bank_b = {_DCIA_KEY: np.vstack(vec_b)}
    rep = Representation(rep_id="postrank", cue_scopes={_DCIA_KEY[0]: "G"}, n_regions=0)
    return train_model(bank_a, bank_b, pairs, rep, gamma=1.0, config=config)


def postrank(
    initial_ranking: RankingList,
    content: ContentSet,
    block: DiscriminantBlock,
    postrank_model: SimilarityModel,
) -> RankingList:
    """Re-order only the content prefix by the post-rank model's distances.

    Positions after m keep their initial order. The prefix re-uses the
    initial score multiset positionally so the ranking stays sorted by
    non-increasing score; prefix distance ties break by gallery index.
    """
    m = content.m
    if m <= 1:
        return initial_ranking
    members = np.asarray(content.members, dtype=np.int64)
    member_bank = {_DCIA_KEY: block.d_p_star[:, 1 : 1 + m].T}
    new_scores = score_gallery(postrank_model, {_DCIA_KEY: block.probe_star}, member_bank)
    prefix_perm = np.lexsort((members, -new_scores))
    new_order = np.concatenate([members[prefix_perm], initial_ranking.order[m:]])
    scores = initial_ranking.scores.copy()
    scores[members[prefix_perm]] = initial_ranking.scores[initial_ranking.order[:m]]
    return RankingList(
        probe_index=initial_ranking.probe_index, order=new_order, scores=scores
    )


def rank_all(
    model: SimilarityModel,
    probe_bank: FeatureBank,
    gallery_bank: FeatureBank,
    n_probes: int,
) -> list[RankingList]:
    """Initial rankings for every probe index."""
    return [
        rank_gallery(model, bank_row(probe_bank, p), gallery_bank, probe_index=p)
        for p in range(n_probes)
    ]
