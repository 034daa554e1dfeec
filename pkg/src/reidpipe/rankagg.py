"""Order-statistics ranking aggregation and best-n list selection.

The aggregation statistic is the joint probability that ``n`` independent
uniform order statistics all fall below the observed normalized ranks;
smaller means the lists agree on placing the item early.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from .errors import ConfigError, ContractError, DataError
from .simlearn import RankingList


@dataclass(frozen=True)
class AggregationResult:
    """Aggregated gallery order for one probe, strongest agreement first.

    ``scores`` holds the per-item statistic (smaller = better); ``order`` is
    sorted by ascending statistic with ties broken by ascending index.
    """

    probe_index: int
    order: np.ndarray
    scores: np.ndarray


def stuart_statistic(r: np.ndarray, n: int | None = None) -> float:
    """P(U_(1) <= r_(1), ..., U_(n) <= r_(n)) for sorted normalized ranks.

    Computed by the recursion W_0 = 1,
    W_k = sum_{i=1..k} (-1)^(i-1) C(k, i) r_(n-k+1)^i W_(k-i),
    returning W_n clamped to [0, 1]. This is n! times the classical
    factorial-normalized recursion; the binomial form keeps the all-ones
    profile exactly 1 in floating point.
    """
    r = np.asarray(r, dtype=np.float64)
    if n is None:
        n = r.size
    if n != r.size or n == 0:
        raise ContractError(f"rank profile of length {r.size} does not match n={n}")
    if np.any(np.diff(r) < 0):
        raise ContractError("ranks must be sorted ascending")
    if np.any(r <= 0) or np.any(r > 1):
        raise ContractError("ranks must lie in (0, 1]")
    w = np.zeros(n + 1)
    w[0] = 1.0
    for k in range(1, n + 1):
        rv = r[n - k]
        acc = 0.0
        sign = 1.0
        rp = 1.0
        for i in range(1, k + 1):
            rp *= rv
            acc += sign * comb(k, i) * rp * w[k - i]
            sign = -sign
        w[k] = acc
    return float(min(1.0, max(0.0, w[n])))


def _check_permutation(order: np.ndarray, m: int) -> None:
    if order.shape != (m,) or not np.array_equal(np.sort(order), np.arange(m)):
        raise DataError("ranking lists must be full permutations of one gallery")


def aggregate(rankings: list[RankingList | AggregationResult]) -> AggregationResult:
    """Combine n >= 2 full rankings of the same gallery into one order."""
    if len(rankings) < 2:
        raise DataError(f"aggregation needs at least 2 lists, got {len(rankings)}")
    m = rankings[0].order.shape[0]
    profiles = np.empty((m, len(rankings)))
    for j, ranking in enumerate(rankings):
        order = np.asarray(ranking.order)
        _check_permutation(order, m)
        positions = np.empty(m, dtype=np.float64)
        positions[order] = np.arange(1, m + 1)
        profiles[:, j] = positions / m
    profiles.sort(axis=1)
    stats = np.array([stuart_statistic(profiles[i]) for i in range(m)])
    order = np.lexsort((np.arange(m), stats))
    return AggregationResult(
        probe_index=rankings[0].probe_index, order=order, scores=stats
    )


@dataclass(frozen=True)
class BestNSelection:
    """Validation-driven ordering of representations and the chosen list count."""

    ordered_reps: tuple[str, ...]
    chosen_n: int
    top1_per_n: dict[int, float]


def best_n_select(
    validation_top1: dict[str, float],
    validation_rankings: dict[str, list[RankingList]],
    truth: dict[int, int],
    n_max: int = 12,
) -> BestNSelection:
    """Order representations by validation top-1 and pick the best prefix size.

    For each n in 2..n_max the best-n validation lists are aggregated and
    scored by top-1 rate; the smallest n attaining the maximum wins. Rate
    ties in the ordering keep the insertion order of ``validation_top1``.
    """
    reps = [rep for rep, rate in validation_top1.items() if np.isfinite(rate)]
    if len(reps) < 2:
        raise ConfigError(f"best-n needs at least 2 representations, got {len(reps)}")
    ordered = sorted(reps, key=lambda rep: -validation_top1[rep])
    n_probes = len(validation_rankings[ordered[0]])
    top1_per_n: dict[int, float] = {}
    for n in range(2, min(n_max, len(ordered)) + 1):
        hits = 0
        for p in range(n_probes):
            combined = aggregate([validation_rankings[rep][p] for rep in ordered[:n]])
            hits += int(combined.order[0] == truth[combined.probe_index])
        top1_per_n[n] = hits / n_probes if n_probes else 0.0
    chosen_n = max(top1_per_n, key=lambda n: (top1_per_n[n], -n))
    return BestNSelection(
        ordered_reps=tuple(ordered), chosen_n=chosen_n, top1_per_n=top1_per_n
    )
