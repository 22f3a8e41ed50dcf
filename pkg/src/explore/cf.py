"""User-user collaborative filtering over the rating matrix.

Similarity is the Pearson correlation over co-rated songs, damped by a
significance weight min(overlap, cap)/cap so that tiny overlaps cannot
produce confident neighbors. Predictions are mean-centered weighted
averages of neighbor deviations, clamped to the rating range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import (
    EmptyNeighborhoodError,
    InsufficientOverlapError,
    NoRatingSupportError,
)
from .matrix import RATING_MAX, RATING_MIN, RatingMatrix

DEFAULT_K = 30
DEFAULT_MIN_OVERLAP = 3
SIGNIFICANCE_CAP = 50


@dataclass(frozen=True)
class CFConfig:
    k: int = DEFAULT_K
    min_overlap: int = DEFAULT_MIN_OVERLAP
    significance_weighting: bool = True
    significance_cap: int = SIGNIFICANCE_CAP
    drop_negative: bool = False


@dataclass(frozen=True)
class Neighbor:
    user: int
    similarity: float
    co_rated: int


@dataclass
class NeighborSet:
    user: int
    neighbors: list[Neighbor] = field(default_factory=list)

    def __iter__(self):
        return iter(self.neighbors)

    def __len__(self):
        return len(self.neighbors)


@dataclass(frozen=True)
class PredictedRating:
    user: int
    song: int
    value: float
    support: int


def pearson(a, b, min_overlap: int = DEFAULT_MIN_OVERLAP) -> float | None:
    """Centered correlation of two co-rated vectors; None when either side
    has zero variance. Raises InsufficientOverlapError below min_overlap."""
    n = len(a)
    if n != len(b):
        raise ValueError("vectors must have equal length")
    if n < min_overlap:
        raise InsufficientOverlapError(
            f"{n} co-rated songs, need at least {min_overlap}"
        )
    mean_a = sum(a) / n
    mean_b = sum(b) / n
    num = 0.0
    var_a = 0.0
    var_b = 0.0
    for x, y in zip(a, b):
        dx = x - mean_a
        dy = y - mean_b
        num += dx * dy
        var_a += dx * dx
        var_b += dy * dy
    if var_a == 0.0 or var_b == 0.0:
        return None
    r = num / math.sqrt(var_a * var_b)
    return max(-1.0, min(1.0, r))


def similarity(
    matrix: RatingMatrix, u: int, v: int, config: CFConfig = CFConfig()
) -> tuple[float, int] | None:
    """Damped Pearson similarity between users u and v, or None when the
    overlap is too small or the correlation is undefined."""
    row_u = matrix.row_dict(u)
    row_v = matrix.row_dict(v)
    common = sorted(row_u.keys() & row_v.keys())
    if len(common) < config.min_overlap:
        return None
    a = [row_u[s] for s in common]
    b = [row_v[s] for s in common]
    sim = pearson(a, b, config.min_overlap)
    if sim is None:
        return None
    if config.significance_weighting:
        sim *= min(len(common), config.significance_cap) / config.significance_cap
    return sim, len(common)


def neighbors(
    matrix: RatingMatrix, user: int, k: int = DEFAULT_K, config: CFConfig | None = None
) -> NeighborSet:
    """Top-k users by |similarity|, ties broken by ascending user index."""
    if config is None:
        config = CFConfig(k=k)
    if not 0 <= user < matrix.n_users:
        raise IndexError(f"user index {user} out of range")
    if k < 1:
        raise ValueError("k must be >= 1")

    candidates: list[Neighbor] = []
    for v in range(matrix.n_users):
        if v == user:
            continue
        result = similarity(matrix, user, v, config)
        if result is None:
            continue
        sim, overlap = result
        if config.drop_negative and sim < 0:
            continue
        candidates.append(Neighbor(v, sim, overlap))

    if not candidates:
        raise EmptyNeighborhoodError(
            f"no user shares {config.min_overlap}+ rated songs with user index {user}"
        )
    candidates.sort(key=lambda nb: (-abs(nb.similarity), nb.user))
    return NeighborSet(user, candidates[:k])


def predict_rating(
    matrix: RatingMatrix, user: int, song: int, neighbor_set: NeighborSet
) -> PredictedRating:
    """Mean-centered weighted average over the neighbors that rated song.

    r(i,j) = mean_i + sum sim * (r_uj - mean_u) / sum |sim|, clamped to the
    rating range. A zero similarity mass leaves the prediction at mean_i.
    """
    num = 0.0
    den = 0.0
    support = 0
    for nb in neighbor_set:
        r_uj = matrix.rating(nb.user, song)
        if r_uj is None:
            continue
        support += 1
        num += nb.similarity * (r_uj - matrix.user_means[nb.user])
        den += abs(nb.similarity)
    if support == 0:
        raise NoRatingSupportError(
            f"no neighbor of user index {user} rated song index {song}"
        )
    value = matrix.user_means[user] + (num / den if den > 0.0 else 0.0)
    value = max(RATING_MIN, min(RATING_MAX, value))
    return PredictedRating(user, song, value, support)


def recommend_cf(
    matrix: RatingMatrix,
    user: int,
    n: int,
    exclude_rated: bool = True,
    config: CFConfig | None = None,
    neighbor_set: NeighborSet | None = None,
) -> list[tuple[int, float]]:
    """Top-n (song index, predicted rating), score descending then index.

    Only songs some neighbor rated can be scored; others are skipped.
    """
    if config is None:
        config = CFConfig()
    if neighbor_set is None:
        neighbor_set = neighbors(matrix, user, config.k, config)

    rated = set(int(s) for s in matrix.row(user)[0])
    scored: list[tuple[int, float]] = []
    for song in range(matrix.n_songs):
        if exclude_rated and song in rated:
            continue
        try:
            pred = predict_rating(matrix, user, song, neighbor_set)
        except NoRatingSupportError:
            continue
        scored.append((song, pred.value))

    scored.sort(key=lambda t: (-t[1], t[0]))
    return scored[:n]
