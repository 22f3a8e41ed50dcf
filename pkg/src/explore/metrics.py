"""Evaluation harness: train/test splits, RMSE, AP@K / MAP@K, NDCG@K.

The average-precision normalizer divides by the number of relevant items
inside the top k (the formulation this engine is specified against); the
more common min(|relevant|, k) normalizer is available behind a flag.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from .cf import CFConfig, NeighborSet, neighbors, predict_rating
from .errors import (
    EmptyNeighborhoodError,
    EmptyTestError,
    LengthMismatchError,
    NegativeGainError,
    NoRatingSupportError,
    NoUsersError,
)
from . import errors
from .matrix import RatingMatrix


class SplitStrategy(str, Enum):
    STRATIFIED_PER_USER = "stratified"
    GLOBAL_RANDOM = "random"


@dataclass(frozen=True)
class SplitSpec:
    strategy: SplitStrategy = SplitStrategy.STRATIFIED_PER_USER
    train_fraction: float = 0.8
    seed: int = 42

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError("train_fraction must be in (0, 1)")


def split(matrix: RatingMatrix, spec: SplitSpec) -> tuple[RatingMatrix, RatingMatrix]:
    """Disjoint train/test matrices over the same user/song index space.

    Stratified: per user, ceil(train_fraction * n_u) entries go to train;
    single-rating users go wholly to train. Global: one entry-level shuffle.
    Synthesized cold-start users never reach the test side.
    """
    rng = np.random.default_rng(spec.seed)
    train_triples: list[tuple[int, int, float]] = []
    test_triples: list[tuple[int, int, float]] = []

    if spec.strategy is SplitStrategy.STRATIFIED_PER_USER:
        for u in range(matrix.n_users):
            sids, vals = matrix.row(u)
            n_u = len(sids)
            if n_u == 0:
                continue
            if n_u == 1 or matrix.is_synthetic(u):
                train_triples.extend(
                    (u, int(s), float(v)) for s, v in zip(sids, vals)
                )
                continue
            order = rng.permutation(n_u)
            n_train = math.ceil(spec.train_fraction * n_u)
            for pos, j in enumerate(order):
                triple = (u, int(sids[j]), float(vals[j]))
                (train_triples if pos < n_train else test_triples).append(triple)
    else:
        triples = [(u, s, r) for (u, s, r) in matrix.entries()]
        order = rng.permutation(len(triples))
        n_train = math.ceil(spec.train_fraction * len(triples))
        for pos, j in enumerate(order):
            u, s, r = triples[j]
            if pos < n_train or matrix.is_synthetic(u):
                train_triples.append((u, s, r))
            else:
                test_triples.append((u, s, r))

    if not test_triples:
        raise EmptyTestError(
            "split produced an empty test side; input too small for the fraction"
        )
    train = RatingMatrix.from_entries(matrix.users, matrix.songs, train_triples)
    test = RatingMatrix.from_entries(matrix.users, matrix.songs, test_triples)
    return train, test


# --- point and ranking metrics ----------------------------------------------

def rmse(predicted: Sequence[float], actual: Sequence[float]) -> float:
    if len(predicted) != len(actual):
        raise LengthMismatchError(
            f"{len(predicted)} predictions vs {len(actual)} actuals"
        )
    if not predicted:
        raise errors.EmptyInputError("rmse of empty input")
    total = 0.0
    for p, a in zip(predicted, actual):
        total += (p - a) ** 2
    return math.sqrt(total / len(predicted))


def average_precision_at_k(
    ranked: Sequence, relevant: set, k: int, paper_normalizer: bool = True
) -> float:
    """AP@k: mean of precision-at-position over relevant positions in top k.

    paper_normalizer divides by the relevant count inside the top k;
    otherwise by min(|relevant|, k).
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    top = ranked[:k]
    hits = 0
    total = 0.0
    for pos, item in enumerate(top, start=1):
        if item in relevant:
            hits += 1
            total += hits / pos
    r_k = hits if paper_normalizer else min(len(relevant), k)
    if r_k == 0:
        return 0.0
    return total / r_k


def map_at_k(
    rankings: Sequence[Sequence],
    judgments: Sequence[set],
    k: int,
    paper_normalizer: bool = True,
) -> float:
    if len(rankings) != len(judgments):
        raise LengthMismatchError("rankings and judgments differ in length")
    if not rankings:
        raise NoUsersError("map_at_k needs at least one user")
    total = 0.0
    for ranked, relevant in zip(rankings, judgments):
        total += average_precision_at_k(ranked, relevant, k, paper_normalizer)
    return total / len(rankings)


def ndcg_at_k(gains: Sequence[float], k: int) -> float:
    """Position-discounted gain of the first k items over the ideal order."""
    if k < 1:
        raise ValueError("k must be >= 1")
    for g in gains:
        if g < 0:
            raise NegativeGainError(f"negative gain {g}")

    def dcg(values):
        total = 0.0
        for i, g in enumerate(values[:k], start=1):
            total += g / math.log2(i + 1)
        return total

    ideal = dcg(sorted(gains, reverse=True))
    if ideal == 0.0:
        return 0.0
    return dcg(gains) / ideal


# --- end-to-end evaluation ---------------------------------------------------

@dataclass
class EvaluationReport:
    algo: str
    strategy: str
    train_fraction: float
    seed: int
    k: int
    relevance_threshold: float
    n_users: int
    n_songs: int
    n_train_entries: int
    n_test_entries: int
    rmse: float
    map_at_k: float
    mean_ndcg_at_k: float
    coverage: float
    n_users_ranked: int
    per_user: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "algo": self.algo,
            "split": {
                "strategy": self.strategy,
                "train_fraction": self.train_fraction,
                "seed": self.seed,
            },
            "k": self.k,
            "relevance_threshold": self.relevance_threshold,
            "n_users": self.n_users,
            "n_songs": self.n_songs,
            "n_train_entries": self.n_train_entries,
            "n_test_entries": self.n_test_entries,
            "rmse": self.rmse,
            "map_at_k": self.map_at_k,
            "mean_ndcg_at_k": self.mean_ndcg_at_k,
            "coverage": self.coverage,
            "n_users_ranked": self.n_users_ranked,
            "per_user": self.per_user,
        }

    def to_table(self) -> str:
        head = [
            ("algo", self.algo),
            ("split", f"{self.strategy} {self.train_fraction:.2f} seed={self.seed}"),
            ("entries", f"{self.n_train_entries} train / {self.n_test_entries} test"),
            ("rmse", f"{self.rmse:.4f}"),
            (f"map@{self.k}", f"{self.map_at_k:.4f}"),
            (f"ndcg@{self.k}", f"{self.mean_ndcg_at_k:.4f}"),
            ("coverage", f"{self.coverage:.4f}"),
            ("users ranked", str(self.n_users_ranked)),
        ]
        width = max(len(name) for name, _ in head)
        lines = [f"{name:<{width}}  {value}" for name, value in head]
        if self.per_user:
            lines.append("")
            lines.append(f"{'user':<20} {'n_test':>6} {'ap':>8} {'ndcg':>8}")
            for row in self.per_user:
                lines.append(
                    f"{row['user']:<20} {row['n_test']:>6} "
                    f"{row['ap']:>8.4f} {row['ndcg']:>8.4f}"
                )
        return "\n".join(lines)


class _CFPredictor:
    """Per-user neighbor sets over the train matrix, with mean fallbacks."""

    def __init__(self, train: RatingMatrix, config: CFConfig):
        self.train = train
        self.config = config
        self.global_mean = (
            float(train.ratings.astype(np.float64).mean()) if train.n_entries else 3.0
        )
        self._neighbor_cache: dict[int, NeighborSet | None] = {}

    def _neighbors(self, u: int) -> NeighborSet | None:
        if u not in self._neighbor_cache:
            try:
                self._neighbor_cache[u] = neighbors(
                    self.train, u, self.config.k, self.config
                )
            except EmptyNeighborhoodError:
                self._neighbor_cache[u] = None
        return self._neighbor_cache[u]

    def predict(self, u: int, s: int) -> tuple[float, bool]:
        """(prediction, covered). Fallback: user train mean, then global."""
        ns = self._neighbors(u)
        if ns is not None:
            try:
                return predict_rating(self.train, u, s, ns).value, True
            except NoRatingSupportError:
                pass
        sids, _ = self.train.row(u)
        if len(sids):
            return float(self.train.user_means[u]), False
        return self.global_mean, False


class _MFPredictor:
    def __init__(self, train: RatingMatrix, mf_params: dict):
        from .mf import predict_mf, train_mf

        self.model = train_mf(train, **mf_params)
        self._predict = predict_mf

    def predict(self, u: int, s: int) -> tuple[float, bool]:
        return self._predict(self.model, u, s), True


def evaluate(
    matrix: RatingMatrix,
    spec: SplitSpec,
    algo: str = "cf",
    k: int = 3,
    relevance_threshold: float = 3.5,
    cf_config: CFConfig | None = None,
    mf_params: dict | None = None,
) -> EvaluationReport:
    """Split, fit on train, score test entries, and rank per-user test songs.

    RMSE covers every test entry (mean fallback where the model cannot
    predict; `coverage` reports the model-proper fraction). Ranking metrics
    order each user's test songs by predicted score; relevance is a test
    rating at or above the threshold, NDCG gains are the raw test ratings.
    """
    train, test = split(matrix, spec)

    if algo == "cf":
        predictor = _CFPredictor(train, cf_config or CFConfig())
    elif algo == "mf":
        predictor = _MFPredictor(train, mf_params or {})
    else:
        raise ValueError(f"unknown algo {algo!r}, expected 'cf' or 'mf'")

    predicted: list[float] = []
    actual: list[float] = []
    covered = 0
    per_user_preds: dict[int, list[tuple[int, float, float]]] = {}
    for u in range(test.n_users):
        sids, vals = test.row(u)
        for s, r in zip(sids, vals):
            p, model_proper = predictor.predict(u, int(s))
            predicted.append(p)
            actual.append(float(r))
            covered += int(model_proper)
            per_user_preds.setdefault(u, []).append((int(s), p, float(r)))

    per_user_rows: list[dict] = []
    ap_values: list[float] = []
    ndcg_values: list[float] = []
    for u in sorted(per_user_preds):
        triples = per_user_preds[u]
        ranked = sorted(triples, key=lambda t: (-t[1], t[0]))
        ranked_songs = [s for s, _, _ in ranked]
        relevant = {s for s, _, r in triples if r >= relevance_threshold}
        gains = [r for _, _, r in ranked]
        ap = average_precision_at_k(ranked_songs, relevant, k)
        nd = ndcg_at_k(gains, k)
        ap_values.append(ap)
        ndcg_values.append(nd)
        per_user_rows.append(
            {"user": matrix.users[u], "n_test": len(triples), "ap": ap, "ndcg": nd}
        )

    return EvaluationReport(
        algo=algo,
        strategy=spec.strategy.value,
        train_fraction=spec.train_fraction,
        seed=spec.seed,
        k=k,
        relevance_threshold=relevance_threshold,
        n_users=matrix.n_users,
        n_songs=matrix.n_songs,
        n_train_entries=train.n_entries,
        n_test_entries=test.n_entries,
        rmse=rmse(predicted, actual),
        map_at_k=sum(ap_values) / len(ap_values),
        mean_ndcg_at_k=sum(ndcg_values) / len(ndcg_values),
        coverage=covered / len(predicted),
        n_users_ranked=len(per_user_rows),
        per_user=per_user_rows,
    )
