"""Latent-factor model trained by SGD over observed ratings.

The loss per observation is (r - mu - p.q)^2 + lam*(|p|^2 + |q|^2) and the
update sweeps observations in a fixed order, so training is deterministic
for a given seed. A numba-compiled kernel runs when available; the plain
Python loop performs the identical arithmetic in the identical order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DivergenceDetectedError,
    EmptyInputError,
    UnknownSongError,
    UnknownUserError,
)
from .matrix import RATING_MAX, RATING_MIN, RatingMatrix

DEFAULT_DIM = 32
DEFAULT_EPOCHS = 50
DEFAULT_LEARNING_RATE = 0.005
DEFAULT_REGULARIZATION = 0.02
INIT_SCALE = 0.05


@dataclass
class FactorModel:
    users: list[str]
    songs: list[str]
    user_factors: np.ndarray
    item_factors: np.ndarray
    global_mean: float
    d: int
    training_log: list[float] = field(default_factory=list)

    @property
    def n_users(self) -> int:
        return len(self.users)

    @property
    def n_songs(self) -> int:
        return len(self.songs)


def _sgd_epoch(P, Q, obs_u, obs_s, obs_r, mu, lr, lam):
    d = P.shape[1]
    for idx in range(obs_u.shape[0]):
        u = obs_u[idx]
        s = obs_s[idx]
        dot = 0.0
        for f in range(d):
            dot += P[u, f] * Q[s, f]
        err = obs_r[idx] - mu - dot
        for f in range(d):
            pu = P[u, f]
            qs = Q[s, f]
            P[u, f] = pu + lr * (err * qs - lam * pu)
            Q[s, f] = qs + lr * (err * pu - lam * qs)


try:
    import numba

    _sgd_epoch_compiled = numba.njit(cache=True)(_sgd_epoch)
except Exception:  # pragma: no cover - exercised only without numba
    _sgd_epoch_compiled = _sgd_epoch


def _epoch_rmse(P, Q, obs_u, obs_s, obs_r, mu) -> float:
    with np.errstate(all="ignore"):
        pred = mu + np.einsum("ij,ij->i", P[obs_u], Q[obs_s])
        return float(np.sqrt(np.mean((obs_r - pred) ** 2)))


def train_mf(
    matrix: RatingMatrix,
    d: int = DEFAULT_DIM,
    epochs: int = DEFAULT_EPOCHS,
    learning_rate: float = DEFAULT_LEARNING_RATE,
    regularization: float = DEFAULT_REGULARIZATION,
    seed: int = 42,
) -> FactorModel:
    """Fit user/item factors on the observed entries of the matrix.

    Raises DivergenceDetectedError as soon as the train RMSE after an epoch
    stops being finite.
    """
    if matrix.n_entries == 0:
        raise EmptyInputError("cannot train on an empty rating matrix")
    if d < 1 or epochs < 1:
        raise ValueError("d and epochs must be >= 1")
    if learning_rate <= 0 or regularization < 0:
        raise ValueError("learning_rate must be > 0 and regularization >= 0")

    obs_u = np.empty(matrix.n_entries, dtype=np.int64)
    obs_s = matrix.song_idx.astype(np.int64)
    obs_r = matrix.ratings.astype(np.float64)
    for u in range(matrix.n_users):
        obs_u[matrix.indptr[u]:matrix.indptr[u + 1]] = u
    mu = float(obs_r.mean())

    rng = np.random.default_rng(seed)
    P = rng.uniform(-INIT_SCALE, INIT_SCALE, size=(matrix.n_users, d))
    Q = rng.uniform(-INIT_SCALE, INIT_SCALE, size=(matrix.n_songs, d))

    log: list[float] = []
    for epoch in range(1, epochs + 1):
        _sgd_epoch_compiled(
            P, Q, obs_u, obs_s, obs_r, mu, learning_rate, regularization
        )
        epoch_rmse = _epoch_rmse(P, Q, obs_u, obs_s, obs_r, mu)
        if not math.isfinite(epoch_rmse):
            raise DivergenceDetectedError(epoch, epoch_rmse)
        log.append(epoch_rmse)

    return FactorModel(
        users=list(matrix.users),
        songs=list(matrix.songs),
        user_factors=P,
        item_factors=Q,
        global_mean=mu,
        d=d,
        training_log=log,
    )


def _check_indices(model: FactorModel, user: int, song: int):
    if not 0 <= user < model.n_users:
        raise UnknownUserError(f"user index {user} out of range")
    if not 0 <= song < model.n_songs:
        raise UnknownSongError(f"song index {song} out of range")


def predict_mf(model: FactorModel, user: int, song: int) -> float:
    """global_mean + p_u . q_i, clamped to the rating range."""
    _check_indices(model, user, song)
    raw = model.global_mean + float(
        np.dot(model.user_factors[user], model.item_factors[song])
    )
    return max(RATING_MIN, min(RATING_MAX, raw))


def user_song_cosine(model: FactorModel, user: int, song: int) -> float | None:
    """Cosine between p_u and q_i; None when either vector has zero norm."""
    _check_indices(model, user, song)
    p = model.user_factors[user]
    q = model.item_factors[song]
    np_ = float(np.linalg.norm(p))
    nq = float(np.linalg.norm(q))
    if np_ == 0.0 or nq == 0.0:
        return None
    return float(np.dot(p, q)) / (np_ * nq)


def recommend_mf(
    model: FactorModel,
    matrix: RatingMatrix,
    user: int,
    n: int,
    exclude_rated: bool = True,
    by: str = "cosine",
) -> list[tuple[int, float]]:
    """Top-n (song index, score), score descending then index ascending.

    by="cosine" ranks candidates by latent cosine; songs with a zero item
    vector cannot be angled and trail the list in index order with score 0.
    A user with an all-zero factor vector falls back to rating ranking.
    """
    if not 0 <= user < model.n_users:
        raise UnknownUserError(f"user index {user} out of range")
    if by not in ("cosine", "rating"):
        raise ValueError(f"unknown ranking mode {by!r}")

    rated = set(int(s) for s in matrix.row(user)[0]) if exclude_rated else set()
    candidates = [s for s in range(model.n_songs) if s not in rated]

    if by == "cosine" and float(np.linalg.norm(model.user_factors[user])) == 0.0:
        by = "rating"

    if by == "rating":
        scored = [(s, predict_mf(model, user, s)) for s in candidates]
        scored.sort(key=lambda t: (-t[1], t[0]))
        return scored[:n]

    angled: list[tuple[int, float]] = []
    flat: list[tuple[int, float]] = []
    for s in candidates:
        cos = user_song_cosine(model, user, s)
        if cos is None:
            flat.append((s, 0.0))
        else:
            angled.append((s, cos))
    angled.sort(key=lambda t: (-t[1], t[0]))
    return (angled + flat)[:n]


# --- full-batch loss and gradient, used to cross-check the SGD updates ------

def regularized_loss(P, Q, mu, obs_u, obs_s, obs_r, lam) -> float:
    """Sum over observations of (r - mu - p.q)^2 + lam*(|p|^2 + |q|^2)."""
    total = 0.0
    for u, s, r in zip(obs_u, obs_s, obs_r):
        err = r - mu - float(np.dot(P[u], Q[s]))
        total += err * err
        total += lam * (float(np.dot(P[u], P[u])) + float(np.dot(Q[s], Q[s])))
    return total


def loss_gradient(P, Q, mu, obs_u, obs_s, obs_r, lam):
    """Analytic gradient of regularized_loss with respect to P and Q."""
    dP = np.zeros_like(P)
    dQ = np.zeros_like(Q)
    for u, s, r in zip(obs_u, obs_s, obs_r):
        err = r - mu - float(np.dot(P[u], Q[s]))
        dP[u] += -2.0 * err * Q[s] + 2.0 * lam * P[u]
        dQ[s] += -2.0 * err * P[u] + 2.0 * lam * Q[s]
    return dP, dQ
