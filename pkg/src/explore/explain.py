"""Explanations for served recommendations.

Two kinds. FEATURE maps the latent dimension that contributes most to a
prediction onto interpretable song attributes via per-dimension ridge
regressions. NEIGHBOR exposes which similar users drove a collaborative
pick, plus a small graph payload for visualization.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .cf import NeighborSet
from .errors import (
    DegenerateDesignError,
    NoRatingSupportError,
    UnknownSongError,
    UnknownUserError,
)
from .ingest import ATTRIBUTE_NAMES, SongAttributes
from .matrix import RatingMatrix
from .mf import FactorModel

log = logging.getLogger(__name__)

RIDGE_PENALTY = 1e-3


@dataclass
class LatentMapper:
    """Per-latent-dimension linear maps from standardized song attributes.

    coefficients[j] regresses item_factors[:, j] on the kept attributes;
    intercepts[j] is the dimension mean. Constant attribute columns are
    dropped at fit time and listed in `dropped`.
    """

    attribute_names: tuple
    coefficients: np.ndarray
    intercepts: np.ndarray
    fit_r2: np.ndarray
    means: np.ndarray
    stds: np.ndarray
    dropped: tuple = ()

    @property
    def n_dimensions(self) -> int:
        return self.coefficients.shape[0]

    def importances(self, dimension: int) -> list[tuple[str, float]]:
        """(attribute, signed coefficient) sorted by magnitude descending."""
        row = self.coefficients[dimension]
        order = sorted(
            range(len(self.attribute_names)), key=lambda i: (-abs(row[i]), i)
        )
        return [(self.attribute_names[i], float(row[i])) for i in order]


def fit_latent_mappers(
    item_factors: np.ndarray,
    songs: list[str],
    catalog: dict[str, SongAttributes],
    ridge: float = RIDGE_PENALTY,
) -> LatentMapper:
    """Closed-form ridge fit of every latent dimension at once.

    Attributes are standardized so coefficients are comparable across
    units. Raises DegenerateDesignError when no attribute varies at all.
    """
    if len(songs) != item_factors.shape[0]:
        raise ValueError("songs and item_factors disagree on row count")
    if len(songs) < len(ATTRIBUTE_NAMES) + 1:
        raise ValueError(
            f"need at least {len(ATTRIBUTE_NAMES) + 1} songs to fit, "
            f"got {len(songs)}"
        )
    for sid in songs:
        if sid not in catalog:
            raise UnknownSongError(f"song {sid!r} missing from the catalog")

    X = np.array(
        [[catalog[sid].feature(name) for name in ATTRIBUTE_NAMES] for sid in songs]
    )
    means = X.mean(axis=0)
    stds = X.std(axis=0)
    keep = stds > 0.0
    dropped = tuple(n for n, k in zip(ATTRIBUTE_NAMES, keep) if not k)
    if dropped:
        log.warning("dropping constant attribute columns: %s", ", ".join(dropped))
    if not keep.any():
        raise DegenerateDesignError("every attribute column is constant")

    kept_names = tuple(n for n, k in zip(ATTRIBUTE_NAMES, keep) if k)
    Z = (X[:, keep] - means[keep]) / stds[keep]
    Y = np.asarray(item_factors, dtype=np.float64)
    intercepts = Y.mean(axis=0)
    Yc = Y - intercepts

    A = Z.T @ Z + ridge * np.eye(Z.shape[1])
    W = np.linalg.solve(A, Z.T @ Yc)  # kept_attrs x d

    residual = Yc - Z @ W
    ss_res = (residual ** 2).sum(axis=0)
    ss_tot = (Yc ** 2).sum(axis=0)
    with np.errstate(invalid="ignore", divide="ignore"):
        r2 = np.where(ss_tot > 0.0, 1.0 - ss_res / ss_tot, 0.0)

    return LatentMapper(
        attribute_names=kept_names,
        coefficients=W.T.copy(),
        intercepts=intercepts,
        fit_r2=r2,
        means=means[keep],
        stds=stds[keep],
        dropped=dropped,
    )


@dataclass(frozen=True)
class AttributeImportance:
    name: str
    importance: float


@dataclass(frozen=True)
class NeighborContribution:
    user: str
    similarity: float
    rating: float


@dataclass
class Explanation:
    song_id: str
    kind: str  # "FEATURE" or "NEIGHBOR"
    latent_dimension: int | None = None
    contribution: float | None = None
    attributes: list[AttributeImportance] = field(default_factory=list)
    neighbors: list[NeighborContribution] = field(default_factory=list)

    def to_dict(self) -> dict:
        out = {"song": self.song_id, "kind": self.kind}
        if self.kind == "FEATURE":
            out["latent_dimension"] = self.latent_dimension
            out["contribution"] = self.contribution
            out["attributes"] = [
                {"name": a.name, "importance": a.importance} for a in self.attributes
            ]
        else:
            out["neighbors"] = [
                {"user": c.user, "similarity": c.similarity, "rating": c.rating}
                for c in self.neighbors
            ]
        return out


def top_latent_dimension(model: FactorModel, user: int, song: int) -> tuple[int, float]:
    """Dimension with the largest elementwise product p_u[d] * q_i[d]."""
    if not 0 <= user < model.n_users:
        raise UnknownUserError(f"user index {user} out of range")
    if not 0 <= song < model.n_songs:
        raise UnknownSongError(f"song index {song} out of range")
    products = model.user_factors[user] * model.item_factors[song]
    d_star = int(np.argmax(products))  # first hit wins ties, lowest index
    return d_star, float(products[d_star])


def explain_recommendation_feature(
    model: FactorModel,
    mapper: LatentMapper,
    user: int,
    song: int,
    top_m: int = 3,
) -> Explanation:
    """FEATURE explanation: attributes behind the dominant latent dimension."""
    if top_m < 1:
        raise ValueError("top_m must be >= 1")
    if mapper.n_dimensions != model.d:
        raise ValueError(
            f"mapper fitted for {mapper.n_dimensions} dimensions, model has {model.d}"
        )
    d_star, contribution = top_latent_dimension(model, user, song)
    ranked = mapper.importances(d_star)[:top_m]
    return Explanation(
        song_id=model.songs[song],
        kind="FEATURE",
        latent_dimension=d_star,
        contribution=contribution,
        attributes=[AttributeImportance(n, w) for n, w in ranked],
    )


def explain_recommendation_neighbor(
    matrix: RatingMatrix, neighbor_set: NeighborSet, song: int
) -> Explanation:
    """NEIGHBOR explanation: the neighbors whose ratings back one pick."""
    contributions = []
    for nb in neighbor_set:
        r = matrix.rating(nb.user, song)
        if r is None:
            continue
        contributions.append(
            NeighborContribution(matrix.users[nb.user], nb.similarity, r)
        )
    if not contributions:
        raise NoRatingSupportError(
            f"no neighbor rated song index {song}; nothing to explain"
        )
    return Explanation(
        song_id=matrix.songs[song], kind="NEIGHBOR", neighbors=contributions
    )


def neighbor_graph(
    matrix: RatingMatrix,
    neighbor_set: NeighborSet,
    recommended: list[int],
    catalog: dict[str, SongAttributes] | None = None,
) -> dict:
    """Graph payload for the dashboard: {nodes: [...], edges: [...]}.

    Node ids are prefixed "user:" / "song:" so the two id spaces cannot
    collide. Every neighbor appears as a node; song edges exist only where
    that neighbor actually rated a recommended song.
    """
    target = neighbor_set.user
    nodes = [
        {"id": f"user:{matrix.users[target]}", "kind": "user",
         "label": matrix.users[target]}
    ]
    edges = []
    for nb in neighbor_set:
        uid = matrix.users[nb.user]
        nodes.append({"id": f"user:{uid}", "kind": "neighbor", "label": uid})
        edges.append(
            {
                "src": f"user:{matrix.users[target]}",
                "dst": f"user:{uid}",
                "weight": nb.similarity,
                "kind": "similarity",
            }
        )
    for s in recommended:
        sid = matrix.songs[s]
        label = sid
        if catalog is not None and sid in catalog:
            label = catalog[sid].title
        nodes.append({"id": f"song:{sid}", "kind": "song", "label": label})
    for nb in neighbor_set:
        for s in recommended:
            r = matrix.rating(nb.user, s)
            if r is None:
                continue
            edges.append(
                {
                    "src": f"user:{matrix.users[nb.user]}",
                    "dst": f"song:{matrix.songs[s]}",
                    "weight": r,
                    "kind": "rating",
                }
            )
    return {"nodes": nodes, "edges": edges}
