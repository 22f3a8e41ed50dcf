"""Persistable bundle of everything the service needs to answer requests.

A snapshot holds the rating matrix, the collaborative-filtering setup with an
optional precomputed neighbor index, an optional factor model and attribute
mapper, the song catalog, and the curated playlists. It serializes to a small
binary container: magic, format version, then one JSON document. All floats
survive the round trip exactly (JSON uses shortest round-trip repr, and the
matrix ratings are float32 values whose float64 promotion is lossless).
"""

import dataclasses
import hashlib
import json
import logging
import struct
from dataclasses import dataclass, field

import numpy as np

from .cf import CFConfig, Neighbor, NeighborSet, neighbors
from .errors import (
    ConfigHashMismatchError,
    CorruptFileError,
    EmptyNeighborhoodError,
    VersionMismatchError,
)
from .explain import LatentMapper
from .ingest import SongAttributes
from .matrix import RatingMatrix
from .mf import FactorModel
from .selector import CuratedPlaylist

log = logging.getLogger(__name__)

MAGIC = b"XPLS"
FORMAT_VERSION = 1


def config_fingerprint(payload: dict) -> str:
    """Stable hash of a configuration mapping (canonical JSON, sha256)."""
    text = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


@dataclass
class ModelSnapshot:
    matrix: RatingMatrix
    cf_config: CFConfig
    catalog: dict
    playlists: dict = field(default_factory=dict)
    neighbor_index: dict | None = None
    factor_model: FactorModel | None = None
    mapper: LatentMapper | None = None
    build_config: dict = field(default_factory=dict)
    config_hash: str = ""
    built_at: str | None = None

    def __post_init__(self):
        if not self.config_hash:
            self.config_hash = config_fingerprint(self._config_payload())
        self.validate()

    def _config_payload(self) -> dict:
        return {
            "cf": dataclasses.asdict(self.cf_config),
            "build": self.build_config,
        }

    def validate(self) -> None:
        model = self.factor_model
        if model is not None:
            if model.users != self.matrix.users or model.songs != self.matrix.songs:
                raise ValueError("factor model index space differs from the matrix")
            if self.mapper is not None and self.mapper.n_dimensions != model.d:
                raise ValueError("mapper dimensionality differs from the factor model")
        elif self.mapper is not None:
            raise ValueError("mapper present without a factor model")
        if self.neighbor_index is not None:
            for u in self.neighbor_index:
                if not 0 <= u < self.matrix.n_users:
                    raise ValueError(f"neighbor index references unknown user row {u}")

    def neighbor_set(self, user: int) -> NeighborSet:
        """Precomputed neighborhood when available, else computed on demand."""
        if self.neighbor_index is not None and user in self.neighbor_index:
            return self.neighbor_index[user]
        return _neighbors_or_empty(self.matrix, user, self.cf_config)


def _neighbors_or_empty(matrix, user, config) -> NeighborSet:
    try:
        return neighbors(matrix, user, k=config.k, config=config)
    except EmptyNeighborhoodError:
        return NeighborSet(user, [])


def build_neighbor_index(matrix: RatingMatrix, config: CFConfig) -> dict:
    """All-users neighbor table; bounds per-request latency at serve time."""
    return {
        u: _neighbors_or_empty(matrix, u, config) for u in range(matrix.n_users)
    }


def build_snapshot(
    matrix: RatingMatrix,
    catalog: dict,
    cf_config: CFConfig | None = None,
    playlists: dict | None = None,
    factor_model: FactorModel | None = None,
    mapper: LatentMapper | None = None,
    precompute_neighbors: bool = True,
    build_config: dict | None = None,
    built_at: str | None = None,
) -> ModelSnapshot:
    config = cf_config or CFConfig()
    index = build_neighbor_index(matrix, config) if precompute_neighbors else None
    return ModelSnapshot(
        matrix=matrix,
        cf_config=config,
        catalog=dict(catalog),
        playlists=dict(playlists or {}),
        neighbor_index=index,
        factor_model=factor_model,
        mapper=mapper,
        build_config=dict(build_config or {}),
        built_at=built_at,
    )


# --- serialization ----------------------------------------------------------

def _song_row(song: SongAttributes) -> list:
    return [
        song.song_id, song.title, song.artist, song.genre,
        song.danceability, song.energy, song.instrumentalness,
        song.liveness, song.duration_minutes,
    ]


def _song_from_row(row) -> SongAttributes:
    return SongAttributes(
        song_id=row[0], title=row[1], artist=row[2], genre=row[3],
        danceability=row[4], energy=row[5], instrumentalness=row[6],
        liveness=row[7], duration_minutes=row[8],
    )


def _snapshot_payload(snapshot: ModelSnapshot) -> dict:
    m = snapshot.matrix
    payload = {
        "meta": {
            "config_hash": snapshot.config_hash,
            "built_at": snapshot.built_at,
        },
        "config": snapshot._config_payload(),
        "matrix": {
            "users": m.users,
            "songs": m.songs,
            "indptr": m.indptr.tolist(),
            "song_idx": m.song_idx.tolist(),
            "ratings": [float(r) for r in m.ratings],
        },
        "catalog": [_song_row(s) for s in snapshot.catalog.values()],
        "playlists": {
            name: [_song_row(s) for s in pl.songs]
            for name, pl in snapshot.playlists.items()
        },
        "neighbors": None,
        "mf": None,
        "mapper": None,
    }
    if snapshot.neighbor_index is not None:
        payload["neighbors"] = [
            [u, [[n.user, n.similarity, n.co_rated] for n in ns]]
            for u, ns in sorted(snapshot.neighbor_index.items())
        ]
    model = snapshot.factor_model
    if model is not None:
        payload["mf"] = {
            "d": model.d,
            "global_mean": model.global_mean,
            "user_factors": model.user_factors.tolist(),
            "item_factors": model.item_factors.tolist(),
            "training_log": list(model.training_log),
        }
    mapper = snapshot.mapper
    if mapper is not None:
        payload["mapper"] = {
            "attribute_names": list(mapper.attribute_names),
            "coefficients": mapper.coefficients.tolist(),
            "intercepts": mapper.intercepts.tolist(),
            "fit_r2": mapper.fit_r2.tolist(),
            "means": mapper.means.tolist(),
            "stds": mapper.stds.tolist(),
            "dropped": list(mapper.dropped),
        }
    return payload


def save_snapshot(snapshot: ModelSnapshot, path) -> None:
    body = json.dumps(_snapshot_payload(snapshot), sort_keys=True).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<H", FORMAT_VERSION))
        fh.write(struct.pack("<I", len(body)))
        fh.write(body)


def _parse_payload(payload: dict) -> ModelSnapshot:
    mx = payload["matrix"]
    matrix = RatingMatrix(
        users=list(mx["users"]),
        songs=list(mx["songs"]),
        indptr=np.asarray(mx["indptr"], dtype=np.int64),
        song_idx=np.asarray(mx["song_idx"], dtype=np.int32),
        ratings=np.asarray(mx["ratings"], dtype=np.float32),
    )
    cf_config = CFConfig(**payload["config"]["cf"])
    catalog = {}
    for row in payload["catalog"]:
        song = _song_from_row(row)
        catalog[song.song_id] = song
    playlists = {
        name: CuratedPlaylist(name, [_song_from_row(r) for r in rows])
        for name, rows in payload["playlists"].items()
    }
    index = None
    if payload["neighbors"] is not None:
        index = {
            int(u): NeighborSet(
                int(u),
                [Neighbor(int(n[0]), float(n[1]), int(n[2])) for n in rows],
            )
            for u, rows in payload["neighbors"]
        }
    model = None
    if payload["mf"] is not None:
        mf = payload["mf"]
        model = FactorModel(
            users=matrix.users,
            songs=matrix.songs,
            user_factors=np.asarray(mf["user_factors"], dtype=np.float64),
            item_factors=np.asarray(mf["item_factors"], dtype=np.float64),
            global_mean=float(mf["global_mean"]),
            d=int(mf["d"]),
            training_log=list(mf["training_log"]),
        )
    mapper = None
    if payload["mapper"] is not None:
        mp = payload["mapper"]
        mapper = LatentMapper(
            attribute_names=tuple(mp["attribute_names"]),
            coefficients=np.asarray(mp["coefficients"], dtype=np.float64),
            intercepts=np.asarray(mp["intercepts"], dtype=np.float64),
            fit_r2=np.asarray(mp["fit_r2"], dtype=np.float64),
            means=np.asarray(mp["means"], dtype=np.float64),
            stds=np.asarray(mp["stds"], dtype=np.float64),
            dropped=tuple(mp["dropped"]),
        )
    return ModelSnapshot(
        matrix=matrix,
        cf_config=cf_config,
        catalog=catalog,
        playlists=playlists,
        neighbor_index=index,
        factor_model=model,
        mapper=mapper,
        build_config=dict(payload["config"]["build"]),
        config_hash=payload["meta"]["config_hash"],
        built_at=payload["meta"]["built_at"],
    )


def load_snapshot(path, strict: bool = False) -> ModelSnapshot:
    """Read a snapshot container.

    With strict=True the configuration sections are re-hashed and compared
    against the recorded hash, refusing payloads whose config was edited
    after the build.
    """
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != MAGIC:
            raise VersionMismatchError(f"bad magic header {magic!r}, expected {MAGIC!r}")
        head = fh.read(6)
        if len(head) != 6:
            raise CorruptFileError("truncated snapshot header")
        version, length = struct.unpack("<HI", head)
        if version != FORMAT_VERSION:
            raise VersionMismatchError(
                f"unsupported snapshot format version {version}, "
                f"reader supports {FORMAT_VERSION}"
            )
        body = fh.read(length)
        if len(body) != length:
            raise CorruptFileError(
                f"truncated snapshot body: declared {length} bytes, got {len(body)}"
            )
        if fh.read(1):
            raise CorruptFileError("trailing bytes after snapshot payload")
    try:
        payload = json.loads(body.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CorruptFileError(f"snapshot payload is not valid JSON: {exc}") from exc
    try:
        snapshot = _parse_payload(payload)
    except (KeyError, TypeError, IndexError, ValueError) as exc:
        raise CorruptFileError(f"malformed snapshot payload: {exc}") from exc
    if strict:
        recorded = snapshot.config_hash
        actual = config_fingerprint(snapshot._config_payload())
        if recorded != actual:
            raise ConfigHashMismatchError(
                f"config hash {actual} does not match recorded {recorded}"
            )
    return snapshot
