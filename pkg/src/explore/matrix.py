"""Sparse user-song rating matrix and its binary file format.

The matrix is stored CSR-style: one index/value pair per observed rating,
rows sorted by song index. Ratings live in [1, 5] and are kept as float32
so that the on-disk representation round-trips bit-exactly.

File layout (little-endian throughout):

    magic  b"XPLM"
    u16    format version (currently 1)
    u32    n_users
    u32    n_songs
    u64    n_entries
    id table: n_users x (u16 byte length, UTF-8 bytes)
    id table: n_songs x (u16 byte length, UTF-8 bytes)
    rows:  per user, u32 entry count then (u32 song index, f32 rating)
           pairs sorted by song index
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import CorruptFileError, UnknownSongError, UnknownUserError, VersionMismatchError

MAGIC = b"XPLM"
FORMAT_VERSION = 1

RATING_MIN = 1.0
RATING_MAX = 5.0

# user-id prefix marking synthesized cold-start rows; such users are served
# normally but never enter evaluation test splits
SYNTHETIC_PREFIX = "coldstart:"


@dataclass
class RatingMatrix:
    """Immutable sparse matrix of 1-5 ratings with per-user means."""

    users: list[str]
    songs: list[str]
    indptr: np.ndarray    # int64, len n_users + 1
    song_idx: np.ndarray  # int32, sorted within each row
    ratings: np.ndarray   # float32, each in [1, 5]
    user_means: np.ndarray = field(default=None)  # float64, 0.0 for empty rows

    def __post_init__(self):
        self.indptr = np.asarray(self.indptr, dtype=np.int64)
        self.song_idx = np.asarray(self.song_idx, dtype=np.int32)
        self.ratings = np.asarray(self.ratings, dtype=np.float32)
        if self.user_means is None:
            self.user_means = self._compute_means()
        else:
            self.user_means = np.asarray(self.user_means, dtype=np.float64)
        self._user_index = {u: i for i, u in enumerate(self.users)}
        self._song_index = {s: i for i, s in enumerate(self.songs)}
        self.validate()

    # --- construction -----------------------------------------------------

    @classmethod
    def from_entries(
        cls,
        users: Sequence[str],
        songs: Sequence[str],
        entries: Iterable[tuple[int, int, float]],
    ) -> "RatingMatrix":
        """Build from (user index, song index, rating) triples in any order."""
        users = list(users)
        songs = list(songs)
        triples = sorted(entries, key=lambda t: (t[0], t[1]))
        indptr = np.zeros(len(users) + 1, dtype=np.int64)
        sidx = np.empty(len(triples), dtype=np.int32)
        vals = np.empty(len(triples), dtype=np.float32)
        for pos, (u, s, r) in enumerate(triples):
            indptr[u + 1] += 1
            sidx[pos] = s
            vals[pos] = r
        np.cumsum(indptr, out=indptr)
        return cls(users, songs, indptr, sidx, vals)

    def _compute_means(self) -> np.ndarray:
        means = np.zeros(len(self.users), dtype=np.float64)
        vals = self.ratings.astype(np.float64)
        for u in range(len(self.users)):
            lo, hi = self.indptr[u], self.indptr[u + 1]
            if hi > lo:
                means[u] = vals[lo:hi].mean()
        return means

    def validate(self) -> None:
        if self.indptr.shape != (len(self.users) + 1,):
            raise ValueError("indptr length does not match user count")
        if self.indptr[0] != 0 or self.indptr[-1] != len(self.ratings):
            raise ValueError("indptr does not span the entry arrays")
        if len(self.song_idx) != len(self.ratings):
            raise ValueError("song_idx / ratings length mismatch")
        if len(self.ratings) and (
            self.ratings.min() < RATING_MIN or self.ratings.max() > RATING_MAX
        ):
            raise ValueError("rating outside [1, 5]")
        for u in range(len(self.users)):
            row = self.song_idx[self.indptr[u]: self.indptr[u + 1]]
            if len(row) > 1 and np.any(np.diff(row) <= 0):
                raise ValueError(f"row {u} not strictly sorted by song index")
        if len(self.song_idx) and (
            self.song_idx.min() < 0 or self.song_idx.max() >= len(self.songs)
        ):
            raise ValueError("song index out of range")

    # --- access -----------------------------------------------------------

    @property
    def n_users(self) -> int:
        return len(self.users)

    @property
    def n_songs(self) -> int:
        return len(self.songs)

    @property
    def n_entries(self) -> int:
        return len(self.ratings)

    def user_index(self, user_id: str) -> int:
        try:
            return self._user_index[user_id]
        except KeyError:
            raise UnknownUserError(f"unknown user {user_id!r}") from None

    def song_index(self, song_id: str) -> int:
        try:
            return self._song_index[song_id]
        except KeyError:
            raise UnknownSongError(f"unknown song {song_id!r}") from None

    def has_user(self, user_id: str) -> bool:
        return user_id in self._user_index

    def has_song(self, song_id: str) -> bool:
        return song_id in self._song_index

    def row(self, u: int) -> tuple[np.ndarray, np.ndarray]:
        """Song indices and ratings of user u, sorted by song index."""
        lo, hi = self.indptr[u], self.indptr[u + 1]
        return self.song_idx[lo:hi], self.ratings[lo:hi]

    def row_dict(self, u: int) -> dict[int, float]:
        sids, vals = self.row(u)
        return {int(s): float(v) for s, v in zip(sids, vals)}

    def rating(self, u: int, s: int) -> float | None:
        sids, vals = self.row(u)
        pos = np.searchsorted(sids, s)
        if pos < len(sids) and sids[pos] == s:
            return float(vals[pos])
        return None

    def listener_counts(self) -> np.ndarray:
        """Number of users with an entry for each song."""
        counts = np.zeros(self.n_songs, dtype=np.int64)
        np.add.at(counts, self.song_idx, 1)
        return counts

    def entries(self) -> Iterable[tuple[int, int, float]]:
        for u in range(self.n_users):
            for s, r in zip(*self.row(u)):
                yield u, int(s), float(r)

    def is_synthetic(self, u: int) -> bool:
        return self.users[u].startswith(SYNTHETIC_PREFIX)

    def with_user(self, user_id: str, entries: dict[int, float]) -> "RatingMatrix":
        """New matrix with one appended user row (song index -> rating)."""
        if user_id in self._user_index:
            raise ValueError(f"user {user_id!r} already present")
        triples = [(u, int(s), float(r)) for u, s, r in self.entries()]
        new_u = self.n_users
        triples.extend((new_u, s, r) for s, r in sorted(entries.items()))
        return RatingMatrix.from_entries(self.users + [user_id], self.songs, triples)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RatingMatrix):
            return NotImplemented
        return (
            self.users == other.users
            and self.songs == other.songs
            and np.array_equal(self.indptr, other.indptr)
            and np.array_equal(self.song_idx, other.song_idx)
            and np.array_equal(self.ratings, other.ratings)
        )


# --- binary round-trip ------------------------------------------------------

def _write_id_table(fh, ids: list[str]) -> None:
    for token in ids:
        raw = token.encode("utf-8")
        if len(raw) > 0xFFFF:
            raise ValueError(f"id too long to serialize: {token[:32]!r}...")
        fh.write(struct.pack("<H", len(raw)))
        fh.write(raw)


def _read_exact(fh, n: int) -> bytes:
    buf = fh.read(n)
    if len(buf) != n:
        raise CorruptFileError(f"unexpected end of file (wanted {n} bytes, got {len(buf)})")
    return buf


def _read_id_table(fh, count: int) -> list[str]:
    out = []
    for _ in range(count):
        (length,) = struct.unpack("<H", _read_exact(fh, 2))
        out.append(_read_exact(fh, length).decode("utf-8"))
    return out


def write_matrix(matrix: RatingMatrix, path) -> None:
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<H", FORMAT_VERSION))
        fh.write(struct.pack("<IIQ", matrix.n_users, matrix.n_songs, matrix.n_entries))
        _write_id_table(fh, matrix.users)
        _write_id_table(fh, matrix.songs)
        for u in range(matrix.n_users):
            sids, vals = matrix.row(u)
            fh.write(struct.pack("<I", len(sids)))
            for s, r in zip(sids, vals):
                fh.write(struct.pack("<If", int(s), float(r)))


def read_matrix(path) -> RatingMatrix:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != MAGIC:
            raise VersionMismatchError(f"bad magic header {magic!r}, expected {MAGIC!r}")
        (version,) = struct.unpack("<H", _read_exact(fh, 2))
        if version != FORMAT_VERSION:
            raise VersionMismatchError(
                f"unsupported matrix format version {version}, reader supports {FORMAT_VERSION}"
            )
        n_users, n_songs, n_entries = struct.unpack("<IIQ", _read_exact(fh, 16))
        users = _read_id_table(fh, n_users)
        songs = _read_id_table(fh, n_songs)
        indptr = np.zeros(n_users + 1, dtype=np.int64)
        sidx = np.empty(n_entries, dtype=np.int32)
        vals = np.empty(n_entries, dtype=np.float32)
        pos = 0
        for u in range(n_users):
            (count,) = struct.unpack("<I", _read_exact(fh, 4))
            if pos + count > n_entries:
                raise CorruptFileError("row counts exceed declared entry total")
            for _ in range(count):
                s, r = struct.unpack("<If", _read_exact(fh, 8))
                sidx[pos] = s
                vals[pos] = r
                pos += 1
            indptr[u + 1] = pos
        if pos != n_entries:
            raise CorruptFileError(
                f"entry total mismatch: declared {n_entries}, read {pos}"
            )
        if fh.read(1):
            raise CorruptFileError("trailing bytes after matrix payload")
    try:
        return RatingMatrix(users, songs, indptr, sidx, vals)
    except ValueError as exc:
        raise CorruptFileError(f"invalid matrix payload: {exc}") from exc
