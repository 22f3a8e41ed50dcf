"""Playlist assembly on top of the recommenders.

Three sources: "nostalgic" serves corpus songs straight from CF;
"best-of-2022" and "best-of-all-time" crosswalk the CF ranking onto a
curated playlist by content cosine, greedily and without reusing a curated
song. A mood filter runs last: entries whose attributes sit inside every
requested range keep their order, and leftover slots are filled by the
entries closest to the bounds, flagged relaxed so the UI can show them
differently.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace

from .cf import CFConfig, NeighborSet, recommend_cf
from .errors import UnknownSongError, ZeroVectorError
from .ingest import SongAttributes, UNIT_ATTRIBUTES, read_catalog
from .matrix import RatingMatrix

log = logging.getLogger(__name__)

SOURCE_NOSTALGIC = "nostalgic"
SOURCE_2022 = "best-of-2022"
SOURCE_ALL_TIME = "best-of-all-time"
SOURCES = (SOURCE_NOSTALGIC, SOURCE_2022, SOURCE_ALL_TIME)
CURATED_SOURCES = (SOURCE_2022, SOURCE_ALL_TIME)

# the mood filter picks n entries out of a pool this many times larger
POOL_FACTOR = 4

SOURCE_CORPUS = "CORPUS"
SOURCE_CROSSWALK = "CROSSWALK"


@dataclass(frozen=True)
class MoodFilter:
    danceability: tuple[float, float] | None = None
    energy: tuple[float, float] | None = None
    instrumentalness: tuple[float, float] | None = None
    liveness: tuple[float, float] | None = None
    duration_minutes: tuple[float, float] | None = None

    def __post_init__(self):
        for name, bounds in self.ranges().items():
            lo, hi = bounds
            if lo > hi:
                raise ValueError(f"{name} range has lo {lo} > hi {hi}")

    def ranges(self) -> dict[str, tuple[float, float]]:
        out = {}
        for name in UNIT_ATTRIBUTES + ("duration_minutes",):
            bounds = getattr(self, name)
            if bounds is not None:
                out[name] = (float(bounds[0]), float(bounds[1]))
        return out

    def is_empty(self) -> bool:
        return not self.ranges()

    def passes(self, song: SongAttributes) -> bool:
        return all(
            lo <= song.feature(name) <= hi
            for name, (lo, hi) in self.ranges().items()
        )

    def distance(self, song: SongAttributes) -> float:
        """Total distance to the nearest bound over all violated ranges."""
        total = 0.0
        for name, (lo, hi) in self.ranges().items():
            x = song.feature(name)
            if x < lo:
                total += lo - x
            elif x > hi:
                total += x - hi
        return total


@dataclass
class CuratedPlaylist:
    name: str
    songs: list[SongAttributes]

    def __post_init__(self):
        if not self.songs:
            raise ValueError(f"curated playlist {self.name!r} is empty")
        ids = [s.song_id for s in self.songs]
        if len(set(ids)) != len(ids):
            raise ValueError(f"curated playlist {self.name!r} repeats song ids")


def read_playlist(lines, name: str) -> CuratedPlaylist:
    """Curated playlist CSV (catalog schema), order-preserving."""
    return CuratedPlaylist(name, list(read_catalog(lines).values()))


@dataclass(frozen=True)
class PlaylistEntry:
    rank: int
    song_id: str
    title: str
    artist: str
    score: float
    source: str  # CORPUS or CROSSWALK
    provenance: str | None = None  # corpus song a crosswalk entry came from
    similarity: float | None = None  # content cosine for crosswalk entries
    relaxed: bool = False
    explanation_song: str | None = None

    def to_dict(self) -> dict:
        return {
            "rank": self.rank,
            "song": self.song_id,
            "title": self.title,
            "artist": self.artist,
            "score": self.score,
            "source": self.source,
            "provenance": self.provenance,
            "similarity": self.similarity,
            "relaxed": self.relaxed,
            "explanation_song": self.explanation_song,
        }


@dataclass
class RankedPlaylist:
    user: str
    source: str
    entries: list[PlaylistEntry] = field(default_factory=list)

    def validate(self) -> None:
        ranks = [e.rank for e in self.entries]
        if ranks != list(range(1, len(ranks) + 1)):
            raise ValueError(f"ranks not contiguous from 1: {ranks}")
        ids = [e.song_id for e in self.entries]
        if len(set(ids)) != len(ids):
            raise ValueError("playlist repeats a song id")

    def to_dict(self) -> dict:
        return {
            "user": self.user,
            "source": self.source,
            "entries": [e.to_dict() for e in self.entries],
        }


def attribute_vector(song: SongAttributes, max_duration: float) -> list[float]:
    return [song.feature(name) for name in UNIT_ATTRIBUTES] + [
        song.duration_minutes / max_duration
    ]


def catalog_max_duration(catalog: dict[str, SongAttributes]) -> float:
    return max(song.duration_minutes for song in catalog.values())


def content_cosine(a: SongAttributes, b: SongAttributes, max_duration: float) -> float:
    """Cosine over (danceability, energy, instrumentalness, liveness,
    duration/max_duration)."""
    va = attribute_vector(a, max_duration)
    vb = attribute_vector(b, max_duration)
    na = math.sqrt(sum(x * x for x in va))
    nb = math.sqrt(sum(x * x for x in vb))
    if na == 0.0 or nb == 0.0:
        raise ZeroVectorError(
            f"zero attribute vector for {a.song_id if na == 0.0 else b.song_id!r}"
        )
    return sum(x * y for x, y in zip(va, vb)) / (na * nb)


def crosswalk(
    recs: list[tuple[str, float]],
    playlist: CuratedPlaylist,
    n: int,
    catalog: dict[str, SongAttributes],
    max_duration: float | None = None,
) -> list[PlaylistEntry]:
    """Map corpus recommendations onto curated songs, greedy, no reuse.

    Walks recs in rank order; each takes the unused curated song with the
    highest content cosine (ties to the earlier playlist position). Entries
    keep the originating corpus score and record the cosine as similarity.
    """
    if not recs:
        raise ValueError("crosswalk needs at least one corpus recommendation")
    if max_duration is None:
        max_duration = catalog_max_duration(catalog)
    target = min(n, len(playlist.songs))
    if n > len(playlist.songs):
        log.warning(
            "requested %d entries but playlist %r holds %d; returning all",
            n, playlist.name, len(playlist.songs),
        )

    used: set[int] = set()
    entries: list[PlaylistEntry] = []
    for sid, score in recs:
        if len(entries) == target:
            break
        if sid not in catalog:
            raise UnknownSongError(f"recommended song {sid!r} not in the catalog")
        best_idx = -1
        best_cos = -2.0
        for idx, cand in enumerate(playlist.songs):
            if idx in used:
                continue
            cos = content_cosine(catalog[sid], cand, max_duration)
            if cos > best_cos:
                best_cos = cos
                best_idx = idx
        if best_idx < 0:
            break
        used.add(best_idx)
        chosen = playlist.songs[best_idx]
        entries.append(
            PlaylistEntry(
                rank=len(entries) + 1,
                song_id=chosen.song_id,
                title=chosen.title,
                artist=chosen.artist,
                score=score,
                source=SOURCE_CROSSWALK,
                provenance=sid,
                similarity=best_cos,
                explanation_song=sid,
            )
        )
    return entries


def mood_filter(
    entries: list[PlaylistEntry],
    mood: MoodFilter | None,
    n: int,
    attributes: dict[str, SongAttributes],
) -> list[PlaylistEntry]:
    """Keep in-range entries in order; fill the remainder by proximity.

    Relaxed fills are ordered by total distance to the violated bounds,
    then by original position. Output is re-ranked 1..len.
    """
    if mood is None:
        mood = MoodFilter()

    def lookup(entry: PlaylistEntry) -> SongAttributes:
        try:
            return attributes[entry.song_id]
        except KeyError:
            raise UnknownSongError(
                f"no attributes for playlist entry {entry.song_id!r}"
            ) from None

    if mood.is_empty():
        chosen = [(entry, False) for entry in entries[:n]]
    else:
        passing = []
        failing = []
        for pos, entry in enumerate(entries):
            song = lookup(entry)
            if mood.passes(song):
                passing.append(entry)
            else:
                failing.append((mood.distance(song), pos, entry))
        failing.sort(key=lambda t: (t[0], t[1]))
        chosen = [(entry, False) for entry in passing[:n]]
        for _, _, entry in failing[: max(0, n - len(chosen))]:
            chosen.append((entry, True))

    return [
        replace(entry, rank=i + 1, relaxed=relaxed)
        for i, (entry, relaxed) in enumerate(chosen)
    ]


def assemble(
    matrix: RatingMatrix,
    catalog: dict[str, SongAttributes],
    user_id: str,
    source: str,
    n: int,
    mood: MoodFilter | None = None,
    curated: dict[str, CuratedPlaylist] | None = None,
    cf_config: CFConfig | None = None,
    neighbor_set: NeighborSet | None = None,
) -> RankedPlaylist:
    """CF ranking -> (optional crosswalk) -> mood filter -> RankedPlaylist."""
    if source not in SOURCES:
        raise ValueError(f"unknown source {source!r}, expected one of {SOURCES}")
    if n < 1:
        raise ValueError("n must be >= 1")
    u = matrix.user_index(user_id)
    recs = recommend_cf(
        matrix, u, matrix.n_songs, config=cf_config, neighbor_set=neighbor_set
    )
    rec_ids = [(matrix.songs[s], score) for s, score in recs]

    if source == SOURCE_NOSTALGIC:
        pool = []
        for i, (sid, score) in enumerate(rec_ids):
            song = catalog.get(sid)
            pool.append(
                PlaylistEntry(
                    rank=i + 1,
                    song_id=sid,
                    title=song.title if song else sid,
                    artist=song.artist if song else "",
                    score=score,
                    source=SOURCE_CORPUS,
                    explanation_song=sid,
                )
            )
        attributes = catalog
    else:
        if not curated or source not in curated:
            raise ValueError(f"no curated playlist configured for {source!r}")
        playlist = curated[source]
        pool_target = min(len(playlist.songs), max(POOL_FACTOR * n, n))
        # an isolated user yields no ranking at all; serve an empty playlist
        pool = crosswalk(rec_ids, playlist, pool_target, catalog) if rec_ids else []
        attributes = dict(catalog)
        attributes.update({s.song_id: s for s in playlist.songs})

    result = RankedPlaylist(
        user=user_id, source=source, entries=mood_filter(pool, mood, n, attributes)
    )
    result.validate()
    return result
