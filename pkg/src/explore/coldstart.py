"""Onboarding for users absent from the training corpus.

Seed songs drive a genre-affinity profile; each seed genre contributes its
most-listened corpus songs as representatives, which receive pseudo-ratings
proportional to the genre weight. Seeds that name a corpus song directly
(in_corpus_song_id) are rated 5.0 without going through representatives.
The synthesized row is appended under a "coldstart:" user id so evaluation
splits can keep it out of test sets.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass

from .errors import EmptyInputError, NoRepresentativesError
from .ingest import (
    ATTRIBUTE_NAMES,
    SongAttributes,
    check_catalog_header,
    parse_attribute_row,
)
from .matrix import RATING_MAX, SYNTHETIC_PREFIX, RatingMatrix

log = logging.getLogger(__name__)

DEFAULT_REPRESENTATIVES = 10
MATCH_COLUMN = "in_corpus_song_id"


@dataclass(frozen=True)
class Seed:
    attributes: SongAttributes
    in_corpus_song_id: str | None = None


@dataclass
class SeedProfile:
    external_user_id: str
    seeds: list[Seed]

    def __post_init__(self):
        if not self.seeds:
            raise EmptyInputError("a seed profile needs at least one song")


@dataclass
class GenreAffinity:
    weights: dict[str, float]

    def items(self):
        return self.weights.items()

    def __getitem__(self, genre: str) -> float:
        return self.weights[genre]

    def __contains__(self, genre: str) -> bool:
        return genre in self.weights


def read_seed_profile(lines, external_user_id: str) -> SeedProfile:
    """Seed CSV: catalog schema plus an optional in_corpus_song_id column.

    Duplicate song rows are allowed; a seed list is a bag, not a set.
    """
    reader = csv.DictReader(lines)
    check_catalog_header(reader.fieldnames, what="seed file")
    has_match = MATCH_COLUMN in (reader.fieldnames or ())
    seeds: list[Seed] = []
    for row_no, row in enumerate(reader, start=2):
        attrs = parse_attribute_row(row, row_no)
        match = (row.get(MATCH_COLUMN) or "").strip() if has_match else ""
        seeds.append(Seed(attrs, match or None))
    if not seeds:
        raise EmptyInputError("seed file contains no songs")
    return SeedProfile(external_user_id, seeds)


def genre_affinity(profile: SeedProfile) -> GenreAffinity:
    """weight(genre) = seed count of that genre / total seeds."""
    counts: dict[str, int] = {}
    for seed in profile.seeds:
        genre = seed.attributes.genre or "unknown"
        counts[genre] = counts.get(genre, 0) + 1
    total = len(profile.seeds)
    return GenreAffinity({g: c / total for g, c in sorted(counts.items())})


def representative_songs(
    matrix: RatingMatrix,
    catalog: dict[str, SongAttributes],
    genre: str,
    m: int = DEFAULT_REPRESENTATIVES,
) -> list[str]:
    """Top-m corpus songs of a genre.

    Ranked by listener count, then distance to the genre's mean attribute
    vector, then matrix index. A genre absent from the corpus yields an
    empty list with a warning (cold start degrades, it does not fail here).
    """
    members = [
        (idx, catalog[sid])
        for idx, sid in enumerate(matrix.songs)
        if sid in catalog and catalog[sid].genre == genre
    ]
    if not members:
        log.warning("no corpus song carries genre %r; skipping", genre)
        return []

    centroid = [
        sum(song.feature(name) for _, song in members) / len(members)
        for name in ATTRIBUTE_NAMES
    ]
    listeners = matrix.listener_counts()

    def distance(song: SongAttributes) -> float:
        return math.sqrt(
            sum(
                (song.feature(name) - c) ** 2
                for name, c in zip(ATTRIBUTE_NAMES, centroid)
            )
        )

    ranked = sorted(
        members, key=lambda t: (-int(listeners[t[0]]), distance(t[1]), t[0])
    )
    return [song.song_id for _, song in ranked[:m]]


def synthesize_user_row(
    affinity: GenreAffinity,
    representatives: dict[str, list[str]],
    matrix: RatingMatrix,
    external_user_id: str,
    matched_song_ids: list[str] | None = None,
) -> tuple[RatingMatrix, str]:
    """Append a pseudo-rating row for the new user.

    Representatives of genre g get 1 + 4 * weight(g) / max_weight; a song
    claimed by several genres keeps the highest value. Directly matched
    corpus songs get 5.0. Raises NoRepresentativesError when the row would
    be empty.
    """
    ratings: dict[int, float] = {}
    max_weight = max(affinity.weights.values(), default=0.0)
    if max_weight > 0.0:
        for genre, weight in affinity.items():
            value = 1.0 + 4.0 * (weight / max_weight)
            for sid in representatives.get(genre, []):
                if not matrix.has_song(sid):
                    continue
                idx = matrix.song_index(sid)
                ratings[idx] = max(ratings.get(idx, 0.0), value)
    for sid in matched_song_ids or []:
        if matrix.has_song(sid):
            ratings[matrix.song_index(sid)] = RATING_MAX

    if not ratings:
        raise NoRepresentativesError(
            f"no corpus song could seed user {external_user_id!r}; "
            "no seed genre is represented and no seed matches a corpus song"
        )
    user_id = SYNTHETIC_PREFIX + external_user_id
    return matrix.with_user(user_id, ratings), user_id


def onboard(
    matrix: RatingMatrix,
    catalog: dict[str, SongAttributes],
    profile: SeedProfile,
    m: int = DEFAULT_REPRESENTATIVES,
) -> tuple[RatingMatrix, str, GenreAffinity, dict[str, list[str]]]:
    """Full cold-start path: affinity, representatives, synthesized row."""
    affinity = genre_affinity(profile)
    representatives = {
        genre: representative_songs(matrix, catalog, genre, m) for genre in affinity.weights
    }
    matched = sorted(
        {
            seed.in_corpus_song_id
            for seed in profile.seeds
            if seed.in_corpus_song_id and matrix.has_song(seed.in_corpus_song_id)
        }
    )
    new_matrix, user_id = synthesize_user_row(
        affinity, representatives, matrix, profile.external_user_id, matched
    )
    return new_matrix, user_id, affinity, representatives
