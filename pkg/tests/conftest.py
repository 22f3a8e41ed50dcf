import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from explore.ingest import SongAttributes
from explore.matrix import RatingMatrix


def make_matrix(rows, users=None, songs=None):
    """Build a RatingMatrix from a list of {song_index: rating} dicts."""
    n_songs = max((max(r) for r in rows if r), default=-1) + 1
    if songs is None:
        songs = [f"s{i}" for i in range(n_songs)]
    if users is None:
        users = [f"u{i}" for i in range(len(rows))]
    triples = [
        (u, s, r) for u, row in enumerate(rows) for s, r in sorted(row.items())
    ]
    return RatingMatrix.from_entries(users, songs, triples)


def make_song(song_id, genre="rock", dance=0.5, energy=0.5, instr=0.5,
              live=0.5, duration=4.0, title=None, artist="A"):
    return SongAttributes(
        song_id=song_id,
        title=title or song_id.upper(),
        artist=artist,
        genre=genre,
        danceability=dance,
        energy=energy,
        instrumentalness=instr,
        liveness=live,
        duration_minutes=duration,
    )


def random_matrix(rng, n_users, n_songs, density=0.6, min_row=1):
    """Random sparse matrix with continuous ratings in [1, 5]."""
    rows = []
    for _ in range(n_users):
        row = {}
        for s in range(n_songs):
            if rng.random() < density:
                row[s] = float(np.round(1.0 + 4.0 * rng.random(), 6))
        while len(row) < min_row:
            row[int(rng.integers(n_songs))] = float(np.round(1.0 + 4.0 * rng.random(), 6))
        rows.append(row)
    return rows


@pytest.fixture
def toy_matrix():
    """5 users x 6 songs with overlapping tastes."""
    return make_matrix([
        {0: 5.0, 1: 3.0, 2: 4.0, 3: 4.0},
        {0: 3.0, 1: 1.0, 2: 2.0, 3: 3.0, 4: 3.0},
        {0: 4.0, 1: 3.0, 2: 4.0, 3: 3.0, 4: 5.0},
        {0: 3.0, 1: 3.0, 2: 1.0, 3: 5.0, 4: 4.0},
        {0: 1.0, 1: 5.0, 2: 5.0, 3: 2.0, 4: 1.0, 5: 3.0},
    ])
