"""Event-log and catalog ingestion: from raw plays to the 1-5 rating matrix.

A play event contributes to its user-song pair a score of

    recency_weight(months before latest) * monthly play count * idf

summed over months, where idf = ln(N / (1 + df)) is clamped at zero and df
counts the distinct users who played the song that month. Per user, the raw
scores are then min-max scaled onto [1, 5].
"""

from __future__ import annotations

import csv
import logging
import math
from collections import Counter, defaultdict
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Iterable, NamedTuple, Sequence

from .errors import EmptyInputError, MalformedLineError
from .matrix import RatingMatrix

log = logging.getLogger(__name__)

DEFAULT_RECENCY_WINDOW = 24

CATALOG_COLUMNS = (
    "song_id", "title", "artist", "genre",
    "danceability", "energy", "instrumentalness", "liveness", "duration_minutes",
)
UNIT_ATTRIBUTES = ("danceability", "energy", "instrumentalness", "liveness")
ATTRIBUTE_NAMES = UNIT_ATTRIBUTES + ("duration_minutes",)


class MonthIndex(NamedTuple):
    """UTC calendar month; tuple order gives the chronological order."""
    year: int
    month: int

    def months_until(self, later: "MonthIndex") -> int:
        return (later.year - self.year) * 12 + (later.month - self.month)

    @classmethod
    def parse(cls, text: str) -> "MonthIndex":
        year, month = text.split("-")
        m = cls(int(year), int(month))
        if not 1 <= m.month <= 12:
            raise ValueError(f"month out of range in {text!r}")
        return m


@dataclass(frozen=True)
class PlayEvent:
    user_id: str
    song_id: str
    timestamp: int  # Unix seconds, UTC


@dataclass(frozen=True)
class InteractionScore:
    user_id: str
    song_id: str
    raw_score: float


@dataclass(frozen=True)
class SongAttributes:
    song_id: str
    title: str
    artist: str
    genre: str
    danceability: float
    energy: float
    instrumentalness: float
    liveness: float
    duration_minutes: float

    def feature(self, name: str) -> float:
        return getattr(self, name)


@dataclass(frozen=True)
class MalformedLine:
    line_no: int
    reason: str


# --- event log --------------------------------------------------------------

def parse_events(
    lines: Iterable[str], strict: bool = False
) -> tuple[list[PlayEvent], list[MalformedLine]]:
    """Parse tab-separated `user_id  timestamp  song_id [extra...]` lines.

    Comment lines starting with '#' and blank lines are skipped. Malformed
    lines are collected (or raised in strict mode). Raises EmptyInputError
    when no valid event is found.
    """
    events: list[PlayEvent] = []
    bad: list[MalformedLine] = []

    def report(line_no: int, reason: str):
        if strict:
            raise MalformedLineError(line_no, reason)
        bad.append(MalformedLine(line_no, reason))

    for line_no, line in enumerate(lines, start=1):
        line = line.rstrip("\n").rstrip("\r")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) < 3:
            report(line_no, f"expected 3 tab-separated columns, got {len(parts)}")
            continue
        user_id, ts_text, song_id = parts[0], parts[1], parts[2]
        if not user_id or not song_id:
            report(line_no, "empty user or song id")
            continue
        try:
            ts = int(ts_text)
        except ValueError:
            report(line_no, f"non-integer timestamp {ts_text!r}")
            continue
        if ts <= 0:
            report(line_no, f"non-positive timestamp {ts}")
            continue
        events.append(PlayEvent(user_id, song_id, ts))

    if not events:
        raise EmptyInputError("event stream contains no valid play events")
    for entry in bad:
        log.warning("skipped malformed event line %d: %s", entry.line_no, entry.reason)
    return events, bad


def _clamp01(x: float) -> float:
    return min(1.0, max(0.0, x))


def check_catalog_header(fieldnames, what: str = "catalog") -> None:
    if fieldnames is None:
        raise EmptyInputError(f"{what} has no header row")
    missing = [c for c in CATALOG_COLUMNS if c not in fieldnames]
    if missing:
        raise MalformedLineError(1, f"{what} header missing columns {missing}")


def parse_attribute_row(row: dict, row_no: int) -> SongAttributes:
    """One catalog-schema CSV row. Unit features clamped to [0, 1]; empty
    genre becomes "unknown"; bad numbers raise MalformedLineError."""
    song_id = (row["song_id"] or "").strip()
    if not song_id:
        raise MalformedLineError(row_no, "empty song_id")
    try:
        duration = float(row["duration_minutes"])
        features = {name: _clamp01(float(row[name])) for name in UNIT_ATTRIBUTES}
    except (TypeError, ValueError) as exc:
        raise MalformedLineError(row_no, f"bad numeric field: {exc}") from None
    if duration <= 0:
        raise MalformedLineError(row_no, f"non-positive duration {duration}")
    return SongAttributes(
        song_id=song_id,
        title=(row["title"] or "").strip(),
        artist=(row["artist"] or "").strip(),
        genre=(row["genre"] or "").strip() or "unknown",
        duration_minutes=duration,
        **features,
    )


def read_catalog(lines: Iterable[str]) -> dict[str, SongAttributes]:
    """Parse the song catalog CSV into song_id -> SongAttributes."""
    reader = csv.DictReader(lines)
    check_catalog_header(reader.fieldnames)
    catalog: dict[str, SongAttributes] = {}
    for row_no, row in enumerate(reader, start=2):
        song = parse_attribute_row(row, row_no)
        if song.song_id in catalog:
            raise MalformedLineError(row_no, f"duplicate song_id {song.song_id!r}")
        catalog[song.song_id] = song
    if not catalog:
        raise EmptyInputError("catalog contains no songs")
    return catalog


# --- monthly scores ---------------------------------------------------------

def month_of(timestamp: int) -> MonthIndex:
    """UTC calendar month containing the instant."""
    dt = datetime.fromtimestamp(timestamp, tz=timezone.utc)
    return MonthIndex(dt.year, dt.month)


def monthly_tf(events: Sequence[PlayEvent]) -> dict[tuple[str, str, MonthIndex], int]:
    """Play counts per (user, song, month)."""
    counts: Counter = Counter()
    for ev in events:
        counts[(ev.user_id, ev.song_id, month_of(ev.timestamp))] += 1
    return dict(counts)


def idf(n_users: int, df: int) -> float:
    """ln(N / (1 + df)); negative when df + 1 > N (callers clamp at 0)."""
    return math.log(n_users / (1 + df))


def recency_weight(months_before_latest: int, window: int = DEFAULT_RECENCY_WINDOW) -> float:
    """Linear decay (W - k) / W inside the window, 0 at and beyond it."""
    k = months_before_latest
    if k < 0:
        raise ValueError("months_before_latest must be >= 0")
    if k >= window:
        return 0.0
    return (window - k) / window


def build_raw_scores(
    tf: dict[tuple[str, str, MonthIndex], int],
    n_users: int,
    latest_month: MonthIndex,
    window: int = DEFAULT_RECENCY_WINDOW,
) -> list[InteractionScore]:
    """Recency-weighted sum over months of count * max(0, idf) per user-song.

    df counts distinct users with at least one play of the song that month.
    Scores are emitted for every user-song pair present, zero-valued ones
    included, sorted by (user_id, song_id) for deterministic downstream order.
    """
    df: Counter = Counter()
    for (_, song_id, month) in tf:
        df[(song_id, month)] += 1

    totals: defaultdict = defaultdict(float)
    for (user_id, song_id, month), count in sorted(tf.items()):
        k = month.months_until(latest_month)
        if k < 0:
            raise ValueError(f"month {month} is after latest_month {latest_month}")
        weight = recency_weight(k, window)
        song_idf = max(0.0, idf(n_users, df[(song_id, month)]))
        totals[(user_id, song_id)] += weight * count * song_idf

    return [
        InteractionScore(user_id, song_id, score)
        for (user_id, song_id), score in sorted(totals.items())
    ]


def scale_to_ratings(scores: Sequence[InteractionScore]) -> RatingMatrix:
    """Min-max map each user's raw scores onto [1, 5].

    A degenerate range (single song, or all scores equal but positive) maps
    to the neutral 3.0. Users whose every score is zero carry no preference
    signal and are dropped with a warning. User and song orderings are the
    sorted distinct ids, so the result is independent of input order.
    """
    by_user: defaultdict = defaultdict(list)
    for sc in scores:
        by_user[sc.user_id].append(sc)

    songs = sorted({sc.song_id for sc in scores})
    song_pos = {s: i for i, s in enumerate(songs)}

    users: list[str] = []
    for user_id in sorted(by_user):
        if max(sc.raw_score for sc in by_user[user_id]) > 0.0:
            users.append(user_id)
        else:
            log.warning("dropping user %s: no positive interaction score", user_id)

    triples: list[tuple[int, int, float]] = []
    for u, user_id in enumerate(users):
        user_scores = by_user[user_id]
        lo = min(sc.raw_score for sc in user_scores)
        hi = max(sc.raw_score for sc in user_scores)
        for sc in user_scores:
            if hi > lo:
                r = 1.0 + 4.0 * (sc.raw_score - lo) / (hi - lo)
            else:
                r = 3.0
            triples.append((u, song_pos[sc.song_id], r))

    return RatingMatrix.from_entries(users, songs, triples)


# --- pipeline ----------------------------------------------------------------

def build_rating_matrix(
    events: Sequence[PlayEvent],
    window: int = DEFAULT_RECENCY_WINDOW,
    start: MonthIndex | None = None,
    end: MonthIndex | None = None,
) -> RatingMatrix:
    """Full pipeline: filter events to [start, end], score, scale.

    The latest month present after filtering anchors the recency weights.
    """
    if start is not None or end is not None:
        kept = []
        for ev in events:
            m = month_of(ev.timestamp)
            if start is not None and m < start:
                continue
            if end is not None and m > end:
                continue
            kept.append(ev)
        events = kept
    if not events:
        raise EmptyInputError("no events inside the configured month range")

    tf = monthly_tf(events)
    n_users = len({u for (u, _, _) in tf})
    latest = max(m for (_, _, m) in tf)
    scores = build_raw_scores(tf, n_users, latest, window)
    return scale_to_ratings(scores)
