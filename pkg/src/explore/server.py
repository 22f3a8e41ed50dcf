"""HTTP facade over a published model snapshot.

Readers always see the last fully built snapshot through one reference that
is swapped atomically; cold-start onboarding rebuilds off to the side under a
single builder lock. Responses carry no timestamps, so identical requests
against an identical snapshot produce byte-identical bodies.
"""

import io
import json
import logging
import os
import threading
from dataclasses import dataclass, field

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, Response
from starlette.middleware.cors import CORSMiddleware

from .coldstart import onboard, read_seed_profile
from .errors import (
    EmptyInputError,
    MalformedLineError,
    NoRatingSupportError,
    NoRepresentativesError,
)
from .explain import (
    explain_recommendation_feature,
    explain_recommendation_neighbor,
    neighbor_graph,
)
from .ingest import ATTRIBUTE_NAMES
from .selector import SOURCES, MoodFilter, assemble
from .snapshot import ModelSnapshot, build_snapshot, load_snapshot

log = logging.getLogger(__name__)

DEFAULT_PORT = 8942
DEFAULT_K = 5
DEFAULT_SOURCE = "nostalgic"


class ApiError(Exception):
    """Carried to the client as JSON {code, message} with an HTTP status."""

    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


@dataclass
class ServiceConfig:
    snapshot_path: str | None = None
    catalog_path: str | None = None
    port: int = DEFAULT_PORT
    playlist_paths: dict = field(default_factory=dict)


def load_service_config(env=None, config_path=None) -> ServiceConfig:
    """Environment first, then an optional JSON config file on top."""
    env = os.environ if env is None else env
    cfg = ServiceConfig()
    cfg.snapshot_path = env.get("EXPLORE_SNAPSHOT") or None
    cfg.catalog_path = env.get("EXPLORE_CATALOG") or None
    if env.get("EXPLORE_PORT"):
        cfg.port = int(env["EXPLORE_PORT"])
    for key, value in env.items():
        if key.startswith("EXPLORE_PLAYLIST_") and value:
            name = key[len("EXPLORE_PLAYLIST_"):].lower().replace("_", "-")
            cfg.playlist_paths[name] = value
    if config_path:
        with open(config_path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
        cfg.snapshot_path = data.get("snapshot", cfg.snapshot_path)
        cfg.catalog_path = data.get("catalog", cfg.catalog_path)
        cfg.port = int(data.get("port", cfg.port))
        for name, path in data.get("playlists", {}).items():
            cfg.playlist_paths[name] = path
    return cfg


class ServiceState:
    """Published snapshot reference plus the single-builder lock."""

    def __init__(self, snapshot: ModelSnapshot | None = None):
        self._snapshot = snapshot
        self._builder = threading.Lock()

    @property
    def snapshot(self) -> ModelSnapshot | None:
        return self._snapshot

    def publish(self, snapshot: ModelSnapshot) -> None:
        # single reference assignment: readers see old or new, never partial
        self._snapshot = snapshot

    def require_snapshot(self) -> ModelSnapshot:
        snap = self._snapshot
        if snap is None:
            raise ApiError(503, "no_snapshot", "no model snapshot has been published")
        return snap

    def try_begin_build(self) -> bool:
        return self._builder.acquire(blocking=False)

    def end_build(self) -> None:
        self._builder.release()


def parse_range(name: str, raw: str) -> tuple:
    parts = raw.split(",")
    if len(parts) != 2:
        raise ApiError(422, "invalid_range",
                       f"{name} must be 'lo,hi', got {raw!r}")
    try:
        lo, hi = float(parts[0]), float(parts[1])
    except ValueError:
        raise ApiError(422, "invalid_range",
                       f"{name} bounds must be numbers, got {raw!r}")
    if lo > hi:
        raise ApiError(422, "invalid_range",
                       f"{name} lower bound {lo} exceeds upper bound {hi}")
    return lo, hi


def mood_from_params(params: dict) -> MoodFilter | None:
    ranges = {}
    for name in ATTRIBUTE_NAMES:
        raw = params.get(name)
        if raw is not None:
            ranges[name] = parse_range(name, raw)
    if not ranges:
        return None
    return MoodFilter(**ranges)


def song_attribute_dict(song) -> dict:
    return {name: song.feature(name) for name in ATTRIBUTE_NAMES}


def canonical(payload, status: int = 200) -> Response:
    """Stable bytes for a JSON payload: sorted keys, fixed separators."""
    body = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return Response(content=body, status_code=status, media_type="application/json")


def create_app(state: ServiceState | None = None) -> FastAPI:
    state = state or ServiceState()
    app = FastAPI(title="explore", docs_url=None, redoc_url=None)
    # the dashboard may be served from another origin than this API
    app.add_middleware(CORSMiddleware, allow_origins=["*"],
                       allow_methods=["GET", "POST"], allow_headers=["*"])
    app.state.service = state

    @app.exception_handler(ApiError)
    async def handle_api_error(request: Request, exc: ApiError):
        return JSONResponse({"code": exc.code, "message": exc.message},
                            status_code=exc.status)

    @app.exception_handler(RequestValidationError)
    async def handle_validation(request: Request, exc: RequestValidationError):
        return JSONResponse({"code": "invalid_request", "message": str(exc.errors())},
                            status_code=422)

    def lookup_song(snap: ModelSnapshot, song_id: str):
        if song_id in snap.catalog:
            return snap.catalog[song_id], True
        for playlist in snap.playlists.values():
            for song in playlist.songs:
                if song.song_id == song_id:
                    return song, False
        return None, False

    @app.get("/v1/health")
    async def health():
        snap = state.snapshot
        payload = {
            "status": "ok",
            "snapshot": snap is not None,
            "users": snap.matrix.n_users if snap else 0,
            "songs": snap.matrix.n_songs if snap else 0,
            "sources": list(SOURCES),
        }
        return canonical(payload)

    @app.get("/v1/users/{user_id}/recommendations")
    async def recommendations(user_id: str, request: Request,
                              k: int = DEFAULT_K, source: str = DEFAULT_SOURCE):
        snap = state.require_snapshot()
        if not snap.matrix.has_user(user_id):
            raise ApiError(404, "unknown_user", f"user {user_id!r} is not in the corpus")
        if k < 1:
            raise ApiError(422, "invalid_request", f"k must be >= 1, got {k}")
        if source not in SOURCES:
            raise ApiError(422, "invalid_source",
                           f"source {source!r} not one of {sorted(SOURCES)}")
        try:
            mood = mood_from_params(dict(request.query_params))
        except ValueError as exc:
            raise ApiError(422, "invalid_range", str(exc))
        user_idx = snap.matrix.user_index(user_id)
        try:
            playlist = assemble(
                snap.matrix, snap.catalog, user_id, source, k,
                mood=mood, curated=snap.playlists, cf_config=snap.cf_config,
                neighbor_set=snap.neighbor_set(user_idx),
            )
        except ValueError as exc:
            raise ApiError(503, "source_unavailable", str(exc))
        payload = playlist.to_dict()
        for entry in payload["entries"]:
            song, _ = lookup_song(snap, entry["song"])
            entry["attributes"] = song_attribute_dict(song) if song else None
        return canonical(payload)

    @app.get("/v1/users/{user_id}/explanation")
    async def explanation(user_id: str, song: str):
        snap = state.require_snapshot()
        matrix = snap.matrix
        if not matrix.has_user(user_id):
            raise ApiError(404, "unknown_user", f"user {user_id!r} is not in the corpus")
        if not matrix.has_song(song):
            raise ApiError(404, "unknown_song", f"song {song!r} is not in the corpus")
        user_idx = matrix.user_index(user_id)
        song_idx = matrix.song_index(song)
        model = snap.factor_model
        if model is not None and snap.mapper is not None:
            result = explain_recommendation_feature(
                model, snap.mapper, user_idx, song_idx
            ).to_dict()
        else:
            neighbor_set = snap.neighbor_set(user_idx)
            try:
                result = explain_recommendation_neighbor(
                    matrix, neighbor_set, song_idx
                ).to_dict()
            except NoRatingSupportError:
                raise ApiError(404, "no_support",
                               f"no neighbor of {user_id!r} rated {song!r}")
            result["graph"] = neighbor_graph(
                matrix, neighbor_set, [song_idx], catalog=snap.catalog
            )
        result["user"] = user_id
        return canonical(result)

    @app.post("/v1/users:coldstart")
    async def coldstart(request: Request, user: str = "listener",
                        k: int = DEFAULT_K, source: str = DEFAULT_SOURCE):
        snap = state.require_snapshot()
        if source not in SOURCES:
            raise ApiError(422, "invalid_source",
                           f"source {source!r} not one of {sorted(SOURCES)}")
        body = await request.body()
        try:
            text = body.decode("utf-8")
        except UnicodeDecodeError:
            raise ApiError(422, "invalid_seed_file", "seed file is not UTF-8 text")
        try:
            profile = read_seed_profile(io.StringIO(text), user)
        except (MalformedLineError, EmptyInputError) as exc:
            raise ApiError(422, "invalid_seed_file", str(exc))
        if not state.try_begin_build():
            raise ApiError(409, "rebuild_in_progress",
                           "another snapshot build is running, retry shortly")
        try:
            try:
                new_matrix, user_id, affinity, reps = onboard(
                    snap.matrix, snap.catalog, profile
                )
            except NoRepresentativesError as exc:
                raise ApiError(422, "invalid_seed_file", str(exc))
            except ValueError as exc:
                raise ApiError(422, "user_exists", str(exc))
            rebuilt = build_snapshot(
                new_matrix, snap.catalog,
                cf_config=snap.cf_config,
                playlists=snap.playlists,
                factor_model=None,
                mapper=None,
                precompute_neighbors=snap.neighbor_index is not None,
                build_config=snap.build_config,
                built_at=snap.built_at,
            )
            state.publish(rebuilt)
        finally:
            state.end_build()
        try:
            playlist = assemble(
                rebuilt.matrix, rebuilt.catalog, user_id, source, k,
                curated=rebuilt.playlists, cf_config=rebuilt.cf_config,
                neighbor_set=rebuilt.neighbor_set(rebuilt.matrix.user_index(user_id)),
            )
        except ValueError as exc:
            raise ApiError(503, "source_unavailable", str(exc))
        payload = {
            "user": user_id,
            "affinity": dict(affinity.weights),
            "representatives": reps,
            "playlist": playlist.to_dict(),
        }
        return canonical(payload, status=200)

    @app.get("/v1/songs/{song_id}")
    async def song_detail(song_id: str):
        snap = state.require_snapshot()
        song, in_corpus = lookup_song(snap, song_id)
        if song is None:
            raise ApiError(404, "unknown_song", f"song {song_id!r} is not known")
        payload = {
            "song": song.song_id,
            "title": song.title,
            "artist": song.artist,
            "genre": song.genre,
            "attributes": song_attribute_dict(song),
            "in_catalog": in_corpus,
            "listeners": (
                int(snap.matrix.listener_counts()[snap.matrix.song_index(song_id)])
                if snap.matrix.has_song(song_id) else 0
            ),
        }
        return canonical(payload)

    return app


def serve(config: ServiceConfig) -> None:
    """Build state from config and block in uvicorn."""
    import uvicorn

    from .ingest import read_catalog
    from .selector import read_playlist

    state = ServiceState()
    if config.snapshot_path:
        snap = load_snapshot(config.snapshot_path)
        if config.catalog_path:
            with open(config.catalog_path, "r", encoding="utf-8") as fh:
                snap.catalog = read_catalog(fh)
        for name, path in config.playlist_paths.items():
            with open(path, "r", encoding="utf-8") as fh:
                snap.playlists[name] = read_playlist(fh, name)
        state.publish(snap)
        log.info("published snapshot from %s (%d users, %d songs)",
                 config.snapshot_path, snap.matrix.n_users, snap.matrix.n_songs)
    else:
        log.warning("serving without a snapshot; endpoints return 503 until one exists")
    app = create_app(state)
    uvicorn.run(app, host="127.0.0.1", port=config.port, log_level="info")
