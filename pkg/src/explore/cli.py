"""Command line front door: build ratings, train, evaluate, recommend, serve.

Results go to stdout (or --out); logs go to stderr. Exit codes: 0 success,
1 usage error, 2 data error.
"""

import argparse
import csv
import datetime
import json
import logging
import sys
from pathlib import Path

from .cf import CFConfig
from .coldstart import onboard, read_seed_profile
from .errors import ExploreError
from .ingest import (
    ATTRIBUTE_NAMES,
    DEFAULT_RECENCY_WINDOW,
    MonthIndex,
    build_rating_matrix,
    parse_events,
    read_catalog,
)
from .matrix import read_matrix, write_matrix
from .metrics import SplitSpec, SplitStrategy, evaluate
from .mf import (
    DEFAULT_DIM,
    DEFAULT_EPOCHS,
    DEFAULT_LEARNING_RATE,
    DEFAULT_REGULARIZATION,
    train_mf,
)
from .selector import SOURCES, MoodFilter, assemble, read_playlist
from .snapshot import build_snapshot, load_snapshot, save_snapshot

log = logging.getLogger("explore")

DEFAULT_SEED = 42


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems as exceptions, not exits."""

    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def canonical_json(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
        log.info("wrote %s", out)
    else:
        sys.stdout.write(text)


def parse_named_ranges(items) -> MoodFilter | None:
    ranges = {}
    for item in items or []:
        name, sep, raw = item.partition("=")
        if not sep or name not in ATTRIBUTE_NAMES:
            raise UsageError(
                f"--range expects ATTRIBUTE=LO,HI with attribute in "
                f"{ATTRIBUTE_NAMES}, got {item!r}"
            )
        parts = raw.split(",")
        if len(parts) != 2:
            raise UsageError(f"--range {name} expects LO,HI, got {raw!r}")
        try:
            lo, hi = float(parts[0]), float(parts[1])
        except ValueError:
            raise UsageError(f"--range {name} bounds must be numbers, got {raw!r}")
        if lo > hi:
            raise UsageError(f"--range {name}: lower bound exceeds upper bound")
        ranges[name] = (lo, hi)
    return MoodFilter(**ranges) if ranges else None


def parse_playlist_args(items) -> dict:
    playlists = {}
    for item in items or []:
        name, sep, path = item.partition("=")
        if not sep or not name or not path:
            raise UsageError(f"--playlist expects NAME=PATH, got {item!r}")
        with open(path, "r", encoding="utf-8") as fh:
            playlists[name] = read_playlist(fh, name)
    return playlists


def load_catalog_file(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return read_catalog(fh)


# --- subcommands ------------------------------------------------------------

def cmd_build_ratings(args) -> int:
    with open(args.events, "r", encoding="utf-8") as fh:
        events, bad = parse_events(fh)
    if args.catalog:
        catalog = load_catalog_file(args.catalog)
        kept = [e for e in events if e.song_id in catalog]
        dropped = len(events) - len(kept)
        if dropped:
            log.warning("dropped %d events for songs outside the catalog", dropped)
        events = kept
    start = MonthIndex.parse(args.start) if args.start else None
    end = MonthIndex.parse(args.end) if args.end else None
    matrix = build_rating_matrix(events, window=args.window, start=start, end=end)
    write_matrix(matrix, args.out)
    emit(canonical_json({
        "out": args.out,
        "users": matrix.n_users,
        "songs": matrix.n_songs,
        "entries": matrix.n_entries,
        "skipped_lines": len(bad),
    }), None)
    return 0


def cmd_train(args) -> int:
    matrix = read_matrix(args.matrix)
    catalog = load_catalog_file(args.catalog)
    playlists = parse_playlist_args(args.playlist)
    cf_config = CFConfig(k=args.neighbors, min_overlap=args.min_overlap)
    model = None
    mapper = None
    if args.algo == "mf":
        model = train_mf(matrix, d=args.d, epochs=args.epochs,
                         learning_rate=args.lr, regularization=args.reg,
                         seed=args.seed)
        try:
            from .explain import fit_latent_mappers

            mapper = fit_latent_mappers(model.item_factors, matrix.songs, catalog)
        except ExploreError as exc:
            log.warning("attribute mapper not fitted: %s", exc)
        except ValueError as exc:
            log.warning("attribute mapper not fitted: %s", exc)
    snapshot = build_snapshot(
        matrix, catalog,
        cf_config=cf_config,
        playlists=playlists,
        factor_model=model,
        mapper=mapper,
        precompute_neighbors=not args.no_neighbor_index,
        build_config={
            "algo": args.algo, "d": args.d, "epochs": args.epochs,
            "lr": args.lr, "reg": args.reg, "seed": args.seed,
            "neighbors": args.neighbors, "min_overlap": args.min_overlap,
        },
        built_at=datetime.datetime.now(datetime.timezone.utc)
        .isoformat(timespec="seconds"),
    )
    save_snapshot(snapshot, args.out)
    if model is not None and model.training_log and not args.no_figures:
        from .figures import plot_training_curve

        curve = Path(args.out).with_suffix(".training_curve.png")
        plot_training_curve(model.training_log, curve)
        log.info("wrote figure %s", curve)
    emit(canonical_json({
        "out": args.out,
        "algo": args.algo,
        "users": matrix.n_users,
        "songs": matrix.n_songs,
        "config_hash": snapshot.config_hash,
        "mapper_fitted": mapper is not None,
        "final_train_rmse": model.training_log[-1] if model else None,
    }), None)
    return 0


def cmd_evaluate(args) -> int:
    matrix = read_matrix(args.matrix)
    strategy = (SplitStrategy.STRATIFIED_PER_USER if args.split == "stratified"
                else SplitStrategy.GLOBAL_RANDOM)
    spec = SplitSpec(strategy=strategy, train_fraction=args.train_fraction,
                     seed=args.seed)
    mf_params = {"d": args.d, "epochs": args.epochs, "learning_rate": args.lr,
                 "regularization": args.reg, "seed": args.seed}
    report = evaluate(matrix, spec, algo=args.algo, k=args.k,
                      relevance_threshold=args.relevance_threshold,
                      mf_params=mf_params)
    text = canonical_json(report.to_dict())
    emit(text, args.out)
    if args.out:
        out_dir = Path(args.out).parent
        csv_path = out_dir / (Path(args.out).stem + ".csv")
        with open(csv_path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["user", "n_test", "ap", "ndcg"])
            for row in report.per_user:
                writer.writerow([row["user"], row["n_test"], row["ap"], row["ndcg"]])
        log.info("wrote %s", csv_path)
        if not args.no_figures:
            from .figures import render_report_figures

            render_report_figures(report, out_dir)
    return 0


def _load_snapshot_arg(args):
    return load_snapshot(args.snapshot, strict=args.strict)


def cmd_recommend(args) -> int:
    snapshot = _load_snapshot_arg(args)
    mood = parse_named_ranges(args.range)
    matrix = snapshot.matrix
    user_idx = matrix.user_index(args.user)
    playlist = assemble(
        matrix, snapshot.catalog, args.user, args.source, args.k,
        mood=mood, curated=snapshot.playlists, cf_config=snapshot.cf_config,
        neighbor_set=snapshot.neighbor_set(user_idx),
    )
    emit(canonical_json(playlist.to_dict()), args.out)
    return 0


def cmd_coldstart(args) -> int:
    snapshot = _load_snapshot_arg(args)
    with open(args.seeds, "r", encoding="utf-8") as fh:
        profile = read_seed_profile(fh, args.user)
    new_matrix, user_id, affinity, reps = onboard(
        snapshot.matrix, snapshot.catalog, profile
    )
    rebuilt = build_snapshot(
        new_matrix, snapshot.catalog,
        cf_config=snapshot.cf_config,
        playlists=snapshot.playlists,
        factor_model=None,
        mapper=None,
        precompute_neighbors=snapshot.neighbor_index is not None,
        build_config=snapshot.build_config,
        built_at=snapshot.built_at,
    )
    if args.save:
        save_snapshot(rebuilt, args.save)
        log.info("wrote updated snapshot %s", args.save)
    playlist = assemble(
        rebuilt.matrix, rebuilt.catalog, user_id, args.source, args.k,
        curated=rebuilt.playlists, cf_config=rebuilt.cf_config,
        neighbor_set=rebuilt.neighbor_set(rebuilt.matrix.user_index(user_id)),
    )
    emit(canonical_json({
        "user": user_id,
        "affinity": dict(affinity.weights),
        "representatives": reps,
        "playlist": playlist.to_dict(),
    }), args.out)
    return 0


def cmd_serve(args) -> int:
    from .server import load_service_config, serve

    config = load_service_config(config_path=args.config)
    if args.snapshot:
        config.snapshot_path = args.snapshot
    if args.catalog:
        config.catalog_path = args.catalog
    if args.port:
        config.port = args.port
    for item in args.playlist or []:
        name, sep, path = item.partition("=")
        if not sep:
            raise UsageError(f"--playlist expects NAME=PATH, got {item!r}")
        config.playlist_paths[name] = path
    serve(config)
    return 0


# --- wiring -----------------------------------------------------------------

def build_parser() -> _Parser:
    parser = _Parser(prog="explore",
                     description="explainable song recommendations")
    parser.add_argument("-v", "--verbose", action="store_true",
                        help="debug logging on stderr")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    def common(p, out_help="write the result here instead of stdout"):
        p.add_argument("--seed", type=int, default=DEFAULT_SEED,
                       help="root random seed (default %(default)s)")
        p.add_argument("--out", help=out_help)

    p = sub.add_parser("build-ratings",
                       help="turn a play-event log into a rating matrix file")
    p.add_argument("--events", required=True, help="TSV play-event log")
    p.add_argument("--catalog", help="song attribute CSV; filters unknown songs")
    p.add_argument("--window", type=int, default=DEFAULT_RECENCY_WINDOW,
                   help="recency window in months (default %(default)s)")
    p.add_argument("--start", help="first month to keep, YYYY-MM")
    p.add_argument("--end", help="last month to keep, YYYY-MM")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED,
                   help="root random seed (default %(default)s)")
    p.add_argument("--out", required=True, help="matrix file to write")
    p.set_defaults(func=cmd_build_ratings)

    p = sub.add_parser("train", help="build a model snapshot from a matrix")
    p.add_argument("--matrix", required=True)
    p.add_argument("--catalog", required=True)
    p.add_argument("--playlist", action="append", metavar="NAME=PATH",
                   help="curated playlist CSV; repeatable")
    p.add_argument("--algo", choices=("cf", "mf"), default="cf")
    p.add_argument("--d", type=int, default=DEFAULT_DIM)
    p.add_argument("--epochs", type=int, default=DEFAULT_EPOCHS)
    p.add_argument("--lr", type=float, default=DEFAULT_LEARNING_RATE)
    p.add_argument("--reg", type=float, default=DEFAULT_REGULARIZATION)
    p.add_argument("--neighbors", type=int, default=CFConfig().k,
                   help="neighborhood size (default %(default)s)")
    p.add_argument("--min-overlap", type=int, default=CFConfig().min_overlap)
    p.add_argument("--no-neighbor-index", action="store_true",
                   help="skip the precomputed all-users neighbor table")
    p.add_argument("--no-figures", action="store_true")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--out", required=True, help="snapshot file to write")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="split, fit, and score a matrix")
    p.add_argument("--matrix", required=True)
    p.add_argument("--split", choices=("stratified", "random"),
                   default="stratified")
    p.add_argument("--train-fraction", type=float, default=0.8)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--algo", choices=("cf", "mf"), default="cf")
    p.add_argument("--relevance-threshold", type=float, default=3.5)
    p.add_argument("--d", type=int, default=DEFAULT_DIM)
    p.add_argument("--epochs", type=int, default=DEFAULT_EPOCHS)
    p.add_argument("--lr", type=float, default=DEFAULT_LEARNING_RATE)
    p.add_argument("--reg", type=float, default=DEFAULT_REGULARIZATION)
    p.add_argument("--no-figures", action="store_true",
                   help="skip PNG rendering next to --out")
    common(p, "write report JSON here; also writes CSV and figures alongside")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("recommend", help="rank songs for a user from a snapshot")
    p.add_argument("--snapshot", required=True)
    p.add_argument("--user", required=True)
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--source", choices=sorted(SOURCES), default="nostalgic")
    p.add_argument("--range", action="append", metavar="ATTRIBUTE=LO,HI",
                   help="mood bound, e.g. energy=0.8,1.0; repeatable")
    p.add_argument("--strict", action="store_true",
                   help="refuse snapshots whose config hash does not match")
    common(p)
    p.set_defaults(func=cmd_recommend)

    p = sub.add_parser("coldstart", help="onboard a new user from a seed CSV")
    p.add_argument("--snapshot", required=True)
    p.add_argument("--seeds", required=True, help="seed song CSV")
    p.add_argument("--user", required=True, help="external id for the new user")
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--source", choices=sorted(SOURCES), default="nostalgic")
    p.add_argument("--save", help="write the updated snapshot here")
    p.add_argument("--strict", action="store_true")
    common(p)
    p.set_defaults(func=cmd_coldstart)

    p = sub.add_parser("serve", help="publish a snapshot over HTTP")
    p.add_argument("--snapshot")
    p.add_argument("--catalog")
    p.add_argument("--port", type=int)
    p.add_argument("--config", help="JSON config file; overrides environment")
    p.add_argument("--playlist", action="append", metavar="NAME=PATH")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 1
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        force=True,
    )
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 1
    log.info("root seed = %d", getattr(args, "seed", DEFAULT_SEED))
    try:
        return args.func(args)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except ExploreError as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        return 2
    except FileNotFoundError as exc:
        log.error("missing file: %s", exc.filename or exc)
        return 2
    except (OSError, ValueError) as exc:
        log.error("%s", exc)
        return 2


if __name__ == "__main__":
    sys.exit(main())
