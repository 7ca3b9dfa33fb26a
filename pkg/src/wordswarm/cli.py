"""Command-line entry point.

Commands:
  run       live pipeline: scraper child processes, session, web endpoint
  replay    headless corpus-driven session emitting frame lines
  snapshot  headless layout of a corpus written as an SVG
  analyze   frequency and co-occurrence tables for a corpus

Global flags: --config <json>, --seed <int>, --print-config, plus dotted
overrides of any config leaf, e.g. ``--layout.speed_coefficient 0.2``.
Exit codes: 0 success, 1 usage or config error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import queue
import subprocess
import sys
import threading
from pathlib import Path

from . import config as config_mod
from .config import CliConfig, ConfigError
from .render import frame_to_svg
from .server import create_app
from .session import Session, frame_to_json

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage problems exit 1, not argparse's 2
        raise UsageError(message)


def build_parser() -> _Parser:
    parser = _Parser(prog="wordswarm", description=__doc__, add_help=True)
    parser.add_argument("--config", default=None, help="JSON config file")
    parser.add_argument("--seed", type=int, default=None, help="override rng_seed")
    parser.add_argument("--print-config", action="store_true", help="dump effective config and exit")
    sub = parser.add_subparsers(dest="command")

    sub.add_parser("run", help="live pipeline with scraper children and web endpoint")

    replay = sub.add_parser("replay", help="drive a session from a recorded corpus")
    replay.add_argument("--corpus", required=True, help="ndjson article file")
    replay.add_argument("--ticks", type=int, default=2000)
    replay.add_argument("--frames-out", default=None, help="frame ndjson output (default stdout)")

    snapshot = sub.add_parser("snapshot", help="headless layout rendered to SVG")
    snapshot.add_argument("--corpus", required=True)
    snapshot.add_argument("--ticks", type=int, default=1000)
    snapshot.add_argument("--out", required=True, help="SVG output path")

    analyze = sub.add_parser("analyze", help="print frequency and co-occurrence tables")
    analyze.add_argument("--corpus", required=True)
    return parser


def extract_overrides(argv: list[str]) -> tuple[list[str], list[tuple[str, str]]]:
    """Pull dotted-path overrides (``--a.b value`` or ``--a.b=value``) out
    of the raw argument list before argparse sees it."""
    rest: list[str] = []
    overrides: list[tuple[str, str]] = []
    i = 0
    while i < len(argv):
        token = argv[i]
        if token.startswith("--") and "." in token[2:].split("=", 1)[0]:
            if "=" in token:
                key, value = token[2:].split("=", 1)
                overrides.append((key, value))
                i += 1
            else:
                if i + 1 >= len(argv):
                    raise UsageError(f"missing value for {token}")
                overrides.append((token[2:], argv[i + 1]))
                i += 2
        else:
            rest.append(token)
            i += 1
    return rest, overrides


def ingest_corpus(session: Session, path: str) -> None:
    session.on_article_lines(Path(path).read_text(encoding="utf-8").splitlines())


def cmd_replay(cfg: CliConfig, args) -> int:
    session = Session(cfg.session)
    ingest_corpus(session, args.corpus)
    out = open(args.frames_out, "w", encoding="utf-8") if args.frames_out else sys.stdout
    try:
        for _ in range(args.ticks):
            out.write(frame_to_json(session.advance()) + "\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def cmd_snapshot(cfg: CliConfig, args) -> int:
    session = Session(cfg.session)
    ingest_corpus(session, args.corpus)
    session.refresh_analysis()
    for _ in range(args.ticks):
        session.tick()
    svg = frame_to_svg(session.current_frame(), cfg.session.layout.viewport)
    Path(args.out).write_text(svg, encoding="utf-8")
    return EXIT_OK


def cmd_analyze(cfg: CliConfig, args) -> int:
    from .analyzer import snapshot as take_snapshot

    session = Session(cfg.session)
    ingest_corpus(session, args.corpus)
    if len(session.window) == 0:
        return EXIT_OK
    snap = take_snapshot(session.window, cfg.session.analyzer.f_min, cfg.session.analyzer.n_max)
    if not snap.words:
        print("no words selected")
        return EXIT_OK
    for word in snap.words:
        print(f"{word} {snap.freq[word]}")
    pairs = [(u, v, c) for u, v, c in snap.cooc.pairs() if c > 0]
    pairs.sort(key=lambda p: (-p[2], p[0], p[1]))
    if pairs:
        print()
        for u, v, c in pairs:
            print(f"{u} {v} {c}")
    return EXIT_OK


def _pump(stream, sink: queue.Queue) -> None:
    for line in stream:
        sink.put(line)


def _tcp_intake(port: int, host: str, sink: queue.Queue) -> None:
    """Accept record connections on a listen port; one reader per peer."""
    import socket

    server = socket.create_server((host, port))
    server.settimeout(1.0)

    def serve() -> None:
        while True:
            try:
                conn, _ = server.accept()
            except TimeoutError:
                continue
            except OSError:
                return
            reader = conn.makefile("r", encoding="utf-8")
            threading.Thread(target=_pump, args=(reader, sink), daemon=True).start()

    threading.Thread(target=serve, daemon=True).start()


def _default_ui_dir() -> Path | None:
    candidate = Path(__file__).resolve().parents[2] / "frontend" / "dist"
    return candidate if candidate.is_dir() else None


def _scraper_command(cfg: CliConfig, source) -> list[str]:
    cmd = [
        sys.executable, "-m", "wordswarm.scraper",
        "--source", source.location,
        "--kind", source.kind,
        "--min-len", str(cfg.filter.min_len),
        "--max-len", str(cfg.filter.max_len),
        "--interval", str(source.poll_interval),
        "--out", "stdout",
    ]
    stoplist = cfg.raw.get("filter", {}).get("stoplist")
    if stoplist:
        cmd += ["--stoplist", str(stoplist)]
    for term in source.query_terms:
        cmd += ["--query", term]
    if source.tag:
        cmd += ["--tag", source.tag]
    return cmd


def cmd_run(cfg: CliConfig, args) -> int:
    import uvicorn

    intake: queue.Queue = queue.Queue()
    children: list[subprocess.Popen] = []
    try:
        for source in cfg.sources:
            child = subprocess.Popen(
                _scraper_command(cfg, source),
                stdout=subprocess.PIPE,
                stdin=subprocess.PIPE,
                text=True,
                bufsize=1,
            )
            children.append(child)
            threading.Thread(target=_pump, args=(child.stdout, intake), daemon=True).start()
    except OSError as exc:
        log.error("cannot spawn scraper: %s", exc)
        for child in children:
            child.terminate()
        return EXIT_RUNTIME

    if cfg.intake_stdin:
        threading.Thread(target=_pump, args=(sys.stdin, intake), daemon=True).start()
    if cfg.intake_tcp_port is not None:
        try:
            _tcp_intake(cfg.intake_tcp_port, cfg.host, intake)
        except OSError as exc:
            log.error("cannot listen for intake on port %s: %s", cfg.intake_tcp_port, exc)
            for child in children:
                child.terminate()
            return EXIT_RUNTIME

    def sink(line: str) -> None:
        if not children:
            raise RuntimeError("no scraper attached")
        for child in children:
            child.stdin.write(line + "\n")
            child.stdin.flush()

    session = Session(cfg.session, query_sink=sink if children else None)
    app = create_app(session, intake=intake, static_dir=_default_ui_dir())
    try:
        uvicorn.run(app, host=cfg.host, port=cfg.port, log_level="warning")
    except (OSError, SystemExit) as exc:
        log.error("server failed: %s", exc)
        return EXIT_RUNTIME
    finally:
        for child in children:
            child.terminate()
        for child in children:
            try:
                child.wait(timeout=5)
            except subprocess.TimeoutExpired:
                child.kill()
    return EXIT_OK


COMMANDS = {
    "run": cmd_run,
    "replay": cmd_replay,
    "snapshot": cmd_snapshot,
    "analyze": cmd_analyze,
}


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    try:
        rest, overrides = extract_overrides(sys.argv[1:] if argv is None else list(argv))
        args = parser.parse_args(rest)
        cfg = config_mod.load(args.config, overrides, seed=args.seed)
    except (UsageError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    if args.print_config:
        print(json.dumps(cfg.raw, indent=2))
        return EXIT_OK
    if args.command is None:
        print("error: no command given (run, replay, snapshot, analyze)", file=sys.stderr)
        return EXIT_CONFIG

    try:
        return COMMANDS[args.command](cfg, args)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
