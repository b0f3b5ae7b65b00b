"""wi — command line front end.

Subcommands: replay recorded event files, clean raw logs, analyze events
into metrics, verify certificates (against a local data directory or a
running server), and serve the HTTP API. Exit codes: 0 success, 2 input
error, 3 not found.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .certify import Store
from .condenser import clean_log, parse_log, render_entry, render_log
from .errors import (
    InvalidIdError,
    LogParseError,
    MalformedEventError,
    NotFoundError,
    WriterIntegrityError,
)
from .metrics import analyze_log, render_stats
from .session import events_from_json, replay_events

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NOT_FOUND = 3


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except WriterIntegrityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wi", description="writing-process logging, metrics, and certificates"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    replay = sub.add_parser("replay", help="replay an event file; print cleaned log and stats")
    replay.add_argument("events_file", type=Path)
    replay.add_argument("--json", action="store_true", dest="as_json")
    replay.set_defaults(handler=cmd_replay)

    analyze = sub.add_parser("analyze", help="replay an event file; print the stats line only")
    analyze.add_argument("events_file", type=Path)
    analyze.add_argument("--json", action="store_true", dest="as_json")
    analyze.set_defaults(handler=cmd_analyze)

    clean = sub.add_parser("clean", help="condense a raw log file")
    clean.add_argument("raw_log_file", type=Path)
    clean.add_argument("--json", action="store_true", dest="as_json")
    clean.set_defaults(handler=cmd_clean)

    verify = sub.add_parser("verify", help="look up and print a certificate")
    verify.add_argument("certificate_id")
    source = verify.add_mutually_exclusive_group()
    source.add_argument("--data-dir", type=Path, default=None)
    source.add_argument("--server", default=None, metavar="URL")
    verify.add_argument("--json", action="store_true", dest="as_json")
    verify.set_defaults(handler=cmd_verify)

    serve = sub.add_parser("serve", help="run the HTTP API server")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8787)
    serve.add_argument("--data-dir", type=Path, default=None)
    serve.add_argument("--token-ttl", type=float, default=12 * 3600,
                       help="login token lifetime in seconds")
    serve.add_argument("--max-skew", type=float, default=300.0,
                       help="max client/server clock difference in seconds; 0 disables")
    serve.add_argument("--seed-users", type=Path, default=None,
                       help="JSON file of {username: password} pairs loaded at startup")
    serve.add_argument("--static-dir", type=Path, default=None,
                       help="directory of static frontend files to serve at /")
    serve.set_defaults(handler=cmd_serve)

    return parser


def cmd_replay(args: argparse.Namespace) -> int:
    result = _replay_file(args.events_file)
    if result is None:
        return EXIT_INPUT
    log_lines, stats_line, metrics = result
    if args.as_json:
        print(json.dumps(
            {"log_lines": log_lines, "stats_line": stats_line, "metrics": vars(metrics)}
        ))
    else:
        for line in log_lines:
            print(line)
        print(stats_line)
    return EXIT_OK


def cmd_analyze(args: argparse.Namespace) -> int:
    result = _replay_file(args.events_file)
    if result is None:
        return EXIT_INPUT
    _, stats_line, metrics = result
    if args.as_json:
        print(json.dumps({"stats_line": stats_line, "metrics": vars(metrics)}))
    else:
        print(stats_line)
    return EXIT_OK


def _replay_file(path: Path):
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        print(f"error: cannot read {path}: {exc}", file=sys.stderr)
        return None
    try:
        events = events_from_json(text)
    except MalformedEventError as exc:
        print(f"error: {path}: {exc}", file=sys.stderr)
        return None
    state = replay_events(events)
    cleaned = clean_log(state.raw_log)
    metrics = analyze_log(cleaned, state.previous_text, state.counters())
    log_lines = [render_entry(e) for e in cleaned.entries]
    return log_lines, render_stats(metrics), metrics


def cmd_clean(args: argparse.Namespace) -> int:
    try:
        text = args.raw_log_file.read_text(encoding="utf-8")
    except OSError as exc:
        print(f"error: cannot read {args.raw_log_file}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        raw = parse_log(text)
    except LogParseError as exc:
        print(f"error: {args.raw_log_file}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    cleaned = clean_log(list(raw.entries))
    if args.as_json:
        print(json.dumps({"log_lines": [render_entry(e) for e in cleaned.entries]}))
    else:
        output = render_log(cleaned)
        if output:
            print(output)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    if args.server:
        return _verify_remote(args)
    store = Store(args.data_dir)
    try:
        cert = store.verify(args.certificate_id)
    except InvalidIdError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_FOUND
    payload = {
        "certificate_id": cert.certificate_id,
        "document_name": cert.document_name,
        "author": cert.author,
        "issued_at": cert.issued_at.isoformat(timespec="milliseconds"),
        "stats_line": cert.stats_line,
        "log_lines": [render_entry(e) for e in cert.cleaned_log.entries],
    }
    _print_certificate(payload, args.as_json)
    return EXIT_OK


def _verify_remote(args: argparse.Namespace) -> int:
    import httpx

    url = args.server.rstrip("/") + f"/certificates/{args.certificate_id}"
    try:
        response = httpx.get(url)
    except httpx.HTTPError as exc:
        print(f"error: cannot reach {args.server}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if response.status_code == 404:
        print(f"error: certificate {args.certificate_id} not found", file=sys.stderr)
        return EXIT_NOT_FOUND
    if response.status_code != 200:
        print(f"error: server returned {response.status_code}: {response.text}",
              file=sys.stderr)
        return EXIT_INPUT
    _print_certificate(response.json(), args.as_json)
    return EXIT_OK


def _print_certificate(payload: dict, as_json: bool) -> None:
    if as_json:
        print(json.dumps(payload))
        return
    print(f"{payload['document_name']} , by {payload['author']}")
    print(payload["stats_line"])
    for line in payload["log_lines"]:
        print(line)


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    store = Store(args.data_dir)
    if args.seed_users is not None:
        seeds = json.loads(args.seed_users.read_text(encoding="utf-8"))
        for username, password in seeds.items():
            store.add_user(username, password)
    app = create_app(
        store,
        token_ttl_seconds=args.token_ttl,
        max_skew_seconds=args.max_skew if args.max_skew > 0 else None,
        static_dir=str(args.static_dir) if args.static_dir else None,
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
