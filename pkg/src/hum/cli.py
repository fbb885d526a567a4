"""Command line entry points: ``hum repl``, ``hum run``, ``hum serve``."""

from __future__ import annotations

import argparse
import sys


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="hum", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("repl", help="interactive command loop")

    run_p = sub.add_parser("run", help="execute a script of commands")
    run_p.add_argument("script")
    run_p.add_argument("--verify", action="store_true",
                       help="cross-check every query against the brute-force oracle")
    run_p.add_argument("--keep-going", action="store_true",
                       help="continue past failing commands")

    serve_p = sub.add_parser("serve", help="start the JSON session service")
    serve_p.add_argument("--port", type=int, default=8741)
    serve_p.add_argument("--host", default="127.0.0.1")

    args = parser.parse_args(argv)

    if args.command == "repl":
        from .session import repl
        return repl()
    if args.command == "run":
        from .session import run_script
        status, _ = run_script(args.script, verify=args.verify,
                               keep_going=args.keep_going, out=sys.stdout)
        return status
    if args.command == "serve":
        import uvicorn

        from .service.app import create_app
        uvicorn.run(create_app(), host=args.host, port=args.port, log_level="warning")
        return 0
    return 2


if __name__ == "__main__":
    raise SystemExit(main())
