"""Command line entry points."""

from __future__ import annotations

import argparse


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="litmine")
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the annotation service")
    serve.add_argument("--config", default=None, help="YAML config file")
    serve.add_argument("--host", default=None)
    serve.add_argument("--port", type=int, default=None)

    fixtures = sub.add_parser("make-fixtures",
                              help="write the synthetic PDF corpus")
    fixtures.add_argument("out_dir")

    args = parser.parse_args(argv)

    if args.command == "serve":
        import uvicorn

        from .api import app_from_config
        from .config import load_config

        config = load_config(args.config)
        if args.host is not None:
            config.host = args.host
        if args.port is not None:
            config.port = args.port
        uvicorn.run(app_from_config(config), host=config.host,
                    port=config.port, log_level="info")
        return 0

    if args.command == "make-fixtures":
        from .fixturegen import generate_corpus

        paths = generate_corpus(args.out_dir)
        for path in paths:
            print(path)
        return 0

    return 2


if __name__ == "__main__":
    raise SystemExit(main())
