"""Command line surface: crawl, ingest-assets, serve, ask, inspect.

Exit codes: 0 success, 1 usage error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import store as store_mod
from .config import AppConfig, ConfigError, load_config

USAGE_EXIT = 1
RUNTIME_EXIT = 2


class _Parser(argparse.ArgumentParser):
    """argparse defaults usage failures to exit code 2; this contract wants 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(USAGE_EXIT)


def _build_parser() -> _Parser:
    parser = _Parser(prog="talk2x", description="Turn a website into a cited chat agent.")
    sub = parser.add_subparsers(dest="command", required=True)

    crawl = sub.add_parser("crawl", help="crawl a site into the website collection")
    crawl.add_argument("--seed", required=True, help="absolute http(s) URL to start from")
    crawl.add_argument("--out", required=True, help="store directory to write")
    crawl.add_argument("--max-pages", type=int, default=64)
    crawl.add_argument("--max-depth", type=int, default=3)
    crawl.add_argument("--chunk-size", type=int, default=1000)
    crawl.add_argument("--overlap", type=int, default=200)
    crawl.add_argument("--embedder", choices=["local", "remote"], default="local")
    crawl.add_argument("--config", help="config file (embedding endpoint, dimension, ...)")
    crawl.add_argument("--no-robots", action="store_true", help="ignore robots.txt (owned fixtures)")

    ingest = sub.add_parser("ingest-assets", help="import an asset catalog into the assets collection")
    source = ingest.add_mutually_exclusive_group(required=True)
    source.add_argument("--input", help="delimited catalog file")
    source.add_argument("--api", help="paged JSON catalog API URL")
    ingest.add_argument("--out", required=True, help="store directory to write")
    ingest.add_argument("--backfill", action="store_true", help="synthesize missing descriptions/keywords")
    ingest.add_argument("--llm-endpoint", help="chat endpoint used for backfill")
    ingest.add_argument("--embedder", choices=["local", "remote"], default="local")
    ingest.add_argument("--staging-dir", help="directory for the tabular staging files")
    ingest.add_argument("--config", help="config file")

    serve = sub.add_parser("serve", help="serve the chat HTTP API")
    serve.add_argument("--store", required=True, help="persisted store directory")
    serve.add_argument("--config", required=True, help="config file")
    serve.add_argument("--port", type=int, default=8080)
    serve.add_argument("--host", default="127.0.0.1")

    ask = sub.add_parser("ask", help="one-shot question against a store")
    ask.add_argument("--store", required=True, help="persisted store directory")
    ask.add_argument("--config", help="config file")
    ask.add_argument("question", help="the question to ask")

    inspect = sub.add_parser("inspect", help="show collection counts and sample records")
    inspect.add_argument("--store", required=True, help="persisted store directory")
    return parser


def _config_from(args) -> AppConfig:
    if getattr(args, "config", None):
        return load_config(args.config)
    return load_config(None)


def _load_or_new_store(out_dir: Path) -> store_mod.VectorStore:
    if (out_dir / store_mod.MANIFEST_NAME).exists():
        return store_mod.load(out_dir)
    return store_mod.VectorStore()


def _ensure_collection(store: store_mod.VectorStore, name: str, dimension: int) -> None:
    """Create `name` at `dimension`, refusing to mix dimensions within one store."""
    for existing in store.collections.values():
        if existing.dimension != dimension:
            raise store_mod.StoreError(
                f"store already holds {existing.name!r} at dimension {existing.dimension}; "
                f"cannot add {name!r} at dimension {dimension}"
            )
    if name not in store.collections:
        store.create_collection(name, dimension)


def _make_embedder(kind: str, config: AppConfig):
    from .embedding import EmbedderConfig, create_embedder

    provider = "local-hash" if kind == "local" else "remote"
    return create_embedder(
        EmbedderConfig(
            provider=provider,
            dimension=config.dimension,
            endpoint=config.embed_endpoint or None,
            model_name=config.embed_model or None,
            request_timeout=config.request_timeout,
        )
    )


def _cmd_crawl(args) -> int:
    from .website import ChunkingPolicy, CrawlConfig, build_website_collection, crawl

    config = _config_from(args)
    out_dir = Path(args.out)
    store = _load_or_new_store(out_dir)
    if store.count("website"):
        print(f"store at {out_dir} already holds a website collection; "
              "re-crawl into a fresh directory", file=sys.stderr)
        return RUNTIME_EXIT
    embedder = _make_embedder(args.embedder, config)
    _ensure_collection(store, "website", embedder.dimension)

    pages = crawl(
        CrawlConfig(
            seed=args.seed,
            max_pages=args.max_pages,
            max_depth=args.max_depth,
            respect_robots=not args.no_robots,
        )
    )
    policy = ChunkingPolicy(max_chars=args.chunk_size, overlap_chars=args.overlap)
    report = build_website_collection(pages, embedder, store, policy)
    store.persist(out_dir)
    report_dict = report.to_dict()
    (out_dir / "crawl_report.json").write_text(
        json.dumps(report_dict, indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
    )
    print(json.dumps(report_dict, indent=2, ensure_ascii=False))
    return 0


def _cmd_ingest_assets(args) -> int:
    from .assets import (
        AssetStagingStore,
        backfill_missing,
        build_asset_collection,
        import_catalog,
    )
    from .llm import HttpChatClient, load_script

    config = _config_from(args)
    out_dir = Path(args.out)
    store = _load_or_new_store(out_dir)
    if store.count("assets"):
        print(f"store at {out_dir} already holds an assets collection; "
              "re-ingest into a fresh directory", file=sys.stderr)
        return RUNTIME_EXIT
    embedder = _make_embedder(args.embedder, config)
    _ensure_collection(store, "assets", embedder.dimension)

    imported = import_catalog(args.input or args.api)
    rows = imported.rows

    backfill_report = None
    if args.backfill:
        if args.llm_endpoint:
            llm = HttpChatClient(args.llm_endpoint, config.llm_model, timeout=config.request_timeout)
        elif config.llm == "scripted" and config.llm_script:
            llm = load_script(config.llm_script, loop_last=config.llm_script_loop)
        elif config.llm_endpoint:
            llm = HttpChatClient(config.llm_endpoint, config.llm_model, timeout=config.request_timeout)
        else:
            print("backfill needs --llm-endpoint or an llm configured in the config file",
                  file=sys.stderr)
            return USAGE_EXIT
        result = backfill_missing(rows, llm)
        rows, backfill_report = result.rows, result.report

    staging = AssetStagingStore(args.staging_dir or out_dir / "staging")
    staging.save(rows)

    report = build_asset_collection(rows, embedder, store)
    report.rejected = imported.rejected
    report.backfill = backfill_report
    store.persist(out_dir)
    report_dict = report.to_dict()
    (out_dir / "assets_report.json").write_text(
        json.dumps(report_dict, indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
    )
    print(json.dumps(report_dict, indent=2, ensure_ascii=False))
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app, load_engine

    config = load_config(args.config)
    engine = load_engine(args.store, config)
    app = create_app(engine, cors_origins=config.cors_origins)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def _cmd_ask(args) -> int:
    from . import agent as agent_mod
    from .service import load_engine

    config = _config_from(args)
    engine = load_engine(args.store, config)
    session = engine.sessions.create()
    answer = agent_mod.run_turn(
        session, args.question, engine.llm, engine.store, engine.embedder, engine.agent_config
    )
    print(answer.text)
    print()
    print("Sources:")
    for url in answer.sources:
        print(f"- {url}")
    if answer.degraded:
        print("(degraded: search budget exhausted)")
    return 0


def _cmd_inspect(args) -> int:
    store = store_mod.load(args.store)
    for name in store_mod.COLLECTION_NAMES:
        count = store.count(name)
        print(f"{name}: {count} records")
        if count:
            sample = store.collection(name).records[0]
            text = sample.text.replace("\n", " ")
            if len(text) > 100:
                text = text[:100] + "..."
            print(f"  sample [id {sample.id}] source={sample.metadata.get('source', '')}")
            print(f"  text: {text}")
    return 0


_COMMANDS = {
    "crawl": _cmd_crawl,
    "ingest-assets": _cmd_ingest_assets,
    "serve": _cmd_serve,
    "ask": _cmd_ask,
    "inspect": _cmd_inspect,
}


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"talk2x: config error: {exc}", file=sys.stderr)
        return RUNTIME_EXIT
    except Exception as exc:  # noqa: BLE001 - CLI boundary reports, never tracebacks
        print(f"talk2x: error: {exc}", file=sys.stderr)
        return RUNTIME_EXIT


if __name__ == "__main__":
    sys.exit(main())
