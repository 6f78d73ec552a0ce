"""Server entry point: `meflex-server`."""
from __future__ import annotations

import argparse
import os
import sys

from .agents import load_agent_roles
from .errors import ProviderError
from .provider import CompletionResult, PromptBundle, provider_from_env
from .service import create_app
from .store import ProjectRegistry, load_topics


class UnconfiguredProvider:
    """Stands in when no LLM endpoint is configured. Every non-chat feature
    keeps working; chat endpoints fail with a clear provider_error."""

    def complete(self, bundle: PromptBundle) -> CompletionResult:
        raise ProviderError(
            "no LLM provider configured; set LLM_BASE_URL (and LLM_API_KEY)"
        )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="meflex-server",
        description="HTTP backend for the business-plan ideation canvas.",
    )
    parser.add_argument("--port", type=int, default=8787, help="listen port")
    parser.add_argument("--host", default="127.0.0.1", help="bind address")
    parser.add_argument(
        "--data-dir", default="./meflex-data", help="directory for project files"
    )
    parser.add_argument(
        "--agents-config", default=None, help="JSON file overriding agent templates"
    )
    parser.add_argument(
        "--topics-config", default=None, help="JSON file overriding the topic catalog"
    )
    parser.add_argument(
        "--cors-origin",
        action="append",
        default=[],
        metavar="ORIGIN",
        help="origin allowed by CORS (repeatable)",
    )
    parser.add_argument(
        "--auto-meta-reflection",
        action="store_true",
        help="generate a meta-reflection automatically when a node is extended",
    )
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)

    roles = load_agent_roles(args.agents_config)
    topics = load_topics(args.topics_config)
    registry = ProjectRegistry(data_dir=args.data_dir)

    if os.environ.get("LLM_BASE_URL"):
        provider = provider_from_env()
    else:
        provider = UnconfiguredProvider()
        print(
            "warning: LLM_BASE_URL not set; chat endpoints will return provider_error",
            file=sys.stderr,
        )

    app = create_app(
        registry=registry,
        roles=roles,
        provider=provider,
        topics=topics,
        cors_origins=args.cors_origin,
        auto_meta_reflection=args.auto_meta_reflection,
    )

    import uvicorn

    try:
        uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    finally:
        registry.flush_all()
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
