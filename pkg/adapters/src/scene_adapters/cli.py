"""witb-parse: turn a stimulus manifest into a scene document via model services.

Credentials come from environment variables (SCENE_LLM_API_KEY,
SCENE_VLM_API_KEY, SCENE_AUDIO_API_KEY by default; configurable per service).
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .config import AdapterConfig, load_config
from .errors import AdapterError
from .manifest import load_manifest
from .pipeline import build_scene


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="witb-parse", description=__doc__.splitlines()[0])
    parser.add_argument("--manifest", required=True, help="stimulus manifest path")
    parser.add_argument("--out", required=True, help="scene document output path")
    parser.add_argument("--config", default=None, help="JSON config overriding service endpoints")
    parser.add_argument("--cache-dir", default=None, help="response cache directory")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        config = load_config(args.config) if args.config else AdapterConfig()
        if args.cache_dir:
            config = replace(config, cache_dir=args.cache_dir)
        manifest = load_manifest(args.manifest)
        document = build_scene(manifest, config)
        Path(args.out).write_text(document, encoding="utf-8", newline="\n")
    except AdapterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
