"""Adapter configuration: service endpoints, retry policy, cache location.

Model endpoints are configuration, not code.  Each service entry names a base
URL, a model identifier, and the environment variable holding its credential
(sent as a bearer token when set).  Remote outputs are inherently
nondeterministic, so correctness downstream is defined by schema validity;
byte-level reproducibility comes from the on-disk response cache.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path


@dataclass(frozen=True)
class ServiceConfig:
    base_url: str
    model: str
    api_key_env: str


@dataclass(frozen=True)
class RetryPolicy:
    max_attempts: int = 3
    backoff_s: float = 1.0

    def __post_init__(self):
        if self.max_attempts < 1:
            raise ValueError(f"max_attempts must be >= 1, got {self.max_attempts}")
        if self.backoff_s < 0:
            raise ValueError(f"backoff_s must be >= 0, got {self.backoff_s}")


@dataclass(frozen=True)
class AdapterConfig:
    llm: ServiceConfig = field(
        default_factory=lambda: ServiceConfig(
            base_url="http://localhost:8801/generate",
            model="llama-3.1-70b-instruct",
            api_key_env="SCENE_LLM_API_KEY",
        )
    )
    vlm: ServiceConfig = field(
        default_factory=lambda: ServiceConfig(
            base_url="http://localhost:8802/generate",
            model="gemini-2.0-flash",
            api_key_env="SCENE_VLM_API_KEY",
        )
    )
    audio: ServiceConfig = field(
        default_factory=lambda: ServiceConfig(
            base_url="http://localhost:8803/classify",
            model="clap-htsat",
            api_key_env="SCENE_AUDIO_API_KEY",
        )
    )
    cache_dir: str = ".scene-adapter-cache"
    retry: RetryPolicy = field(default_factory=RetryPolicy)
    attribute_template: str = "object_attributes"
    box_template: str = "box_dimensions"


def _service_from_dict(base: ServiceConfig, raw: dict, path: str) -> ServiceConfig:
    unknown = set(raw) - {"base_url", "model", "api_key_env"}
    if unknown:
        raise ValueError(f"{path}: unknown keys {sorted(unknown)}")
    return replace(base, **raw)


def load_config(path: str | Path) -> AdapterConfig:
    """Config file (JSON) overriding any subset of the defaults."""
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    cfg = AdapterConfig()
    updates = {}
    for key in ("llm", "vlm", "audio"):
        if key in raw:
            updates[key] = _service_from_dict(getattr(cfg, key), raw[key], key)
    if "cache_dir" in raw:
        updates["cache_dir"] = str(raw["cache_dir"])
    if "retry" in raw:
        updates["retry"] = RetryPolicy(**raw["retry"])
    for key in ("attribute_template", "box_template"):
        if key in raw:
            updates[key] = str(raw[key])
    unknown = set(raw) - {"llm", "vlm", "audio", "cache_dir", "retry", "attribute_template", "box_template"}
    if unknown:
        raise ValueError(f"config: unknown keys {sorted(unknown)}")
    return replace(cfg, **updates)
