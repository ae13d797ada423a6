from __future__ import annotations

import json
from pathlib import Path

import pytest

pytest.importorskip("scene_adapters")

import httpx
from adapter_stubs import stub_handler

from scene_adapters.config import AdapterConfig, RetryPolicy, ServiceConfig


@pytest.fixture
def stub_transport() -> httpx.MockTransport:
    return httpx.MockTransport(stub_handler)


@pytest.fixture
def adapter_config(tmp_path) -> AdapterConfig:
    return AdapterConfig(
        llm=ServiceConfig("http://stub.test/llm", "stub-llm", "SCENE_LLM_API_KEY"),
        vlm=ServiceConfig("http://stub.test/vlm", "stub-vlm", "SCENE_VLM_API_KEY"),
        audio=ServiceConfig("http://stub.test/audio", "stub-audio", "SCENE_AUDIO_API_KEY"),
        cache_dir=str(tmp_path / "cache"),
        retry=RetryPolicy(max_attempts=3, backoff_s=0.0),
    )


@pytest.fixture
def sample_manifest_path(tmp_path) -> Path:
    clips = tmp_path / "clips"
    clips.mkdir()
    (clips / "left.wav").write_bytes(b"RIFF....SLOSH....")
    (clips / "right.wav").write_bytes(b"RIFF....JINGLE....")
    frame = tmp_path / "first.png"
    frame.write_bytes(b"\x89PNG\r\n\x1a\nfakeimagebytes")
    manifest = {
        "scenario_id": "demo-2obj",
        "objects": ["water bottle", "coins"],
        "boxes": [
            {"id": "box_left", "label": "left", "audio_clip": "clips/left.wav"},
            {"id": "box_right", "label": "right", "audio_clip": "clips/right.wav"},
        ],
        "first_frame": "first.png",
    }
    path = tmp_path / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2), encoding="utf-8")
    return path
