"""Compose the three elicitation results into a scene document.

The output follows the engine's published scene format exactly and is checked
against the engine's shipped JSON Schema before being returned; the engine is
consumed only through that file contract (and its CLI), never its Python API.
"""

from __future__ import annotations

import json
from importlib import resources

import jsonschema

from .client import ServiceClient
from .config import AdapterConfig
from .elicit import classify_audio, elicit_object_attributes, estimate_box_dims
from .errors import ManifestError, SchemaValidationError
from .manifest import StimulusManifest


def engine_scene_schema() -> dict:
    """The inference engine's shipped scene schema (its installed package is the source)."""
    try:
        text = resources.files("boxinfer").joinpath("schemas/scene.schema.json").read_text(encoding="utf-8")
    except ModuleNotFoundError as exc:
        raise SchemaValidationError(
            "the boxinfer package must be installed to validate against its scene schema"
        ) from exc
    return json.loads(text)


def build_scene_document(manifest: StimulusManifest, client: ServiceClient) -> dict:
    """Scene document dict for one stimulus; raises before any network call on bad inputs."""
    if manifest.first_frame is None:
        raise ManifestError(
            f"manifest {manifest.scenario_id!r} has no first_frame image; box dimensions need vision"
        )

    cfg = client.config
    objects = elicit_object_attributes(list(manifest.objects), client, template=cfg.attribute_template)
    boxes = estimate_box_dims(
        manifest.first_frame,
        [b.id for b in manifest.boxes],
        [b.label for b in manifest.boxes],
        client,
        template=cfg.box_template,
    )
    labels = list(manifest.objects)
    rows = {b.id: classify_audio(b.audio_clip, labels, client) for b in manifest.boxes}

    doc = {
        "scenario_id": manifest.scenario_id,
        "objects": objects,
        "boxes": boxes,
        "audio_posterior": {"labels": labels, "rows": rows},
    }
    validator = jsonschema.Draft202012Validator(engine_scene_schema())
    problems = sorted(validator.iter_errors(doc), key=lambda e: list(e.path))
    if problems:
        details = "; ".join(f"{'.'.join(str(p) for p in e.path)}: {e.message}" for e in problems[:10])
        raise SchemaValidationError(f"composed scene document violates the engine schema: {details}")
    return doc


def render_scene_document(doc: dict) -> str:
    """Byte-stable serialization (cache-warm reruns must reproduce this exactly)."""
    return json.dumps(doc, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def build_scene(manifest: StimulusManifest, config: AdapterConfig, transport=None) -> str:
    """End-to-end: manifest in, serialized scene document out."""
    client = ServiceClient(config=config, transport=transport)
    return render_scene_document(build_scene_document(manifest, client))
