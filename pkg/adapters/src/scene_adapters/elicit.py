"""The three elicitation calls: object attributes, box dimensions, audio posteriors.

Each call goes through the caching client and parses the service's answer into
the scene-document fragments the pipeline composes.  Parsing is strict: a
response missing a field fails loudly with the raw text attached, rather than
guessing defaults.
"""

from __future__ import annotations

import base64
import json
import math
from importlib import resources
from pathlib import Path

from .client import ServiceClient
from .errors import ResponseParseError, ServiceError


def _template(name: str) -> str:
    return resources.files("scene_adapters").joinpath(f"templates/{name}.txt").read_text(encoding="utf-8")


def _json_payload(text: str, context: str) -> dict:
    """Parse a model's structured output, tolerating surrounding prose/fences."""
    candidate = text.strip()
    if candidate.startswith("```"):
        candidate = candidate.strip("`")
        candidate = candidate[candidate.find("{"):]
    start, end = candidate.find("{"), candidate.rfind("}")
    if start < 0 or end < start:
        raise ResponseParseError(f"{context}: no JSON object in response", raw=text)
    try:
        parsed = json.loads(candidate[start : end + 1])
    except json.JSONDecodeError as exc:
        raise ResponseParseError(f"{context}: invalid JSON in response: {exc}", raw=text) from exc
    if not isinstance(parsed, dict):
        raise ResponseParseError(f"{context}: expected a JSON object", raw=text)
    return parsed


def _require(parsed: dict, key: str, context: str, raw: str):
    if key not in parsed:
        raise ResponseParseError(f"{context}: response missing field {key!r}", raw=raw)
    return parsed[key]


def _dims_from(parsed: dict, context: str, raw: str) -> dict:
    dims = _require(parsed, "dims_cm", context, raw)
    mean = _require(dims, "mean", f"{context}.dims_cm", raw)
    std = _require(dims, "std", f"{context}.dims_cm", raw)
    if len(mean) != 3 or len(std) != 3:
        raise ResponseParseError(f"{context}.dims_cm: mean and std must each have 3 entries", raw=raw)
    mean = [float(v) for v in mean]
    std = [float(v) for v in std]
    if any(not math.isfinite(v) or v <= 0 for v in mean):
        raise ResponseParseError(f"{context}.dims_cm.mean: entries must be finite and positive", raw=raw)
    if any(not math.isfinite(v) or v < 0 for v in std):
        raise ResponseParseError(f"{context}.dims_cm.std: entries must be finite and non-negative", raw=raw)
    return {"mean": mean, "std": std}


def elicit_object_attributes(names: list[str], client: ServiceClient, template: str = "object_attributes") -> list[dict]:
    """One scene-document object entry per name, via the language model."""
    prompt_template = _template(template)
    out = []
    for name in names:
        prompt = prompt_template.replace("{name}", name)
        response = client.post("llm", client.config.llm, {"prompt": prompt})
        text = response.get("text", "")
        context = f"object {name!r}"
        parsed = _json_payload(text, context)
        weight = _require(parsed, "weight_g", context, text)
        rigidity = float(_require(parsed, "rigidity", context, text))
        if not 0 < rigidity <= 1:
            raise ResponseParseError(f"{context}: rigidity {rigidity} outside (0, 1]", raw=text)
        weight_mean = float(_require(weight, "mean", f"{context}.weight_g", text))
        weight_std = float(_require(weight, "std", f"{context}.weight_g", text))
        if weight_mean <= 0 or weight_std < 0:
            raise ResponseParseError(f"{context}.weight_g: mean must be > 0 and std >= 0", raw=text)
        out.append(
            {
                "name": name,
                "dims": _dims_from(parsed, context, text),
                "weight_g": {"mean": weight_mean, "std": weight_std},
                "material": str(_require(parsed, "material", context, text)),
                "rigidity": rigidity,
            }
        )
    return out


def estimate_box_dims(
    frame_image: str | Path,
    box_ids: list[str],
    labels: list[str],
    client: ServiceClient,
    template: str = "box_dimensions",
) -> list[dict]:
    """One scene-document box entry per id, via the vision model on the first frame."""
    frame_image = Path(frame_image)
    try:
        image_b64 = base64.b64encode(frame_image.read_bytes()).decode("ascii")
    except OSError as exc:
        raise ServiceError(f"cannot read frame image {frame_image}: {exc}") from exc
    prompt = _template(template).replace("{count}", str(len(box_ids)))
    response = client.post("vlm", client.config.vlm, {"prompt": prompt, "image_b64": image_b64})
    text = response.get("text", "")
    parsed = _json_payload(text, "box estimate")
    boxes = _require(parsed, "boxes", "box estimate", text)
    if len(boxes) != len(box_ids):
        raise ResponseParseError(
            f"box estimate: expected {len(box_ids)} boxes, response has {len(boxes)}", raw=text
        )
    return [
        {"id": box_id, "label": label, "dims": _dims_from(entry, f"boxes[{i}]", text)}
        for i, (box_id, label, entry) in enumerate(zip(box_ids, labels, boxes))
    ]


def classify_audio(clip: str | Path, labels: list[str], client: ServiceClient) -> list[float]:
    """Probability vector over labels for one audio clip, renormalized to sum 1."""
    if not labels:
        raise ValueError("labels must be non-empty")
    clip = Path(clip)
    try:
        audio_b64 = base64.b64encode(clip.read_bytes()).decode("ascii")
    except OSError as exc:
        raise ServiceError(f"cannot read audio clip {clip}: {exc}") from exc
    response = client.post("audio", client.config.audio, {"labels": list(labels), "audio_b64": audio_b64})
    scores = response.get("scores")
    if scores is None:
        raise ResponseParseError("audio classification: response missing field 'scores'", raw=json.dumps(response))
    if len(scores) != len(labels):
        raise ResponseParseError(
            f"audio classification: {len(scores)} scores for {len(labels)} labels", raw=json.dumps(response)
        )
    scores = [float(s) for s in scores]
    if any(not math.isfinite(s) or s < 0 for s in scores):
        raise ResponseParseError("audio classification: scores must be finite and non-negative",
                                 raw=json.dumps(response))
    total = math.fsum(scores)
    if total <= 0:
        raise ResponseParseError("audio classification: scores sum to zero", raw=json.dumps(response))
    return [s / total for s in scores]  # some services return unnormalized scores
