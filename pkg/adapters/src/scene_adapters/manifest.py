"""Stimulus manifest: what to parse for one scenario.

Format (JSON):

    {
      "scenario_id": "demo",
      "objects": ["water bottle", "coins"],
      "boxes": [
        {"id": "box_left", "label": "left", "audio_clip": "clips/left.wav"},
        {"id": "box_right", "label": "right", "audio_clip": "clips/right.wav"}
      ],
      "first_frame": "frames/first.png"
    }

Relative paths resolve against the manifest's directory.  The audio track is
expected pre-segmented into one clip per box; `first_frame` is optional in the
format but required to build a scene, because box dimensions come from vision.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .errors import ManifestError


@dataclass(frozen=True)
class BoxStimulus:
    id: str
    label: str
    audio_clip: Path


@dataclass(frozen=True)
class StimulusManifest:
    scenario_id: str
    objects: tuple[str, ...]
    boxes: tuple[BoxStimulus, ...]
    first_frame: Path | None


def load_manifest(path: str | Path) -> StimulusManifest:
    """Parse and validate a manifest; every referenced file must exist."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ManifestError(f"cannot read manifest {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ManifestError(f"malformed manifest {path}: {exc}") from exc

    for key in ("scenario_id", "objects", "boxes"):
        if key not in raw:
            raise ManifestError(f"manifest missing required key {key!r}")
    objects = tuple(str(name) for name in raw["objects"])
    if not objects:
        raise ManifestError("manifest object list is empty")
    if len(set(objects)) != len(objects):
        raise ManifestError("manifest object names must be unique")

    base = path.parent
    boxes = []
    seen = set()
    for i, entry in enumerate(raw["boxes"]):
        for key in ("id", "audio_clip"):
            if key not in entry:
                raise ManifestError(f"boxes[{i}] missing required key {key!r}")
        box_id = str(entry["id"])
        if box_id in seen:
            raise ManifestError(f"duplicate box id {box_id!r}")
        seen.add(box_id)
        clip = base / str(entry["audio_clip"])
        if not clip.is_file():
            raise ManifestError(f"boxes[{i}].audio_clip: no such file {clip}")
        boxes.append(BoxStimulus(id=box_id, label=str(entry.get("label", box_id)), audio_clip=clip))
    if not boxes:
        raise ManifestError("manifest box list is empty")

    first_frame = None
    if raw.get("first_frame") is not None:
        first_frame = base / str(raw["first_frame"])
        if not first_frame.is_file():
            raise ManifestError(f"first_frame: no such file {first_frame}")

    return StimulusManifest(
        scenario_id=str(raw["scenario_id"]),
        objects=objects,
        boxes=tuple(boxes),
        first_frame=first_frame,
    )
