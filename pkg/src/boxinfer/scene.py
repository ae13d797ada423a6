"""Structured scene documents: hidden objects, boxes, and per-box audio posteriors.

Document format (UTF-8 JSON, lengths in centimeters, weights in grams):

    {
      "scenario_id": "...",
      "objects": [
        {"name": "...", "dims": {"mean": [x, y, z], "std": [x, y, z]},
         "weight_g": {"mean": m, "std": s}, "material": "...", "rigidity": r}
      ],
      "boxes": [
        {"id": "...", "label": "...", "dims": {"mean": [x, y, z], "std": [x, y, z]}}
      ],
      "audio_posterior": {"labels": ["..."], "rows": {"<box id>": [p, ...]}}
    }

Each audio row is a probability vector over `labels` (which must name exactly
the scene's objects) and must sum to 1 within 1e-6.  A JSON Schema describing
the same contract ships at ``boxinfer/schemas/scene.schema.json``.

Unknown fields warn rather than fail so upstream document emitters can evolve.
``weight_g`` and ``material`` are carried but consumed by no likelihood.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass
from importlib import resources

from .errors import SceneFormatError, SceneValidationError

ROW_SUM_TOL = 1e-6


class UnknownFieldWarning(UserWarning):
    """A scene document carried a field this version does not understand."""


@dataclass(frozen=True)
class UncertainScalar:
    mean: float
    std: float


@dataclass(frozen=True)
class UncertainDims:
    """Axis-aligned extents with per-axis normal uncertainty."""

    mean: tuple[float, float, float]
    std: tuple[float, float, float]


@dataclass(frozen=True)
class ObjectSpec:
    name: str
    dims: UncertainDims
    weight_g: UncertainScalar
    material: str
    rigidity: float  # fraction of each nominal extent the object can compress to


@dataclass(frozen=True)
class BoxSpec:
    id: str
    label: str
    dims: UncertainDims


@dataclass(frozen=True)
class AudioPosterior:
    """Per-box classifier posteriors over the scene's object labels."""

    labels: tuple[str, ...]
    rows: dict[str, tuple[float, ...]]  # box id -> probability per label

    def row_for(self, box_id: str, object_names: tuple[str, ...]) -> tuple[float, ...]:
        """This box's probabilities reordered to follow `object_names`."""
        by_label = dict(zip(self.labels, self.rows[box_id]))
        return tuple(by_label[name] for name in object_names)


@dataclass(frozen=True)
class ParsedScene:
    scenario_id: str
    objects: tuple[ObjectSpec, ...]
    boxes: tuple[BoxSpec, ...]
    audio: AudioPosterior

    @property
    def n_objects(self) -> int:
        return len(self.objects)

    @property
    def k_boxes(self) -> int:
        return len(self.boxes)

    def object_names(self) -> tuple[str, ...]:
        return tuple(o.name for o in self.objects)

    def box_ids(self) -> tuple[str, ...]:
        return tuple(b.id for b in self.boxes)

    def audio_row(self, box_id: str) -> tuple[float, ...]:
        """Audio posterior for one box, aligned with the scene's object order."""
        return self.audio.row_for(box_id, self.object_names())


@dataclass(frozen=True)
class Violation:
    """One broken invariant, located by a document path."""

    path: str
    message: str

    def __str__(self) -> str:
        return f"{self.path}: {self.message}"


def schema_path():
    """Filesystem path of the shipped scene JSON Schema."""
    return resources.files("boxinfer").joinpath("schemas/scene.schema.json")


# --- document parsing -------------------------------------------------------

_TOP_KEYS = {"scenario_id", "objects", "boxes", "audio_posterior"}
_OBJECT_KEYS = {"name", "dims", "weight_g", "material", "rigidity"}
_BOX_KEYS = {"id", "label", "dims"}
_DIMS_KEYS = {"mean", "std"}
_WEIGHT_KEYS = {"mean", "std"}
_AUDIO_KEYS = {"labels", "rows"}


def _warn_unknown(mapping: dict, known: set, path: str) -> None:
    for key in mapping:
        if key not in known:
            warnings.warn(f"{path}.{key}: unknown field ignored", UnknownFieldWarning, stacklevel=3)


def _require(mapping: dict, key: str, path: str):
    if not isinstance(mapping, dict):
        raise SceneFormatError(f"{path}: expected an object, got {type(mapping).__name__}")
    if key not in mapping:
        raise SceneFormatError(f"{path}.{key}: missing required field")
    return mapping[key]


def _as_str(value, path: str) -> str:
    if not isinstance(value, str):
        raise SceneFormatError(f"{path}: expected string, got {type(value).__name__}")
    return value


def _as_number(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SceneFormatError(f"{path}: expected number, got {type(value).__name__}")
    return float(value)


def _as_list(value, path: str) -> list:
    if not isinstance(value, list):
        raise SceneFormatError(f"{path}: expected array, got {type(value).__name__}")
    return value


def _parse_dims(raw, path: str) -> UncertainDims:
    _warn_unknown(raw if isinstance(raw, dict) else {}, _DIMS_KEYS, path)
    mean = _as_list(_require(raw, "mean", path), f"{path}.mean")
    std = _as_list(_require(raw, "std", path), f"{path}.std")
    if len(mean) != 3:
        raise SceneFormatError(f"{path}.mean: expected 3 components, got {len(mean)}")
    if len(std) != 3:
        raise SceneFormatError(f"{path}.std: expected 3 components, got {len(std)}")
    return UncertainDims(
        mean=tuple(_as_number(v, f"{path}.mean[{i}]") for i, v in enumerate(mean)),
        std=tuple(_as_number(v, f"{path}.std[{i}]") for i, v in enumerate(std)),
    )


def _parse_object(raw, path: str) -> ObjectSpec:
    _warn_unknown(raw if isinstance(raw, dict) else {}, _OBJECT_KEYS, path)
    weight_raw = _require(raw, "weight_g", path)
    _warn_unknown(weight_raw if isinstance(weight_raw, dict) else {}, _WEIGHT_KEYS, f"{path}.weight_g")
    return ObjectSpec(
        name=_as_str(_require(raw, "name", path), f"{path}.name"),
        dims=_parse_dims(_require(raw, "dims", path), f"{path}.dims"),
        weight_g=UncertainScalar(
            mean=_as_number(_require(weight_raw, "mean", f"{path}.weight_g"), f"{path}.weight_g.mean"),
            std=_as_number(_require(weight_raw, "std", f"{path}.weight_g"), f"{path}.weight_g.std"),
        ),
        material=_as_str(_require(raw, "material", path), f"{path}.material"),
        rigidity=_as_number(_require(raw, "rigidity", path), f"{path}.rigidity"),
    )


def _parse_box(raw, path: str) -> BoxSpec:
    _warn_unknown(raw if isinstance(raw, dict) else {}, _BOX_KEYS, path)
    return BoxSpec(
        id=_as_str(_require(raw, "id", path), f"{path}.id"),
        label=_as_str(_require(raw, "label", path), f"{path}.label"),
        dims=_parse_dims(_require(raw, "dims", path), f"{path}.dims"),
    )


def _parse_audio(raw, path: str) -> AudioPosterior:
    _warn_unknown(raw if isinstance(raw, dict) else {}, _AUDIO_KEYS, path)
    labels_raw = _as_list(_require(raw, "labels", path), f"{path}.labels")
    labels = tuple(_as_str(v, f"{path}.labels[{i}]") for i, v in enumerate(labels_raw))
    rows_raw = _require(raw, "rows", path)
    if not isinstance(rows_raw, dict):
        raise SceneFormatError(f"{path}.rows: expected an object, got {type(rows_raw).__name__}")
    rows: dict[str, tuple[float, ...]] = {}
    for box_id, row in rows_raw.items():
        row_path = f"{path}.rows.{box_id}"
        row_list = _as_list(row, row_path)
        rows[box_id] = tuple(_as_number(v, f"{row_path}[{i}]") for i, v in enumerate(row_list))
    return AudioPosterior(labels=labels, rows=rows)


def load_scene(text: str) -> ParsedScene:
    """Parse and fully validate a scene document.

    Raises SceneFormatError for structural problems (each message names the
    offending document path) and SceneValidationError, carrying every broken
    invariant, for semantic ones.
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SceneFormatError(f"malformed scene document: {exc}") from exc
    if not isinstance(raw, dict):
        raise SceneFormatError(f"$: expected top-level object, got {type(raw).__name__}")

    _warn_unknown(raw, _TOP_KEYS, "$")
    objects_raw = _as_list(_require(raw, "objects", "$"), "$.objects")
    boxes_raw = _as_list(_require(raw, "boxes", "$"), "$.boxes")
    scene = ParsedScene(
        scenario_id=_as_str(_require(raw, "scenario_id", "$"), "$.scenario_id"),
        objects=tuple(_parse_object(o, f"$.objects[{i}]") for i, o in enumerate(objects_raw)),
        boxes=tuple(_parse_box(b, f"$.boxes[{i}]") for i, b in enumerate(boxes_raw)),
        audio=_parse_audio(_require(raw, "audio_posterior", "$"), "$.audio_posterior"),
    )

    violations = validate_scene(scene)
    if violations:
        raise SceneValidationError(violations)
    return scene


def load_scene_file(path) -> ParsedScene:
    with open(path, encoding="utf-8") as fh:
        return load_scene(fh.read())


# --- semantic validation ----------------------------------------------------

def _finite(values) -> bool:
    return all(math.isfinite(v) for v in values)


def validate_scene(scene: ParsedScene) -> list[Violation]:
    """Collect every invariant violation; an empty list means the scene is valid.

    Violations are data, not failures, and the result does not depend on the
    order of objects or boxes in the scene.
    """
    out: list[Violation] = []
    add = lambda path, msg: out.append(Violation(path, msg))

    if scene.n_objects < 1:
        add("$.objects", "at least one object required")
    if scene.k_boxes < 1:
        add("$.boxes", "at least one box required")

    seen_names: set[str] = set()
    for i, obj in enumerate(scene.objects):
        path = f"$.objects[{i}]"
        if not obj.name:
            add(f"{path}.name", "object name must be non-empty")
        if obj.name in seen_names:
            add(f"{path}.name", f"duplicate object name {obj.name!r}")
        seen_names.add(obj.name)
        if not _finite(obj.dims.mean) or any(m <= 0 for m in obj.dims.mean):
            add(f"{path}.dims.mean", f"mean dimensions must be finite and > 0, got {list(obj.dims.mean)}")
        if not _finite(obj.dims.std) or any(s < 0 for s in obj.dims.std):
            add(f"{path}.dims.std", f"dimension stds must be finite and >= 0, got {list(obj.dims.std)}")
        if not math.isfinite(obj.weight_g.mean) or obj.weight_g.mean <= 0:
            add(f"{path}.weight_g.mean", f"weight mean must be finite and > 0, got {obj.weight_g.mean}")
        if not math.isfinite(obj.weight_g.std) or obj.weight_g.std < 0:
            add(f"{path}.weight_g.std", f"weight std must be finite and >= 0, got {obj.weight_g.std}")
        if not math.isfinite(obj.rigidity) or not 0 < obj.rigidity <= 1:
            add(f"{path}.rigidity", f"rigidity of {obj.name!r} must lie in (0, 1], got {obj.rigidity}")

    seen_ids: set[str] = set()
    for i, box in enumerate(scene.boxes):
        path = f"$.boxes[{i}]"
        if not box.id:
            add(f"{path}.id", "box id must be non-empty")
        if box.id in seen_ids:
            add(f"{path}.id", f"duplicate box id {box.id!r}")
        seen_ids.add(box.id)
        if not _finite(box.dims.mean) or any(m <= 0 for m in box.dims.mean):
            add(f"{path}.dims.mean", f"mean dimensions must be finite and > 0, got {list(box.dims.mean)}")
        if not _finite(box.dims.std) or any(s < 0 for s in box.dims.std):
            add(f"{path}.dims.std", f"dimension stds must be finite and >= 0, got {list(box.dims.std)}")

    names = set(seen_names)
    labels = scene.audio.labels
    label_set = set(labels)
    if len(labels) != len(label_set):
        add("$.audio_posterior.labels", "duplicate labels")
    for label in labels:
        if label not in names:
            add("$.audio_posterior.labels", f"label {label!r} names no object in the scene")
    for name in sorted(names - label_set):
        add("$.audio_posterior.labels", f"object {name!r} missing from labels")

    box_ids = set(seen_ids)
    for box_id in sorted(set(scene.audio.rows) - box_ids):
        add(f"$.audio_posterior.rows.{box_id}", "row names no box in the scene")
    for box_id in sorted(box_ids - set(scene.audio.rows)):
        add(f"$.audio_posterior.rows.{box_id}", "missing audio row for this box")
    for box_id in sorted(set(scene.audio.rows) & box_ids):
        row = scene.audio.rows[box_id]
        path = f"$.audio_posterior.rows.{box_id}"
        if len(row) != len(labels):
            add(path, f"row has {len(row)} entries for {len(labels)} labels")
            continue
        if not _finite(row) or any(p < 0 for p in row):
            add(path, f"row entries must be finite and >= 0, got {list(row)}")
            continue
        total = math.fsum(row)
        if abs(total - 1.0) > ROW_SUM_TOL:
            add(path, f"row for box {box_id!r} sums to {total!r}, expected 1 within {ROW_SUM_TOL}")

    return out


# --- serialization ----------------------------------------------------------

def scene_to_dict(scene: ParsedScene) -> dict:
    """Plain-dict form of a scene in the documented key order."""
    return {
        "scenario_id": scene.scenario_id,
        "objects": [
            {
                "name": o.name,
                "dims": {"mean": list(o.dims.mean), "std": list(o.dims.std)},
                "weight_g": {"mean": o.weight_g.mean, "std": o.weight_g.std},
                "material": o.material,
                "rigidity": o.rigidity,
            }
            for o in scene.objects
        ],
        "boxes": [
            {"id": b.id, "label": b.label, "dims": {"mean": list(b.dims.mean), "std": list(b.dims.std)}}
            for b in scene.boxes
        ],
        "audio_posterior": {
            "labels": list(scene.audio.labels),
            "rows": {box_id: list(row) for box_id, row in scene.audio.rows.items()},
        },
    }


def serialize_scene(scene: ParsedScene) -> str:
    """Serialize at full float precision so load(serialize(s)) == s exactly."""
    return json.dumps(scene_to_dict(scene), indent=2, ensure_ascii=False, allow_nan=False) + "\n"
