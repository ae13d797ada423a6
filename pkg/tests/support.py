from __future__ import annotations

import json
from pathlib import Path

from boxinfer.scene import (
    AudioPosterior,
    BoxSpec,
    ObjectSpec,
    ParsedScene,
    UncertainDims,
    UncertainScalar,
)

FIXTURES = Path(__file__).parent / "fixtures"
SCENES = FIXTURES / "scenes"


def dims(mean, std=(0.0, 0.0, 0.0)) -> UncertainDims:
    return UncertainDims(mean=tuple(float(v) for v in mean), std=tuple(float(v) for v in std))


def make_object(name, mean, std=(0.0, 0.0, 0.0), rigidity=1.0, weight=100.0, material="plastic") -> ObjectSpec:
    return ObjectSpec(
        name=name,
        dims=dims(mean, std),
        weight_g=UncertainScalar(mean=float(weight), std=0.0),
        material=material,
        rigidity=rigidity,
    )


def make_box(box_id, mean, std=(0.0, 0.0, 0.0), label="") -> BoxSpec:
    return BoxSpec(id=box_id, label=label or box_id, dims=dims(mean, std))


def make_scene(objects, boxes, rows, scenario_id="test") -> ParsedScene:
    """Scene from parts; audio labels follow the object order."""
    labels = tuple(o.name for o in objects)
    return ParsedScene(
        scenario_id=scenario_id,
        objects=tuple(objects),
        boxes=tuple(boxes),
        audio=AudioPosterior(labels=labels, rows={k: tuple(v) for k, v in rows.items()}),
    )


def worked_example_scene() -> ParsedScene:
    """Two tiny objects that always fit, two huge boxes, hand-computable audio."""
    return make_scene(
        [make_object("a", (1, 1, 1)), make_object("b", (1, 1, 1))],
        [make_box("box1", (50, 50, 50)), make_box("box2", (50, 50, 50))],
        {"box1": (0.8, 0.2), "box2": (0.3, 0.7)},
        scenario_id="worked",
    )


def scene_doc_dict(scene: ParsedScene) -> dict:
    from boxinfer.scene import scene_to_dict

    return scene_to_dict(scene)


def write_scene(path: Path, scene: ParsedScene) -> Path:
    path.write_text(json.dumps(scene_doc_dict(scene), indent=2) + "\n", encoding="utf-8")
    return path
