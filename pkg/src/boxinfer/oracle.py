"""Independent brute-force reference and synthetic scene generation.

Everything here recomputes the posterior pipeline from scratch: assignments
come from base-K digit decoding rather than the hypothesis engine, fit checks
and weights are written out inline with plain products and sums, and nothing
is imported from the geometry or fusion computation paths.  Agreement between
this module and the engine is therefore evidence, not tautology.

Restricted to zero-variance scenes, where the fit check is analytic; stochastic
behaviour is pinned by fixed-seed golden values elsewhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import OraclePreconditionError
from .fusion import MODE_AUDIO, MODE_FULL, InferenceConfig, MarginalTable
from .report import assemble_report
from .scene import (
    AudioPosterior,
    BoxSpec,
    ObjectSpec,
    ParsedScene,
    UncertainDims,
    UncertainScalar,
    validate_scene,
)

_MAX_OBJECTS = 6
_MAX_BOXES = 3


@dataclass(frozen=True)
class SyntheticScene:
    scene: ParsedScene
    true_placement: tuple[int, ...]
    confusion: float


def _check_preconditions(scene: ParsedScene) -> None:
    if scene.n_objects > _MAX_OBJECTS or scene.k_boxes > _MAX_BOXES:
        raise OraclePreconditionError(
            f"oracle supports at most {_MAX_OBJECTS} objects and {_MAX_BOXES} boxes, "
            f"got {scene.n_objects} and {scene.k_boxes}"
        )
    for obj in scene.objects:
        if any(s != 0.0 for s in obj.dims.std):
            raise OraclePreconditionError(f"object {obj.name!r} has nonzero dimension std; oracle needs zero stds")
    for box in scene.boxes:
        if any(s != 0.0 for s in box.dims.std):
            raise OraclePreconditionError(f"box {box.id!r} has nonzero dimension std; oracle needs zero stds")


def _mean_fit(contents, items, box, eta: float) -> bool:
    # inline analytic fit on mean dimensions: per-item sorted-extent test plus volume budget
    bx = sorted(box)
    used = 0.0
    for i in contents:
        it = sorted(items[i])
        if it[0] > bx[0] or it[1] > bx[1] or it[2] > bx[2]:
            return False
        used += items[i][0] * items[i][1] * items[i][2]
    return used <= eta * box[0] * box[1] * box[2]


def _audio_only_values(scene: ParsedScene) -> MarginalTable:
    n, k = scene.n_objects, scene.k_boxes
    names = scene.object_names()
    box_ids = scene.box_ids()
    rows = [scene.audio_row(box_id) for box_id in box_ids]
    values = np.zeros((n, k))
    notes = []
    for o in range(n):
        denom = 0.0
        for b in range(k):
            denom += rows[b][o]
        if denom == 0.0:
            for b in range(k):
                values[o, b] = 1.0 / k
            notes.append(f"audio-only: object {names[o]!r} scored 0 in every box; uniform fallback")
        else:
            for b in range(k):
                values[o, b] = rows[b][o] / denom
    return MarginalTable(values=values, objects=names, boxes=box_ids, notes=tuple(notes))


def _brute_force_posterior(scene: ParsedScene, cfg: InferenceConfig):
    """All valid assignments (lexicographic), their probabilities, the weight total."""
    n, k = scene.n_objects, scene.k_boxes
    floor = cfg.fit_params.dim_floor
    items = [tuple(max(m, floor) * obj.rigidity for m in obj.dims.mean) for obj in scene.objects]
    boxes = [tuple(max(m, floor) for m in box.dims.mean) for box in scene.boxes]
    rows = [scene.audio_row(box_id) for box_id in scene.box_ids()]

    assignments: list[tuple[int, ...]] = []
    weights: list[float] = []
    for idx in range(k**n):
        digits = []
        rem = idx
        for _ in range(n):
            digits.append(rem % k)
            rem //= k
        assignment = tuple(reversed(digits))  # most-significant digit first: lexicographic order
        if not cfg.allow_empty_boxes and len(set(assignment)) < k:
            continue
        w = 1.0
        for b in range(k):
            contents = [o for o in range(n) if assignment[o] == b]
            w *= 1.0 if _mean_fit(contents, items, boxes[b], cfg.fit_params.eta) else 0.0
            if cfg.mode == MODE_FULL:
                for o in contents:
                    w *= max(rows[b][o], cfg.audio_floor)
        assignments.append(assignment)
        weights.append(w)

    if not assignments:
        raise OraclePreconditionError(
            f"no surjective placements of {n} objects into {k} boxes; enable allow_empty_boxes"
        )

    total = 0.0
    for w in weights:
        total += w
    if total == 0.0:
        probs = [1.0 / len(assignments)] * len(assignments)  # mirror the engine's uniform fallback
    else:
        probs = [w / total for w in weights]
    return assignments, probs, total


def brute_force_marginals(scene: ParsedScene, cfg: InferenceConfig) -> MarginalTable:
    """Reference marginals for zero-variance scenes, by exhaustive direct products."""
    _check_preconditions(scene)
    if cfg.mode == MODE_AUDIO:
        return _audio_only_values(scene)

    assignments, probs, _ = _brute_force_posterior(scene, cfg)
    n, k = scene.n_objects, scene.k_boxes
    values = np.zeros((n, k))
    for a, p in zip(assignments, probs):
        for o in range(n):
            values[o, a[o]] += p
    return MarginalTable(values=values, objects=scene.object_names(), boxes=scene.box_ids(), notes=())


def brute_force_report(scene: ParsedScene, cfg: InferenceConfig) -> dict:
    """Same report document as the engine emits, computed entirely on this path."""
    _check_preconditions(scene)
    table = brute_force_marginals(scene, cfg)
    config = {
        "samples": cfg.fit_params.n_samples,
        "seed": cfg.fit_params.master_seed,
        "eta": cfg.fit_params.eta,
        "dim_floor": cfg.fit_params.dim_floor,
        "allow_empty_boxes": cfg.allow_empty_boxes,
        "audio_floor": cfg.audio_floor,
    }
    marginals_dict = {
        obj: {box: float(table.values[o, b]) for b, box in enumerate(table.boxes)}
        for o, obj in enumerate(table.objects)
    }
    if cfg.mode == MODE_AUDIO:
        return assemble_report(
            scenario_id=scene.scenario_id,
            mode=cfg.mode,
            config=config,
            marginals=marginals_dict,
            map_placement=None,
            posterior_entropy_nats=None,
            diagnostics={
                "degenerate_fallback": False,
                "total_unnormalized_weight": None,
                "hypothesis_count": None,
                "notes": list(table.notes),
            },
        )

    assignments, probs, total = _brute_force_posterior(scene, cfg)
    best = assignments[max(range(len(probs)), key=lambda i: (probs[i], -i))]  # ties: lowest index
    entropy = -sum(p * math.log(p) for p in probs if p > 0)
    box_ids = scene.box_ids()
    return assemble_report(
        scenario_id=scene.scenario_id,
        mode=cfg.mode,
        config=config,
        marginals=marginals_dict,
        map_placement={name: box_ids[best[o]] for o, name in enumerate(scene.object_names())},
        posterior_entropy_nats=entropy,
        diagnostics={
            "degenerate_fallback": total == 0.0,
            "total_unnormalized_weight": total,
            "hypothesis_count": len(assignments),
            "notes": [],
        },
    )


# --- synthetic scenes --------------------------------------------------------

_MATERIALS = ("plastic", "metal", "ceramic", "wood", "fabric", "glass")
_DENSITY_RANGE = (0.2, 1.2)  # g/cm^3, household-object ballpark


def generate_scene(
    seed: int,
    n_objects: int,
    k_boxes: int,
    confusion: float,
    dim_std_frac: float = 0.0,
    box_margin: float = 1.25,
) -> SyntheticScene:
    """Deterministic synthetic scene with a known true placement.

    Object dimensions are household-scale; each box is sized so the true
    placement passes the fit check at mean dimensions.  Audio rows blend an
    indicator of the truth with a uniform distribution: confusion 0 gives a
    perfectly informative classifier, confusion 1 a useless one.

    dim_std_frac adds proportional dimension noise (keep 0 for oracle use);
    box_margin scales boxes beyond the minimum feasible size.
    """
    if n_objects < 1 or k_boxes < 1:
        raise ValueError(f"need n_objects >= 1 and k_boxes >= 1, got ({n_objects}, {k_boxes})")
    if not 0 <= confusion <= 1:
        raise ValueError(f"confusion must lie in [0, 1], got {confusion}")
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, n_objects, k_boxes])))

    names = tuple(f"item_{i}" for i in range(n_objects))
    dims_mean = rng.uniform(3.0, 30.0, size=(n_objects, 3))
    rigidity = rng.uniform(0.6, 1.0, size=n_objects)
    objects = []
    for i in range(n_objects):
        mean = tuple(float(v) for v in dims_mean[i])
        std = tuple(float(v * dim_std_frac) for v in dims_mean[i])
        volume = mean[0] * mean[1] * mean[2]
        weight = float(volume * rng.uniform(*_DENSITY_RANGE))
        objects.append(
            ObjectSpec(
                name=names[i],
                dims=UncertainDims(mean=mean, std=std),
                weight_g=UncertainScalar(mean=weight, std=0.0),
                material=_MATERIALS[i % len(_MATERIALS)],
                rigidity=float(rigidity[i]),
            )
        )

    if n_objects >= k_boxes:
        placement = np.empty(n_objects, dtype=int)
        placement[:k_boxes] = rng.permutation(k_boxes)  # guarantees surjectivity
        placement[k_boxes:] = rng.integers(0, k_boxes, size=n_objects - k_boxes)
    else:
        placement = rng.integers(0, k_boxes, size=n_objects)
    true_placement = tuple(int(b) for b in placement)

    boxes = []
    for b in range(k_boxes):
        contents = [i for i in range(n_objects) if true_placement[i] == b]
        eff = [np.sort(dims_mean[i] * rigidity[i]) for i in contents]
        if eff:
            base = np.max(eff, axis=0) * box_margin
            need = sum(float(np.prod(e)) for e in eff) * 1.05
            if float(np.prod(base)) < need:
                base = base * (need / float(np.prod(base))) ** (1.0 / 3.0)
        else:
            base = np.array([10.0, 10.0, 10.0])
        base = base[rng.permutation(3)]  # boxes need not arrive sorted
        mean = tuple(float(v) for v in base)
        std = tuple(float(v * dim_std_frac) for v in base)
        boxes.append(BoxSpec(id=f"box_{b}", label=f"box {b}", dims=UncertainDims(mean=mean, std=std)))

    rows: dict[str, tuple[float, ...]] = {}
    for b in range(k_boxes):
        indicator = np.array([1.0 if true_placement[i] == b else 0.0 for i in range(n_objects)])
        blended = (1.0 - confusion) * indicator + confusion * np.full(n_objects, 1.0 / n_objects)
        total = math.fsum(blended)
        if total == 0.0:  # empty box with confusion 0: the classifier heard nothing
            blended = np.full(n_objects, 1.0 / n_objects)
            total = 1.0
        rows[f"box_{b}"] = tuple(float(v / total) for v in blended)

    scene = ParsedScene(
        scenario_id=f"synthetic-{seed}-{n_objects}x{k_boxes}-c{confusion:g}",
        objects=tuple(objects),
        boxes=tuple(boxes),
        audio=AudioPosterior(labels=names, rows=rows),
    )
    problems = validate_scene(scene)
    if problems:
        raise AssertionError(f"generated scene failed validation: {[str(v) for v in problems]}")
    return SyntheticScene(scene=scene, true_placement=true_placement, confusion=confusion)
