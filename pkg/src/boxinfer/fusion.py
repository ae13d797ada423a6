"""Combine visual likelihoods and audio posteriors into placement posteriors.

The hypothesis posterior factorizes per box under a uniform prior: each
placement's unnormalized weight is the product, over boxes, of the visual
acceptance rate for the box's hypothesized contents times the product of the
audio classifier's probabilities for those objects.  Marginalizing the
normalized posterior gives per-object placement distributions; two unimodal
baselines (audio-only ratio normalization and vision-only) cover the ablations.

Numerics: per-hypothesis weights multiply their factors in ascending value
order and all reductions use math.fsum, so posteriors and marginals are exactly
invariant under permutations of the scene's objects and boxes (the random
draws already are, being keyed by entity name).  Scenes with many factors per
hypothesis switch to log-space accumulation to dodge underflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from .errors import EmptyHypothesisSpaceError
from .geometry import FitParams, VisualLikelihoodTable, visual_likelihood_table
from .hypotheses import HypothesisSet, Placement, box_contents, enumerate_hypotheses
from .report import assemble_report
from .scene import ParsedScene

MODE_FULL = "full"
MODE_AUDIO = "audio"
MODE_VISION = "vision"
MODES = (MODE_FULL, MODE_AUDIO, MODE_VISION)

# direct products are safe up to this many factors per hypothesis (audio_floor
# 1e-6 keeps them far above double underflow); larger scenes go log-space
_LOG_SPACE_FACTOR_LIMIT = 30


@dataclass(frozen=True)
class InferenceConfig:
    mode: str = MODE_FULL
    fit_params: FitParams = field(default_factory=FitParams)
    allow_empty_boxes: bool = False
    audio_floor: float = 1e-6  # keeps a single zero classifier entry from annihilating hypotheses

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if not 0 <= self.audio_floor < 1:
            raise ValueError(f"audio_floor must lie in [0, 1), got {self.audio_floor}")


@dataclass(frozen=True, eq=False)
class PosteriorResult:
    hypotheses: HypothesisSet
    probs: np.ndarray
    degenerate_fallback: bool
    total_unnormalized_weight: float


@dataclass(frozen=True, eq=False)
class MarginalTable:
    """Per-object, per-box placement probabilities; rows sum to 1."""

    values: np.ndarray  # shape (n_objects, k_boxes)
    objects: tuple[str, ...]
    boxes: tuple[str, ...]
    notes: tuple[str, ...] = ()


def _sorted_product(factors: Iterable[float]) -> float:
    """Product in ascending factor order: independent of input ordering."""
    out = 1.0
    for f in sorted(factors):
        out *= f
    return out


def audio_score(contents: Iterable[int], audio_row: Sequence[float], audio_floor: float = 0.0) -> float:
    """Probability the audio assigns to a contents set: product of per-object entries.

    Each entry is floored at audio_floor; the empty set scores 1 (empty product).
    """
    return _sorted_product(max(audio_row[o], audio_floor) for o in contents)


def _split_factors(
    placement: Placement,
    visual: VisualLikelihoodTable,
    scene: ParsedScene,
    cfg: InferenceConfig,
) -> tuple[list[float], list[float]]:
    """(visual rate factors, audio probability factors) of one placement's weight."""
    vf: list[float] = []
    af: list[float] = []
    for b, box_id in enumerate(scene.box_ids()):
        contents = box_contents(placement, b)
        vf.append(visual.rate(box_id, contents))
        if cfg.mode == MODE_FULL:
            row = scene.audio_row(box_id)
            af.extend(max(row[o], cfg.audio_floor) for o in contents)
    return vf, af


def hypothesis_weight(
    placement: Placement,
    visual: VisualLikelihoodTable,
    scene: ParsedScene,
    cfg: InferenceConfig,
) -> float:
    """Unnormalized posterior weight of one placement.

    Vision-only mode drops the audio factors; audio-only marginals do not run
    through hypothesis weights at all (see audio_only_baseline).
    """
    if cfg.mode == MODE_AUDIO:
        raise ValueError("audio-only inference uses audio_only_baseline, not hypothesis weights")
    vf, af = _split_factors(placement, visual, scene, cfg)
    return _sorted_product(vf) * _sorted_product(af) if af else _sorted_product(vf)


def posterior(scene: ParsedScene, cfg: InferenceConfig, workers: int = 1) -> PosteriorResult:
    """Normalized posterior over all placements under a uniform prior.

    If every weight is zero (nothing fits anywhere), falls back to the uniform
    distribution and flags it rather than erroring: absent usable evidence the
    observer keeps its prior.
    """
    if cfg.mode == MODE_AUDIO:
        raise ValueError("audio-only inference uses audio_only_baseline, not the hypothesis posterior")
    hyp = enumerate_hypotheses(scene.n_objects, scene.k_boxes, cfg.allow_empty_boxes)
    if len(hyp) == 0:
        raise EmptyHypothesisSpaceError(
            f"no surjective placements of {scene.n_objects} objects into {scene.k_boxes} boxes; "
            "enable allow_empty_boxes"
        )
    visual = visual_likelihood_table(scene, hyp, cfg.fit_params, workers=workers)

    factor_lists = [_split_factors(p, visual, scene, cfg) for p in hyp]
    use_log = scene.n_objects + scene.k_boxes > _LOG_SPACE_FACTOR_LIMIT
    shift = 0.0  # log-scale factor the weights below are missing
    if use_log:
        logs = []
        for vf, af in factor_lists:
            fs = vf + af
            logs.append(-math.inf if any(f == 0.0 for f in fs) else math.fsum(math.log(f) for f in fs))
        shift = max(logs)
        if shift == -math.inf:
            weights = np.zeros(len(hyp))
        else:
            weights = np.array([math.exp(lw - shift) for lw in logs])
    else:
        vision_part = np.array([_sorted_product(vf) for vf, _ in factor_lists])
        if cfg.mode == MODE_FULL:
            # rescale audio scores by their maximum before multiplying in: a
            # mathematical no-op under normalization, but it makes uniform
            # audio cancel bitwise (score/score == 1.0), so full mode then
            # reproduces vision mode exactly rather than up to rounding
            audio_part = np.array([_sorted_product(af) for _, af in factor_lists])
            top = float(np.max(audio_part))
            if top > 0.0:
                audio_part = audio_part / top
            weights = vision_part * audio_part
        else:
            weights = vision_part

    if not np.any(weights > 0):
        probs = np.full(len(hyp), 1.0 / len(hyp))
        return PosteriorResult(hypotheses=hyp, probs=probs, degenerate_fallback=True, total_unnormalized_weight=0.0)

    norm = math.fsum(weights)
    probs = weights / norm
    if use_log:
        # best-effort true total for diagnostics; may overflow/underflow
        try:
            total = math.exp(shift + math.log(norm))
        except OverflowError:
            total = math.inf
    else:
        total = (
            math.fsum(_sorted_product(vf) * _sorted_product(af) for vf, af in factor_lists)
            if cfg.mode == MODE_FULL
            else norm
        )
    return PosteriorResult(hypotheses=hyp, probs=probs, degenerate_fallback=False, total_unnormalized_weight=total)


def marginals(post: PosteriorResult, n_objects: int, k_boxes: int) -> np.ndarray:
    """M[o][b] = total posterior mass of placements putting object o in box b."""
    out = np.zeros((n_objects, k_boxes))
    placements = post.hypotheses.placements
    for o in range(n_objects):
        for b in range(k_boxes):
            out[o, b] = math.fsum(
                float(post.probs[i]) for i, p in enumerate(placements) if p[o] == b
            )
    return out


def marginal_table(post: PosteriorResult, scene: ParsedScene) -> MarginalTable:
    values = marginals(post, scene.n_objects, scene.k_boxes)
    return MarginalTable(values=values, objects=scene.object_names(), boxes=scene.box_ids())


def audio_only_baseline(scene: ParsedScene) -> MarginalTable:
    """Ratio-normalized audio ratings: M[o][i] = P(o|A_i) / sum_j P(o|A_j).

    An object the classifier scores zero in every box gets a uniform row plus
    a diagnostic note.
    """
    names = scene.object_names()
    box_ids = scene.box_ids()
    rows = {box_id: scene.audio_row(box_id) for box_id in box_ids}
    values = np.zeros((len(names), len(box_ids)))
    notes: list[str] = []
    for o, name in enumerate(names):
        denom = math.fsum(rows[box_id][o] for box_id in box_ids)
        if denom == 0.0:
            values[o, :] = 1.0 / len(box_ids)
            notes.append(f"audio-only: object {name!r} scored 0 in every box; uniform fallback")
        else:
            for b, box_id in enumerate(box_ids):
                values[o, b] = rows[box_id][o] / denom
    return MarginalTable(values=values, objects=names, boxes=box_ids, notes=tuple(notes))


def vision_only_baseline(scene: ParsedScene, cfg: InferenceConfig, workers: int = 1) -> MarginalTable:
    """Marginals with the audio term replaced by 1 everywhere."""
    post = posterior(scene, replace(cfg, mode=MODE_VISION), workers=workers)
    return marginal_table(post, scene)


def map_hypothesis(post: PosteriorResult) -> Placement:
    """Argmax placement; ties resolve to the lexicographically smallest encoding."""
    if len(post.hypotheses) == 0:
        raise ValueError("empty posterior")
    return post.hypotheses.placements[int(np.argmax(post.probs))]


def posterior_entropy(post: PosteriorResult) -> float:
    """Shannon entropy of the hypothesis posterior, in nats."""
    return -math.fsum(float(p) * math.log(float(p)) for p in post.probs if p > 0)


# --- report document (the serialized external interface) ---------------------

def _config_echo(cfg: InferenceConfig) -> dict:
    return {
        "samples": cfg.fit_params.n_samples,
        "seed": cfg.fit_params.master_seed,
        "eta": cfg.fit_params.eta,
        "dim_floor": cfg.fit_params.dim_floor,
        "allow_empty_boxes": cfg.allow_empty_boxes,
        "audio_floor": cfg.audio_floor,
    }


def _marginals_dict(table: MarginalTable) -> dict:
    return {
        obj: {box: float(table.values[o, b]) for b, box in enumerate(table.boxes)}
        for o, obj in enumerate(table.objects)
    }


def build_report(scene: ParsedScene, cfg: InferenceConfig, workers: int = 1) -> dict:
    """Full report dict for one scene and configuration; render with report.render_report."""
    if cfg.mode == MODE_AUDIO:
        table = audio_only_baseline(scene)
        return assemble_report(
            scenario_id=scene.scenario_id,
            mode=cfg.mode,
            config=_config_echo(cfg),
            marginals=_marginals_dict(table),
            map_placement=None,
            posterior_entropy_nats=None,
            diagnostics={
                "degenerate_fallback": False,
                "total_unnormalized_weight": None,
                "hypothesis_count": None,
                "notes": list(table.notes),
            },
        )

    post = posterior(scene, cfg, workers=workers)
    table = marginal_table(post, scene)
    best = map_hypothesis(post)
    box_ids = scene.box_ids()
    return assemble_report(
        scenario_id=scene.scenario_id,
        mode=cfg.mode,
        config=_config_echo(cfg),
        marginals=_marginals_dict(table),
        map_placement={name: box_ids[best[o]] for o, name in enumerate(scene.object_names())},
        posterior_entropy_nats=posterior_entropy(post),
        diagnostics={
            "degenerate_fallback": post.degenerate_fallback,
            "total_unnormalized_weight": post.total_unnormalized_weight,
            "hypothesis_count": len(post.hypotheses),
            "notes": list(table.notes),
        },
    )
