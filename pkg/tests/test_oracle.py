from __future__ import annotations

import numpy as np
import pytest

from boxinfer.errors import OraclePreconditionError
from boxinfer.fusion import (
    MODE_AUDIO,
    MODE_VISION,
    InferenceConfig,
    audio_only_baseline,
    map_hypothesis,
    marginal_table,
    posterior,
    vision_only_baseline,
)
from boxinfer.geometry import FitParams
from boxinfer.oracle import brute_force_marginals, brute_force_report, generate_scene
from support import make_box, make_object, make_scene, worked_example_scene


def cfg_for(seed=0, mode="full", **kwargs):
    return InferenceConfig(mode=mode, fit_params=FitParams(n_samples=8, master_seed=seed), **kwargs)


def test_oracle_matches_worked_example():
    scene = worked_example_scene()
    cfg = cfg_for()
    engine = marginal_table(posterior(scene, cfg), scene)
    oracle = brute_force_marginals(scene, cfg)
    assert np.max(np.abs(engine.values - oracle.values)) < 1e-12


def test_oracle_symmetric_scene_uniform():
    scene = make_scene(
        [make_object("a", (2, 2, 2)), make_object("b", (2, 2, 2))],
        [make_box("b1", (30, 30, 30)), make_box("b2", (30, 30, 30))],
        {"b1": (0.5, 0.5), "b2": (0.5, 0.5)},
    )
    oracle = brute_force_marginals(scene, cfg_for())
    assert np.array_equal(oracle.values, np.full((2, 2), 0.5))


@pytest.mark.parametrize("mode", ["full", MODE_VISION])
def test_oracle_equivalence_randomized_zero_variance(mode):
    worst = 0.0
    for seed in range(60):
        syn = generate_scene(seed, 2 + seed % 3, 2, confusion=(seed % 7) / 7.0, box_margin=0.85 + (seed % 5) * 0.2)
        scene = syn.scene
        cfg = cfg_for(seed=seed, mode=mode)
        engine = marginal_table(posterior(scene, cfg), scene)
        oracle = brute_force_marginals(scene, cfg)
        worst = max(worst, float(np.max(np.abs(engine.values - oracle.values))))
    assert worst < 1e-12


def test_oracle_equivalence_audio_mode():
    for seed in range(20):
        syn = generate_scene(seed, 3, 2, confusion=0.4)
        engine = audio_only_baseline(syn.scene)
        oracle = brute_force_marginals(syn.scene, cfg_for(seed=seed, mode=MODE_AUDIO))
        assert np.max(np.abs(engine.values - oracle.values)) < 1e-12


def test_oracle_allow_empty_mode():
    for seed in range(10):
        syn = generate_scene(seed, 3, 2, confusion=0.3)
        cfg = cfg_for(seed=seed, allow_empty_boxes=True)
        engine = marginal_table(posterior(syn.scene, cfg), syn.scene)
        oracle = brute_force_marginals(syn.scene, cfg)
        assert np.max(np.abs(engine.values - oracle.values)) < 1e-12


def test_oracle_rejects_nonzero_std():
    syn = generate_scene(0, 2, 2, confusion=0.5, dim_std_frac=0.1)
    with pytest.raises(OraclePreconditionError, match="std"):
        brute_force_marginals(syn.scene, cfg_for())


def test_oracle_rejects_oversized_scene():
    syn = generate_scene(0, 7, 2, confusion=0.5)
    with pytest.raises(OraclePreconditionError, match="at most"):
        brute_force_marginals(syn.scene, cfg_for())


def test_oracle_report_mirrors_engine_fields():
    scene = worked_example_scene()
    report = brute_force_report(scene, cfg_for())
    assert list(report) == [
        "scenario_id",
        "mode",
        "config",
        "marginals",
        "map_placement",
        "posterior_entropy_nats",
        "diagnostics",
    ]
    assert report["map_placement"] == {"a": "box1", "b": "box2"}


# --- generate_scene -----------------------------------------------------------------

def test_generate_scene_deterministic():
    a = generate_scene(7, 3, 2, confusion=0.25)
    b = generate_scene(7, 3, 2, confusion=0.25)
    assert a == b
    c = generate_scene(8, 3, 2, confusion=0.25)
    assert a != c


def test_generate_scene_true_placement_surjective_and_feasible():
    for seed in range(20):
        syn = generate_scene(seed, 4, 2, confusion=0.5)
        assert set(syn.true_placement) == {0, 1}
        cfg = cfg_for(seed=seed, mode=MODE_VISION)
        post = posterior(syn.scene, cfg)
        idx = post.hypotheses.placements.index(syn.true_placement)
        assert post.probs[idx] > 0  # the truth is never geometrically ruled out


def test_noiseless_map_recovers_truth():
    for seed in range(25):
        syn = generate_scene(seed, 2 + seed % 4, 2, confusion=0.0)
        post = posterior(syn.scene, cfg_for(seed=seed))
        assert map_hypothesis(post) == syn.true_placement


def test_full_confusion_reduces_to_vision_only():
    for seed in range(10):
        syn = generate_scene(seed, 3, 2, confusion=1.0)
        scene = syn.scene
        row = scene.audio_row("box_0")
        assert max(row) - min(row) < 1e-15  # uniform audio
        cfg = cfg_for(seed=seed)
        full = marginal_table(posterior(scene, cfg), scene)
        vision = vision_only_baseline(scene, cfg)
        assert np.array_equal(full.values, vision.values)


def test_generate_scene_validates_args():
    with pytest.raises(ValueError):
        generate_scene(0, 0, 2, confusion=0.5)
    with pytest.raises(ValueError):
        generate_scene(0, 2, 2, confusion=1.5)
