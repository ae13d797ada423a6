from __future__ import annotations

import math
from dataclasses import replace

import numpy as np
import pytest

import boxinfer.fusion as fusion
from boxinfer.errors import EmptyHypothesisSpaceError
from boxinfer.fusion import (
    MODE_AUDIO,
    MODE_FULL,
    InferenceConfig,
    audio_only_baseline,
    audio_score,
    hypothesis_weight,
    map_hypothesis,
    marginal_table,
    marginals,
    posterior,
    posterior_entropy,
    vision_only_baseline,
)
from boxinfer.geometry import FitParams, visual_likelihood_table
from boxinfer.hypotheses import enumerate_hypotheses
from boxinfer.oracle import generate_scene
from boxinfer.scene import AudioPosterior, ParsedScene
from support import make_box, make_object, make_scene, worked_example_scene

EXPECTED_H1 = 0.56 / 0.62  # weights 0.8*0.7 and 0.2*0.3, hand-normalized
EXPECTED_H2 = 0.06 / 0.62


def small_cfg(mode=MODE_FULL, seed=0, **kwargs):
    return InferenceConfig(mode=mode, fit_params=FitParams(n_samples=50, master_seed=seed), **kwargs)


# --- audio_score -----------------------------------------------------------------

def test_audio_score_single_factor():
    assert audio_score({0}, (0.8, 0.2)) == 0.8


def test_audio_score_product():
    assert audio_score({0, 1}, (0.8, 0.2)) == pytest.approx(0.16, abs=1e-15)


def test_audio_score_empty_contents_is_one():
    assert audio_score(frozenset(), (0.8, 0.2)) == 1.0


def test_audio_score_floor():
    assert audio_score({0}, (0.0, 1.0), audio_floor=1e-6) == 1e-6
    assert audio_score({0}, (0.0, 1.0), audio_floor=0.0) == 0.0


# --- hypothesis_weight --------------------------------------------------------------

def test_worked_example_weights():
    scene = worked_example_scene()
    cfg = small_cfg()
    hyp = enumerate_hypotheses(2, 2)
    visual = visual_likelihood_table(scene, hyp, cfg.fit_params)
    assert hypothesis_weight((0, 1), visual, scene, cfg) == pytest.approx(0.56, abs=1e-12)
    assert hypothesis_weight((1, 0), visual, scene, cfg) == pytest.approx(0.06, abs=1e-12)


def test_zero_visual_rate_annihilates_weight():
    scene = make_scene(
        [make_object("beam", (100, 2, 2)), make_object("pebble", (1, 1, 1))],
        [make_box("b1", (50, 40, 30)), make_box("b2", (20, 20, 20))],
        {"b1": (0.5, 0.5), "b2": (0.5, 0.5)},
    )
    cfg = small_cfg()
    hyp = enumerate_hypotheses(2, 2)
    visual = visual_likelihood_table(scene, hyp, cfg.fit_params)
    # beam in b2 never fits
    assert hypothesis_weight((1, 0), visual, scene, cfg) == 0.0


def test_hypothesis_weight_rejects_audio_mode():
    scene = worked_example_scene()
    cfg = small_cfg(mode=MODE_AUDIO)
    hyp = enumerate_hypotheses(2, 2)
    visual = visual_likelihood_table(scene, hyp, replace(cfg.fit_params))
    with pytest.raises(ValueError):
        hypothesis_weight((0, 1), visual, scene, cfg)


# --- posterior ------------------------------------------------------------------------

def test_worked_example_posterior():
    scene = worked_example_scene()
    post = posterior(scene, small_cfg())
    assert post.hypotheses.placements == ((0, 1), (1, 0))
    assert post.probs[0] == pytest.approx(EXPECTED_H1, abs=1e-12)
    assert post.probs[1] == pytest.approx(EXPECTED_H2, abs=1e-12)
    assert not post.degenerate_fallback
    assert post.total_unnormalized_weight == pytest.approx(0.62, abs=1e-12)


def test_uniform_audio_all_fitting_gives_uniform_posterior():
    scene = make_scene(
        [make_object("a", (1, 1, 1)), make_object("b", (1, 1, 1)), make_object("c", (1, 1, 1))],
        [make_box("b1", (60, 60, 60)), make_box("b2", (60, 60, 60))],
        {"b1": (1 / 3, 1 / 3, 1 / 3), "b2": (1 / 3, 1 / 3, 1 / 3)},
    )
    post = posterior(scene, small_cfg())
    assert np.allclose(post.probs, 1.0 / len(post.hypotheses), atol=1e-15)


def test_nothing_fits_degenerate_fallback_uniform():
    scene = make_scene(
        [make_object("boulder", (90, 90, 90)), make_object("rock", (80, 80, 80))],
        [make_box("b1", (30, 30, 30)), make_box("b2", (25, 25, 25))],
        {"b1": (0.9, 0.1), "b2": (0.4, 0.6)},
    )
    post = posterior(scene, small_cfg())
    assert post.degenerate_fallback
    assert post.total_unnormalized_weight == 0.0
    assert np.array_equal(post.probs, np.full(2, 0.5))


def test_posterior_rejects_audio_mode():
    with pytest.raises(ValueError):
        posterior(worked_example_scene(), small_cfg(mode=MODE_AUDIO))


def test_surjective_more_boxes_than_objects_raises():
    scene = make_scene(
        [make_object("a", (1, 1, 1))],
        [make_box("b1", (10, 10, 10)), make_box("b2", (10, 10, 10))],
        {"b1": (1.0,), "b2": (1.0,)},
    )
    with pytest.raises(EmptyHypothesisSpaceError):
        posterior(scene, small_cfg())
    post = posterior(scene, small_cfg(allow_empty_boxes=True))
    assert len(post.hypotheses) == 2


def test_posterior_sums_to_one_randomized():
    for seed in range(25):
        syn = generate_scene(seed, 2 + seed % 4, 2 + seed % 2, confusion=0.4, dim_std_frac=0.2)
        post = posterior(syn.scene, small_cfg(seed=seed))
        assert abs(math.fsum(post.probs) - 1.0) < 1e-9


def test_log_space_path_matches_direct(monkeypatch):
    syn = generate_scene(9, 4, 2, confusion=0.3, dim_std_frac=0.15)
    cfg = small_cfg(seed=9)
    direct = posterior(syn.scene, cfg)
    monkeypatch.setattr(fusion, "_LOG_SPACE_FACTOR_LIMIT", 0)
    logged = posterior(syn.scene, cfg)
    assert np.max(np.abs(direct.probs - logged.probs)) < 1e-12
    assert math.isclose(direct.total_unnormalized_weight, logged.total_unnormalized_weight, rel_tol=1e-9)


# --- marginals -------------------------------------------------------------------------

def test_worked_example_marginals():
    scene = worked_example_scene()
    post = posterior(scene, small_cfg())
    m = marginals(post, 2, 2)
    assert m[0, 0] == pytest.approx(EXPECTED_H1, abs=1e-12)
    assert m[0, 1] == pytest.approx(EXPECTED_H2, abs=1e-12)


def test_uniform_posterior_symmetry_marginals():
    scene = make_scene(
        [make_object("a", (1, 1, 1)), make_object("b", (1, 1, 1))],
        [make_box("b1", (50, 50, 50)), make_box("b2", (50, 50, 50))],
        {"b1": (0.5, 0.5), "b2": (0.5, 0.5)},
    )
    m = marginals(posterior(scene, small_cfg()), 2, 2)
    assert np.array_equal(m, np.full((2, 2), 0.5))


def test_marginal_rows_sum_to_one_randomized():
    for seed in range(25):
        syn = generate_scene(seed, 2 + seed % 4, 2 + seed % 2, confusion=0.3, dim_std_frac=0.25)
        scene = syn.scene
        table = marginal_table(posterior(scene, small_cfg(seed=seed)), scene)
        for row in table.values:
            assert abs(math.fsum(row) - 1.0) < 1e-9


# --- baselines --------------------------------------------------------------------------

def test_audio_only_worked_example():
    table = audio_only_baseline(worked_example_scene())
    assert table.values[0, 0] == pytest.approx(0.8 / 1.1, abs=1e-12)
    assert table.values[0, 1] == pytest.approx(0.3 / 1.1, abs=1e-12)


def test_audio_only_identical_rows_uniform():
    scene = make_scene(
        [make_object("a", (1, 1, 1)), make_object("b", (1, 1, 1))],
        [make_box("b1", (50, 50, 50)), make_box("b2", (50, 50, 50))],
        {"b1": (0.7, 0.3), "b2": (0.7, 0.3)},
    )
    table = audio_only_baseline(scene)
    assert np.array_equal(table.values, np.full((2, 2), 0.5))


def test_audio_only_single_box_is_one():
    scene = make_scene([make_object("a", (1, 1, 1))], [make_box("b1", (50, 50, 50))], {"b1": (1.0,)})
    assert np.array_equal(audio_only_baseline(scene).values, np.ones((1, 1)))


def test_audio_only_zero_mass_object_uniform_with_note():
    scene = make_scene(
        [make_object("a", (1, 1, 1)), make_object("b", (1, 1, 1))],
        [make_box("b1", (50, 50, 50)), make_box("b2", (50, 50, 50))],
        {"b1": (0.0, 1.0), "b2": (0.0, 1.0)},
    )
    table = audio_only_baseline(scene)
    assert np.array_equal(table.values[0], np.full(2, 0.5))
    assert any("'a'" in note for note in table.notes)


def test_vision_only_forced_object_pins_marginal():
    scene = make_scene(
        [make_object("beam", (45, 2, 2)), make_object("pebble", (1, 1, 1))],
        [make_box("b1", (50, 40, 30)), make_box("b2", (20, 20, 20))],
        {"b1": (0.1, 0.9), "b2": (0.5, 0.5)},
    )
    table = vision_only_baseline(scene, small_cfg())
    assert table.values[0, 0] == 1.0  # the beam only fits b1
    assert table.values[0, 1] == 0.0


def test_vision_only_symmetric_scene_half():
    scene = make_scene(
        [make_object("a", (1, 1, 1)), make_object("b", (1, 1, 1))],
        [make_box("b1", (50, 50, 50)), make_box("b2", (50, 50, 50))],
        {"b1": (0.9, 0.1), "b2": (0.2, 0.8)},  # audio ignored in vision mode
    )
    table = vision_only_baseline(scene, small_cfg())
    assert np.array_equal(table.values, np.full((2, 2), 0.5))


def test_uniform_audio_reduces_to_vision_only_exactly():
    for seed in range(20):
        syn = generate_scene(seed, 2 + seed % 4, 2, confusion=1.0, dim_std_frac=0.2)
        scene = syn.scene
        cfg = small_cfg(seed=seed)
        full = marginal_table(posterior(scene, cfg), scene)
        vision = vision_only_baseline(scene, cfg)
        assert np.array_equal(full.values, vision.values)


def test_factorization_allow_empty_matches_audio_baseline():
    for seed in range(20):
        syn = generate_scene(seed, 2 + seed % 3, 2, confusion=0.5, box_margin=40.0)
        scene = syn.scene
        cfg = small_cfg(seed=seed, allow_empty_boxes=True, audio_floor=0.0)
        full = marginal_table(posterior(scene, cfg), scene)
        baseline = audio_only_baseline(scene)
        assert np.max(np.abs(full.values - baseline.values)) < 1e-12


# --- map_hypothesis ------------------------------------------------------------------------

def test_map_worked_example():
    post = posterior(worked_example_scene(), small_cfg())
    assert map_hypothesis(post) == (0, 1)


def test_map_uniform_tie_takes_lexicographically_first():
    scene = make_scene(
        [make_object("a", (1, 1, 1)), make_object("b", (1, 1, 1))],
        [make_box("b1", (50, 50, 50)), make_box("b2", (50, 50, 50))],
        {"b1": (0.5, 0.5), "b2": (0.5, 0.5)},
    )
    post = posterior(scene, small_cfg())
    assert map_hypothesis(post) == (0, 1)


def test_map_equivariant_under_box_relabeling():
    scene = worked_example_scene()
    post = posterior(scene, small_cfg())
    flipped = ParsedScene(
        scene.scenario_id,
        scene.objects,
        tuple(reversed(scene.boxes)),
        AudioPosterior(scene.audio.labels, dict(scene.audio.rows)),
    )
    post_flipped = posterior(flipped, small_cfg())
    assert map_hypothesis(post) == (0, 1)
    assert map_hypothesis(post_flipped) == (1, 0)


# --- permutation equivariance (exact) --------------------------------------------------------

def permute_scene(scene, obj_perm, box_perm):
    objects = tuple(scene.objects[i] for i in obj_perm)
    boxes = tuple(scene.boxes[j] for j in box_perm)
    labels = tuple(scene.audio.labels[i] for i in obj_perm)
    rows = {}
    for b in boxes:
        old = dict(zip(scene.audio.labels, scene.audio.rows[b.id]))
        rows[b.id] = tuple(old[label] for label in labels)
    return ParsedScene(scene.scenario_id, objects, boxes, AudioPosterior(labels, rows))


def test_marginals_permutation_equivariance_exact():
    rng = np.random.default_rng(1)
    for seed in range(20):
        syn = generate_scene(seed, 3 + seed % 3, 2 + seed % 2, confusion=0.4, dim_std_frac=0.2)
        scene = syn.scene
        obj_perm = tuple(int(v) for v in rng.permutation(scene.n_objects))
        box_perm = tuple(int(v) for v in rng.permutation(scene.k_boxes))
        permuted = permute_scene(scene, obj_perm, box_perm)
        cfg = small_cfg(seed=seed)
        base = marginal_table(posterior(scene, cfg), scene).values
        other = marginal_table(posterior(permuted, cfg), permuted).values
        assert np.array_equal(other, base[np.ix_(obj_perm, box_perm)])


def test_posterior_invariant_under_common_audio_scaling():
    # scaling every row by the same constant is absorbed by normalization
    # (the rows no longer sum to 1, so build the scene directly as a test hook)
    syn = generate_scene(4, 3, 2, confusion=0.5)
    scene = syn.scene
    scaled_rows = {bid: tuple(v * 3.7 for v in row) for bid, row in scene.audio.rows.items()}
    scaled = ParsedScene(
        scene.scenario_id, scene.objects, scene.boxes, AudioPosterior(scene.audio.labels, scaled_rows)
    )
    cfg = small_cfg(seed=4)
    base = posterior(scene, cfg)
    other = posterior(scaled, cfg)
    assert np.max(np.abs(base.probs - other.probs)) < 1e-12


def test_posterior_invariant_under_per_box_scaling_when_blocks_fixed():
    # with N == K every surjective placement has exactly one object per box, so
    # per-box constants multiply every weight equally and cancel
    scene = make_scene(
        [make_object("a", (1, 1, 1)), make_object("b", (1, 1, 1))],
        [make_box("b1", (50, 50, 50)), make_box("b2", (50, 50, 50))],
        {"b1": (0.8, 0.2), "b2": (0.3, 0.7)},
    )
    scaled = ParsedScene(
        scene.scenario_id,
        scene.objects,
        scene.boxes,
        AudioPosterior(scene.audio.labels, {"b1": (0.8 * 5, 0.2 * 5), "b2": (0.3 * 0.25, 0.7 * 0.25)}),
    )
    cfg = small_cfg()
    assert np.max(np.abs(posterior(scene, cfg).probs - posterior(scaled, cfg).probs)) < 1e-12


# --- entropy & config ------------------------------------------------------------------------

def test_entropy_uniform_and_point_mass():
    scene = make_scene(
        [make_object("a", (1, 1, 1)), make_object("b", (1, 1, 1))],
        [make_box("b1", (50, 50, 50)), make_box("b2", (50, 50, 50))],
        {"b1": (0.5, 0.5), "b2": (0.5, 0.5)},
    )
    post = posterior(scene, small_cfg())
    assert posterior_entropy(post) == pytest.approx(math.log(2), abs=1e-12)


def test_inference_config_validation():
    with pytest.raises(ValueError):
        InferenceConfig(mode="psychic")
    with pytest.raises(ValueError):
        InferenceConfig(audio_floor=1.0)
    with pytest.raises(ValueError):
        InferenceConfig(audio_floor=-0.1)
