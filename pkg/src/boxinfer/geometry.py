"""Visual-fit likelihoods: can a hypothesized set of objects fit in a box?

Acceptance rates are estimated by seeded Monte Carlo rejection sampling over
normally distributed dimensions.  Every random draw is addressed by
(master seed, entity name, trial index), never pulled from a shared sequential
stream, so results are independent of evaluation order and of the order in
which objects or boxes appear in the scene document.  All hypotheses share the
same dimension realizations (common random numbers), which makes box-growth
and rigidity monotonicity hold exactly, not just in expectation.

The fit test itself is a pair of cheap necessary conditions, not a packing
solver: each item must pass the sorted-dimensions orientation test on its own,
and the summed effective volume must stay within eta times the box volume.
Sets that pass both can still be physically unpackable (e.g. two 15 cm cubes
in a 20 cm cube); that false-positive direction is accepted by design.
"""

from __future__ import annotations

import hashlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .errors import InternalConsistencyError
from .hypotheses import HypothesisSet, box_contents
from .scene import ParsedScene, UncertainDims

DEFAULT_SAMPLES = 1000
DEFAULT_DIM_FLOOR = 0.1  # cm; negative/zero normal draws are clamped, not resampled

_KIND_OBJECT = 1
_KIND_BOX = 2


@dataclass(frozen=True)
class FitParams:
    """Knobs of the Monte Carlo fit estimate."""

    n_samples: int = DEFAULT_SAMPLES
    eta: float = 1.0  # usable fraction of box volume
    dim_floor: float = DEFAULT_DIM_FLOOR
    master_seed: int = 0

    def __post_init__(self):
        if self.n_samples < 1:
            raise ValueError(f"n_samples must be >= 1, got {self.n_samples}")
        if not 0 < self.eta <= 1:
            raise ValueError(f"eta must lie in (0, 1], got {self.eta}")
        if self.dim_floor <= 0:
            raise ValueError(f"dim_floor must be > 0, got {self.dim_floor}")
        if not 0 <= self.master_seed < 2**64:
            raise ValueError(f"master_seed must be an unsigned 64-bit value, got {self.master_seed}")


def entity_stream(master_seed: int, kind: int, name: str) -> np.random.Generator:
    """Independent generator keyed by (master seed, entity kind, entity name)."""
    digest = hashlib.blake2b(name.encode("utf-8"), digest_size=16).digest()
    seq = np.random.SeedSequence([master_seed, kind, int.from_bytes(digest, "big")])
    return np.random.Generator(np.random.PCG64(seq))


def object_stream(master_seed: int, name: str) -> np.random.Generator:
    return entity_stream(master_seed, _KIND_OBJECT, name)


def box_stream(master_seed: int, box_id: str) -> np.random.Generator:
    return entity_stream(master_seed, _KIND_BOX, box_id)


def sample_dims(dims: UncertainDims, rng: np.random.Generator, dim_floor: float = DEFAULT_DIM_FLOOR) -> np.ndarray:
    """One dimension realization: Normal(mean, std) per axis, clamped below at dim_floor."""
    z = rng.standard_normal(3)
    return _realize(dims, z, dim_floor)


def _realize(dims: UncertainDims, z: np.ndarray, dim_floor: float) -> np.ndarray:
    # explicit affine transform of standard normals keeps the draws coupled
    # across any change of mean/std under the same seed
    draw = np.asarray(dims.mean, dtype=float) + np.asarray(dims.std, dtype=float) * z
    return np.maximum(draw, dim_floor)


def effective_dims(sampled: np.ndarray, rigidity: float) -> np.ndarray:
    """Minimum compressed extent per axis: each dimension scaled by rigidity."""
    return np.asarray(sampled, dtype=float) * rigidity


def item_fits(item_effective, box) -> bool:
    """Orientation test: sorted item extents componentwise within sorted box extents."""
    return bool(np.all(np.sort(np.asarray(item_effective, float)) <= np.sort(np.asarray(box, float))))


def set_fits(items_effective: Iterable, box, eta: float = 1.0) -> bool:
    """True iff every item passes item_fits and total volume is within eta * box volume.

    The empty set fits vacuously.
    """
    box = np.asarray(box, dtype=float)
    total = 0.0
    for item in items_effective:
        item = np.asarray(item, dtype=float)
        if not item_fits(item, box):
            return False
        total += float(np.prod(item))
    return total <= eta * float(np.prod(box))


@dataclass(frozen=True)
class VisualLikelihoodTable:
    """Acceptance rate per (box id, sorted object-index tuple) key."""

    rates: Mapping[tuple[str, tuple[int, ...]], float]
    n_samples: int

    def rate(self, box_id: str, contents: Iterable[int]) -> float:
        key = (box_id, tuple(sorted(contents)))
        try:
            return self.rates[key]
        except KeyError:
            raise InternalConsistencyError(f"visual likelihood table has no entry for {key}") from None


def visual_likelihood_table(
    scene: ParsedScene,
    hypotheses: HypothesisSet,
    params: FitParams,
    workers: int = 1,
) -> VisualLikelihoodTable:
    """Monte Carlo acceptance rates for every (box, contents) pair in the hypothesis set.

    One dimension realization per entity per trial is shared across all keys;
    identical contents sets are evaluated once.  With workers > 1, keys are
    evaluated in a thread pool; results are identical to the serial path
    because all draws are precomputed per entity.
    """
    n = params.n_samples

    obj_sorted: list[np.ndarray] = []  # (n, 3) per object, axes sorted per trial
    obj_volume: list[np.ndarray] = []  # (n,) per object
    for obj in scene.objects:
        z = object_stream(params.master_seed, obj.name).standard_normal((n, 3))
        mean = np.asarray(obj.dims.mean, dtype=float)
        std = np.asarray(obj.dims.std, dtype=float)
        eff = np.maximum(mean + std * z, params.dim_floor) * obj.rigidity
        obj_sorted.append(np.sort(eff, axis=1))
        obj_volume.append(np.prod(eff, axis=1))

    box_sorted: dict[str, np.ndarray] = {}
    box_volume: dict[str, np.ndarray] = {}
    for box in scene.boxes:
        z = box_stream(params.master_seed, box.id).standard_normal((n, 3))
        mean = np.asarray(box.dims.mean, dtype=float)
        std = np.asarray(box.dims.std, dtype=float)
        dims = np.maximum(mean + std * z, params.dim_floor)
        box_sorted[box.id] = np.sort(dims, axis=1)
        box_volume[box.id] = np.prod(dims, axis=1)

    box_ids = scene.box_ids()
    keys: set[tuple[str, tuple[int, ...]]] = set()
    for placement in hypotheses:
        for b, box_id in enumerate(box_ids):
            keys.add((box_id, tuple(sorted(box_contents(placement, b)))))

    def rate_for(key: tuple[str, tuple[int, ...]]) -> float:
        box_id, contents = key
        accept = np.ones(n, dtype=bool)  # the empty set fits every trial
        if contents:
            total = np.zeros(n)
            for i in contents:
                accept = accept & np.all(obj_sorted[i] <= box_sorted[box_id], axis=1)
                total = total + obj_volume[i]
            accept = accept & (total <= params.eta * box_volume[box_id])
        return int(np.count_nonzero(accept)) / n

    ordered = sorted(keys)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(rate_for, ordered))
    else:
        values = [rate_for(key) for key in ordered]

    return VisualLikelihoodTable(rates=dict(zip(ordered, values)), n_samples=n)
