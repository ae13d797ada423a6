"""Placement hypothesis space: exact counting and exhaustive enumeration.

A placement assigns every object to exactly one box and is encoded canonically
as a tuple of box indices ordered by the scene's object list.  The default
(surjective) mode requires every box to be non-empty, giving K!*S(N,K)
placements; allow-empty mode admits all K^N assignments.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations, product
from math import factorial

from .errors import HypothesisCapError

Placement = tuple[int, ...]

DEFAULT_MAX_HYPOTHESES = 10**6


def stirling2(n: int, k: int) -> int:
    """Stirling number of the second kind S(n, k), exact.

    Python integers are arbitrary precision, so the result can never silently
    wrap; enormous inputs fail on memory, not correctness.
    """
    if n < 0 or k < 0:
        raise ValueError(f"stirling2 requires n >= 0 and k >= 0, got ({n}, {k})")
    if k > n:
        return 0
    if n == 0:
        return 1  # k == 0 here; S(0,0) = 1
    if k == 0:
        return 0
    # row DP over S(i, j) = j*S(i-1, j) + S(i-1, j-1), starting from S(0, 0) = 1
    row = [1] + [0] * k
    for i in range(1, n + 1):
        new = [0] * (k + 1)
        for j in range(1, min(i, k) + 1):
            new[j] = j * row[j] + row[j - 1]
        row = new
    return row[k]


def count_hypotheses(n_objects: int, k_boxes: int, allow_empty: bool = False) -> int:
    """Number of placements of N objects into K boxes in the given mode."""
    if n_objects < 1 or k_boxes < 1:
        raise ValueError(f"need n_objects >= 1 and k_boxes >= 1, got ({n_objects}, {k_boxes})")
    if allow_empty:
        return k_boxes**n_objects
    return factorial(k_boxes) * stirling2(n_objects, k_boxes)


@dataclass(frozen=True)
class HypothesisSet:
    """All placements for one (N, K, mode), lexicographically sorted."""

    placements: tuple[Placement, ...]
    n_objects: int
    k_boxes: int
    allow_empty: bool

    def __len__(self) -> int:
        return len(self.placements)

    def __iter__(self):
        return iter(self.placements)


def _partitions_into_blocks(n: int, k: int) -> list[tuple[int, ...]]:
    """Restricted growth strings over n items using exactly k block labels.

    Block labels are assigned in order of first appearance, so each string
    names one set partition of {0..n-1} into k non-empty blocks.
    """
    out: list[tuple[int, ...]] = []
    a = [0] * n

    def rec(i: int, used: int) -> None:
        if n - i < k - used:  # too few items left to open the remaining blocks
            return
        if i == n:
            if used == k:
                out.append(tuple(a))
            return
        for b in range(min(used + 1, k)):
            a[i] = b
            rec(i + 1, used + 1 if b == used else used)

    rec(0, 0)
    return out


def enumerate_hypotheses(
    n_objects: int,
    k_boxes: int,
    allow_empty: bool = False,
    max_hypotheses: int = DEFAULT_MAX_HYPOTHESES,
) -> HypothesisSet:
    """All valid placements, lexicographically sorted and duplicate-free.

    Surjective placements are built from set partitions into exactly K blocks
    crossed with block-to-box assignments; allow-empty placements come from the
    plain K^N product.  The count is checked against the cap before any
    enumeration happens, so oversized requests fail fast instead of hanging.
    """
    count = count_hypotheses(n_objects, k_boxes, allow_empty)
    if count > max_hypotheses:
        raise HypothesisCapError(
            f"{count} placements for N={n_objects}, K={k_boxes} exceeds the cap of "
            f"{max_hypotheses}; reduce the scene size or raise max_hypotheses"
        )

    if allow_empty:
        placements = tuple(product(range(k_boxes), repeat=n_objects))
    else:
        built: list[Placement] = []
        for blocks in _partitions_into_blocks(n_objects, k_boxes):
            for perm in permutations(range(k_boxes)):
                built.append(tuple(perm[b] for b in blocks))
        built.sort()
        placements = tuple(built)

    if len(placements) != count:
        raise AssertionError(f"enumerated {len(placements)} placements, expected {count}")
    return HypothesisSet(placements=placements, n_objects=n_objects, k_boxes=k_boxes, allow_empty=allow_empty)


def box_contents(placement: Placement, box_index: int) -> frozenset[int]:
    """Indices of the objects this placement puts in the given box."""
    return frozenset(i for i, b in enumerate(placement) if b == box_index)
