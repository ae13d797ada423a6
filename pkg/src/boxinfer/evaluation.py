"""Model-versus-human comparison: ratings ingestion, Pearson r, split-half screening.

Human ratings arrive as a delimited UTF-8 table with header
``scenario_id,participant_id,object,box,rating``; each rating lies in [1, 100]
and a participant's ratings for one object sum to 100 across boxes (within a
slider-granularity tolerance of 1).  Model marginals are scaled by 100 and
paired with per-(object, box, scenario) human means; scenarios whose raters
disagree too much (split-half correlation below a threshold) are screened out
before correlating.
"""

from __future__ import annotations

import csv
import hashlib
import io
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import EvalDataError, RatingsFormatError, UndefinedCorrelationError
from .fusion import MarginalTable

RATINGS_HEADER = ("scenario_id", "participant_id", "object", "box", "rating")
RATING_SUM_TOL = 1.0  # sliders snap to integers; per-object sums may miss 100 by a point


class RatingSumWarning(UserWarning):
    """A participant's ratings for one object do not sum to 100 across boxes."""


@dataclass(frozen=True)
class HumanRating:
    scenario_id: str
    participant_id: str
    object: str
    box: str
    rating: float


@dataclass(frozen=True)
class PairedPoint:
    """One scatter point: model probability (x100) against the human mean rating."""

    scenario_id: str
    object: str
    box: str
    model: float
    human: float


@dataclass(frozen=True)
class EvalReport:
    r_by_mode: dict[str, float]
    points_by_mode: dict[str, tuple[PairedPoint, ...]]
    split_half: dict[str, float | None]  # None: too few participants to estimate
    excluded_scenarios: tuple[str, ...]

    def to_json_dict(self, include_points: bool = False) -> dict:
        out = {
            "pearson_r": {mode: self.r_by_mode[mode] for mode in sorted(self.r_by_mode)},
            "n_points": {mode: len(self.points_by_mode[mode]) for mode in sorted(self.points_by_mode)},
            "split_half": {sid: self.split_half[sid] for sid in sorted(self.split_half)},
            "excluded_scenarios": sorted(self.excluded_scenarios),
        }
        if include_points:
            out["points"] = {
                mode: [
                    {"scenario_id": p.scenario_id, "object": p.object, "box": p.box,
                     "model": p.model, "human": p.human}
                    for p in self.points_by_mode[mode]
                ]
                for mode in sorted(self.points_by_mode)
            }
        return out


def pearson_r(xs, ys) -> float:
    """Pearson product-moment correlation coefficient."""
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError(f"need two equal-length 1-d sequences, got shapes {x.shape} and {y.shape}")
    if len(x) < 2:
        raise UndefinedCorrelationError(f"correlation needs at least 2 points, got {len(x)}")
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    if sxx == 0.0 or syy == 0.0:
        raise UndefinedCorrelationError("correlation undefined: an input has zero variance")
    r = float(dx @ dy) / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))


def load_ratings(text: str, strict: bool = False) -> list[HumanRating]:
    """Parse a ratings table, checking the per-object sum-to-100 invariant.

    Malformed rows raise with their line number.  Sum violations warn (or raise
    in strict mode) and the offending ratings are kept: they are data about
    noisy raters, not corruption.
    """
    reader = csv.reader(io.StringIO(text))
    rows = list(reader)
    if not rows:
        warnings.warn("empty ratings file", UserWarning, stacklevel=2)
        return []
    if tuple(h.strip() for h in rows[0]) != RATINGS_HEADER:
        raise RatingsFormatError(
            f"line 1: expected header {','.join(RATINGS_HEADER)!r}, got {','.join(rows[0])!r}"
        )

    ratings: list[HumanRating] = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != 5:
            raise RatingsFormatError(f"line {lineno}: expected 5 fields, got {len(row)}")
        scenario_id, participant_id, obj, box, rating_text = (cell.strip() for cell in row)
        try:
            rating = float(rating_text)
        except ValueError:
            raise RatingsFormatError(f"line {lineno}: rating {rating_text!r} is not a number") from None
        if not math.isfinite(rating) or not 1.0 <= rating <= 100.0:
            raise RatingsFormatError(f"line {lineno}: rating {rating} outside [1, 100]")
        ratings.append(HumanRating(scenario_id, participant_id, obj, box, rating))

    if not ratings:
        warnings.warn("no data rows in ratings file", UserWarning, stacklevel=2)
        return ratings

    sums: dict[tuple[str, str, str], float] = {}
    for r in ratings:
        key = (r.participant_id, r.scenario_id, r.object)
        sums[key] = sums.get(key, 0.0) + r.rating
    for (participant, scenario, obj), total in sums.items():
        if abs(total - 100.0) > RATING_SUM_TOL:
            msg = (
                f"ratings for participant {participant!r}, scenario {scenario!r}, object {obj!r} "
                f"sum to {total:g}, expected 100 within {RATING_SUM_TOL:g}"
            )
            if strict:
                raise RatingsFormatError(msg)
            warnings.warn(msg, RatingSumWarning, stacklevel=2)
    return ratings


def _participant_vectors(ratings: list[HumanRating], scenario_id: str):
    """Per-participant mean-rating vectors over the scenario's (object, box) keys."""
    scoped = [r for r in ratings if r.scenario_id == scenario_id]
    keys = sorted({(r.object, r.box) for r in scoped})
    participants = sorted({r.participant_id for r in scoped})
    cells: dict[tuple[str, str, str], list[float]] = {}
    for r in scoped:
        cells.setdefault((r.participant_id, r.object, r.box), []).append(r.rating)
    vectors = {}
    for p in participants:
        vec = []
        for obj, box in keys:
            values = cells.get((p, obj, box))
            if values is None:
                raise EvalDataError(
                    f"participant {p!r} has no rating for object {obj!r}, box {box!r} "
                    f"in scenario {scenario_id!r}; split-half needs complete vectors"
                )
            vec.append(math.fsum(values) / len(values))
        vectors[p] = np.array(vec)
    return participants, vectors


def split_half_agreement(
    ratings: list[HumanRating],
    scenario_id: str,
    seed: int = 0,
    n_splits: int = 100,
) -> float:
    """Mean Pearson r between mean-rating vectors of random participant halves."""
    participants, vectors = _participant_vectors(ratings, scenario_id)
    if len(participants) < 4:
        raise EvalDataError(
            f"scenario {scenario_id!r} has {len(participants)} participants; split-half needs at least 4"
        )
    digest = hashlib.blake2b(scenario_id.encode("utf-8"), digest_size=8).digest()
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, int.from_bytes(digest, "big")])))

    values = []
    for _ in range(n_splits):
        order = rng.permutation(len(participants))
        half = len(participants) // 2
        first = np.mean([vectors[participants[i]] for i in order[:half]], axis=0)
        second = np.mean([vectors[participants[i]] for i in order[half:]], axis=0)
        try:
            values.append(pearson_r(first, second))
        except UndefinedCorrelationError:
            continue  # a constant half-mean vector; skip this split
    if not values:
        raise UndefinedCorrelationError(
            f"split-half undefined for scenario {scenario_id!r}: every split produced constant vectors"
        )
    return math.fsum(values) / len(values)


def correlate(
    model_tables: dict[str, MarginalTable],
    ratings: list[HumanRating],
    exclusion_threshold: float | None = 0.8,
    seed: int = 0,
    n_splits: int = 100,
    per_participant: bool = False,
    mode_label: str = "model",
) -> EvalReport:
    """Pair model marginals (x100) with human ratings and correlate.

    By default each point is a human MEAN over participants; per_participant
    keeps one point per participant instead.  Scenarios with split-half
    agreement below exclusion_threshold are dropped (pass None to skip
    screening); scenarios with too few participants for the statistic are kept
    and recorded with agreement None.
    """
    rated = {r.scenario_id for r in ratings}
    shared = sorted(set(model_tables) & rated)
    if not shared:
        raise EvalDataError("no overlapping scenarios between model tables and ratings")

    split_half: dict[str, float | None] = {}
    excluded: list[str] = []
    for sid in shared:
        try:
            agreement = split_half_agreement(ratings, sid, seed=seed, n_splits=n_splits)
        except EvalDataError:
            agreement = None
        split_half[sid] = agreement
        if exclusion_threshold is not None and agreement is not None and agreement < exclusion_threshold:
            excluded.append(sid)

    kept = [sid for sid in shared if sid not in excluded]
    if not kept:
        raise EvalDataError("screening excluded every overlapping scenario")

    points: list[PairedPoint] = []
    for sid in kept:
        table = model_tables[sid]
        scoped = [r for r in ratings if r.scenario_id == sid]
        by_cell: dict[tuple[str, str], list[float]] = {}
        for r in scoped:
            by_cell.setdefault((r.object, r.box), []).append(r.rating)
        for o, obj in enumerate(table.objects):
            for b, box in enumerate(table.boxes):
                cell = by_cell.get((obj, box))
                if cell is None:
                    continue  # humans were never asked about this pair
                model_value = float(table.values[o, b]) * 100.0
                if per_participant:
                    points.extend(PairedPoint(sid, obj, box, model_value, h) for h in cell)
                else:
                    points.append(PairedPoint(sid, obj, box, model_value, math.fsum(cell) / len(cell)))

    if not points:
        raise EvalDataError("no (object, box) pairs shared between model tables and ratings")
    r = pearson_r([p.model for p in points], [p.human for p in points])
    return EvalReport(
        r_by_mode={mode_label: r},
        points_by_mode={mode_label: tuple(points)},
        split_half=split_half,
        excluded_scenarios=tuple(excluded),
    )


def combine_reports(reports: list[EvalReport]) -> EvalReport:
    """Merge per-mode reports produced against the same ratings."""
    if not reports:
        raise ValueError("no reports to combine")
    r_by_mode: dict[str, float] = {}
    points_by_mode: dict[str, tuple[PairedPoint, ...]] = {}
    for rep in reports:
        for mode, r in rep.r_by_mode.items():
            if mode in r_by_mode:
                raise ValueError(f"duplicate mode {mode!r} across reports")
            r_by_mode[mode] = r
            points_by_mode[mode] = rep.points_by_mode[mode]
    return EvalReport(
        r_by_mode=r_by_mode,
        points_by_mode=points_by_mode,
        split_half=reports[0].split_half,
        excluded_scenarios=reports[0].excluded_scenarios,
    )
