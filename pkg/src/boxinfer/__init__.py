"""Bayesian inference of hidden-object placements from structured scene descriptions.

Pipeline: a validated scene document (objects with uncertain dimensions, boxes,
per-box audio classifier posteriors) feeds an exhaustive hypothesis space over
object-to-box placements; Monte Carlo rejection sampling scores each
hypothesis's geometric plausibility; audio and visual evidence multiply under
a uniform prior into a normalized posterior, which marginalizes to per-object
placement distributions.  Unimodal baselines and a model-vs-human evaluation
harness round out the package.
"""

from .errors import (
    EmptyHypothesisSpaceError,
    EvalDataError,
    HypothesisCapError,
    InferenceError,
    InternalConsistencyError,
    OraclePreconditionError,
    RatingsFormatError,
    SceneFormatError,
    SceneValidationError,
    UndefinedCorrelationError,
)
from .evaluation import (
    EvalReport,
    HumanRating,
    correlate,
    load_ratings,
    pearson_r,
    split_half_agreement,
)
from .fusion import (
    MODE_AUDIO,
    MODE_FULL,
    MODE_VISION,
    InferenceConfig,
    MarginalTable,
    PosteriorResult,
    audio_only_baseline,
    audio_score,
    build_report,
    hypothesis_weight,
    map_hypothesis,
    marginal_table,
    marginals,
    posterior,
    posterior_entropy,
    vision_only_baseline,
)
from .geometry import (
    FitParams,
    VisualLikelihoodTable,
    effective_dims,
    item_fits,
    sample_dims,
    set_fits,
    visual_likelihood_table,
)
from .hypotheses import (
    HypothesisSet,
    Placement,
    box_contents,
    count_hypotheses,
    enumerate_hypotheses,
    stirling2,
)
from .oracle import SyntheticScene, brute_force_marginals, generate_scene
from .report import render_report
from .scene import (
    AudioPosterior,
    BoxSpec,
    ObjectSpec,
    ParsedScene,
    UncertainDims,
    UncertainScalar,
    Violation,
    load_scene,
    load_scene_file,
    serialize_scene,
    validate_scene,
)

__version__ = "0.1.0"
