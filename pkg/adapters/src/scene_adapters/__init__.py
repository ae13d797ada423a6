"""Neural-parsing adapters: from raw stimuli to validated scene documents.

Three configurable model services supply the pieces: a language model guesses
object attributes from names, a vision model reads box dimensions off the
video's first frame, and a zero-shot audio classifier scores each box's clip
against the object labels.  Responses are cached on disk, so a frozen stimulus
set becomes a reproducible fixture.
"""

from .client import CallStats, ServiceClient
from .config import AdapterConfig, RetryPolicy, ServiceConfig, load_config
from .elicit import classify_audio, elicit_object_attributes, estimate_box_dims
from .errors import (
    AdapterError,
    ManifestError,
    ResponseParseError,
    SchemaValidationError,
    ServiceError,
)
from .manifest import BoxStimulus, StimulusManifest, load_manifest
from .pipeline import build_scene, build_scene_document, render_scene_document

__version__ = "0.1.0"
