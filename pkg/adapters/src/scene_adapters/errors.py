"""Adapter error types."""

from __future__ import annotations


class AdapterError(Exception):
    """Base class for adapter failures."""


class ManifestError(AdapterError):
    """Stimulus manifest is malformed or references missing files."""


class ServiceError(AdapterError):
    """A model service failed after exhausting retries."""


class ResponseParseError(AdapterError):
    """A model service answered, but not in the expected structure.

    Carries the raw response text so failures can be diagnosed offline.
    """

    def __init__(self, message: str, raw: str = ""):
        super().__init__(message)
        self.raw = raw


class SchemaValidationError(AdapterError):
    """The composed scene document failed validation against the engine schema."""
