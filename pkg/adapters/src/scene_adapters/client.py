"""HTTP access to the model services, with retries and a disk response cache.

Every request is keyed by (service kind, model id, payload digest); the raw
JSON response is stored under that key in the cache directory, so a warm cache
answers identical queries byte-for-byte with zero network traffic.  Cache
writes take a file lock, letting several stimulus pipelines share a directory.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
from dataclasses import dataclass, field
from pathlib import Path

import httpx
from filelock import FileLock

from .config import AdapterConfig, ServiceConfig
from .errors import ServiceError


def _cache_key(kind: str, model: str, payload: dict) -> str:
    canonical = json.dumps({"kind": kind, "model": model, "payload": payload}, sort_keys=True)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


@dataclass
class CallStats:
    remote_calls: int = 0
    cache_hits: int = 0
    retries: int = 0


@dataclass
class ServiceClient:
    """Shared transport for the three services behind one cache directory."""

    config: AdapterConfig
    transport: httpx.BaseTransport | None = None  # tests inject a MockTransport
    stats: CallStats = field(default_factory=CallStats)

    def post(self, kind: str, service: ServiceConfig, payload: dict) -> dict:
        """POST payload to the service, or answer from cache; returns response JSON."""
        key = _cache_key(kind, service.model, payload)
        cache_dir = Path(self.config.cache_dir)
        cache_dir.mkdir(parents=True, exist_ok=True)
        cache_file = cache_dir / f"{key}.json"
        if cache_file.is_file():
            self.stats.cache_hits += 1
            return json.loads(cache_file.read_text(encoding="utf-8"))

        response = self._post_with_retries(kind, service, payload)
        with FileLock(str(cache_file) + ".lock"):
            tmp = cache_file.with_suffix(".tmp")
            tmp.write_text(json.dumps(response, sort_keys=True, indent=2) + "\n", encoding="utf-8")
            os.replace(tmp, cache_file)
        return response

    def _post_with_retries(self, kind: str, service: ServiceConfig, payload: dict) -> dict:
        headers = {"Content-Type": "application/json"}
        api_key = os.environ.get(service.api_key_env, "")
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
        body = dict(payload)
        body["model"] = service.model

        retry = self.config.retry
        last_error: Exception | None = None
        for attempt in range(1, retry.max_attempts + 1):
            if attempt > 1:
                self.stats.retries += 1
                time.sleep(retry.backoff_s * (attempt - 1))
            try:
                self.stats.remote_calls += 1
                with httpx.Client(transport=self.transport, timeout=60.0) as client:
                    response = client.post(service.base_url, json=body, headers=headers)
            except httpx.HTTPError as exc:
                last_error = exc
                continue
            if response.status_code == 200:
                try:
                    return response.json()
                except ValueError as exc:
                    raise ServiceError(
                        f"{kind} service at {service.base_url} returned non-JSON body"
                    ) from exc
            if response.status_code in (429,) or response.status_code >= 500:
                last_error = ServiceError(f"{kind} service returned HTTP {response.status_code}")
                continue
            raise ServiceError(f"{kind} service returned HTTP {response.status_code}")
        raise ServiceError(
            f"{kind} service at {service.base_url} failed after {retry.max_attempts} attempts: {last_error}"
        )
