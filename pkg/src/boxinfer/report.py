"""Inference report document: assembly and byte-stable rendering.

Reports serialize with a fixed field order and every float rounded to 12
significant digits, so identical runs diff byte-for-byte.
"""

from __future__ import annotations

import json


def round_sig12(value: float) -> float:
    """Round to 12 significant digits for reproducible serialization."""
    return float(f"{value:.12g}")


def _rounded(node):
    if isinstance(node, bool) or node is None or isinstance(node, (int, str)):
        return node
    if isinstance(node, float):
        return round_sig12(node)
    if isinstance(node, dict):
        return {k: _rounded(v) for k, v in node.items()}
    if isinstance(node, (list, tuple)):
        return [_rounded(v) for v in node]
    raise TypeError(f"unsupported report value type: {type(node).__name__}")


def assemble_report(
    scenario_id: str,
    mode: str,
    config: dict,
    marginals: dict,
    map_placement: dict | None,
    posterior_entropy_nats: float | None,
    diagnostics: dict,
) -> dict:
    """Report dict in the documented field order (insertion order is the contract)."""
    return {
        "scenario_id": scenario_id,
        "mode": mode,
        "config": config,
        "marginals": marginals,
        "map_placement": map_placement,
        "posterior_entropy_nats": posterior_entropy_nats,
        "diagnostics": diagnostics,
    }


def render_json(doc: dict) -> str:
    """Serialize any report-like document, newline-terminated, floats at 12 significant digits."""
    return json.dumps(_rounded(doc), indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def render_report(report: dict) -> str:
    """Serialize an inference report; field order is part of the contract."""
    return render_json(report)
