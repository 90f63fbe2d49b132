"""JSON documents for state specs and Dicke states.

Complex numbers are written as ``{"re": float, "im": float}``; plain JSON
numbers are accepted on input.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .dicke import DickeState
from .errors import InvalidSpec
from .fock import StateSpec


def encode_complex(z) -> dict:
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def decode_complex(obj) -> complex:
    if isinstance(obj, dict):
        try:
            return complex(float(obj["re"]), float(obj.get("im", 0.0)))
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidSpec(f"bad complex number {obj!r}") from exc
    if isinstance(obj, bool) or not isinstance(obj, (int, float)):
        raise InvalidSpec(f"bad complex number {obj!r}")
    return complex(obj)


def _decode_component(item):
    if isinstance(item, dict):
        return decode_complex(item.get("weight", 1.0)), decode_complex(item["alpha"])
    weight, alpha = item
    return decode_complex(weight), decode_complex(alpha)


def spec_from_dict(doc: dict) -> StateSpec:
    if not isinstance(doc, dict) or "kind" not in doc:
        raise InvalidSpec("spec document needs a 'kind' field")
    kind = doc["kind"]
    params = dict(doc.get("params", {}))
    try:
        if kind == "coherent":
            params["alpha"] = decode_complex(params["alpha"])
        elif kind == "cat":
            params["components"] = [_decode_component(c) for c in params["components"]]
        elif kind == "squeezed_vacuum" and "r_sq" in params:
            params["r"] = params.pop("r_sq")
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidSpec(f"bad parameters for {kind}: {exc}") from exc
    return StateSpec(kind, params)


def spec_to_dict(spec: StateSpec) -> dict:
    params = dict(spec.params)
    if spec.kind == "coherent":
        params["alpha"] = encode_complex(params["alpha"])
    elif spec.kind == "cat":
        params["components"] = [
            {"weight": encode_complex(w), "alpha": encode_complex(a)}
            for w, a in params["components"]
        ]
    return {"kind": spec.kind, "params": params}


def load_spec(text: str) -> StateSpec:
    """Inline JSON, ``@path``, or a bare path to a JSON file."""
    text = text.strip()
    if text.startswith("@"):
        text = Path(text[1:]).read_text()
    elif not text.startswith("{"):
        text = Path(text).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidSpec(f"spec is not valid JSON: {exc}") from exc
    return spec_from_dict(doc)


def dicke_to_dict(state: DickeState) -> dict:
    return {"N": state.N, "amplitudes": [encode_complex(c) for c in state.amplitudes]}


def dicke_from_dict(doc: dict) -> DickeState:
    amps = np.array([decode_complex(c) for c in doc["amplitudes"]])
    if len(amps) != int(doc["N"]) + 1:
        raise InvalidSpec("amplitude count must be N + 1")
    return DickeState(amps)
