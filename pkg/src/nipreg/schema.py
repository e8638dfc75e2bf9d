"""JSON encodings: rationals as "num/den", subsets as element lists or little-endian hex masks."""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

import numpy as np

from .errors import InputError, MaskLengthMismatch
from .groups import FiniteGroup, GroupSubset


def frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise InputError(f"not a rational: {x!r}")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError):
            raise InputError(f"not a rational: {x!r}") from None
    raise InputError(f"rationals must be strings like '3/10', got {x!r}")


def rat(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def load_json_arg(arg):
    """Accept inline JSON text or a path to a JSON file."""
    if isinstance(arg, (dict, list)):
        return arg
    text = arg.strip()
    if not text.startswith(("{", "[")):
        try:
            text = Path(arg).read_text()
        except OSError as exc:
            raise InputError(f"cannot read {arg!r}: {exc}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON: {exc}") from None


def subset_from_json(G: FiniteGroup, obj) -> GroupSubset:
    if isinstance(obj, list):
        obj = {"elements": obj}
    if not isinstance(obj, dict):
        raise InputError("subset must be a JSON object")
    if "elements" in obj:
        elems = obj["elements"]
        if not isinstance(elems, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in elems):
            raise InputError("'elements' must be a list of integers")
        return GroupSubset.from_elements(G, elems)
    if "mask_hex" in obj:
        try:
            mask = int(obj["mask_hex"], 16)
        except (TypeError, ValueError):
            raise InputError("'mask_hex' must be a hex string") from None
        if mask >> G.order:
            raise MaskLengthMismatch(f"mask_hex has bits beyond group order {G.order}")
        return GroupSubset(G, mask)
    raise InputError("subset needs 'elements' or 'mask_hex'")


def subset_to_json(S: GroupSubset) -> dict:
    return {"elements": S.elements(), "mask_hex": S.hex()}


def encode(obj):
    """Recursively convert to JSON-ready values; rationals become "num/den" strings."""
    if isinstance(obj, Fraction):
        return rat(obj)
    if isinstance(obj, dict):
        return {str(k): encode(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [encode(v) for v in obj]
    if isinstance(obj, GroupSubset):
        return subset_to_json(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return encode(obj.tolist())
    return obj


def dumps(obj) -> str:
    return json.dumps(encode(obj), indent=2, sort_keys=True) + "\n"
