"""Deterministic subset generators for experiments and batch runs."""

from __future__ import annotations

from math import gcd

import numpy as np

from .errors import BadGenerator, InputError
from .groups import FiniteGroup, GroupSubset, Subgroup, is_cyclic_preset


def _int(spec: dict, key: str, default=None, minimum: int = 0) -> int:
    v = spec.get(key, default)
    if not isinstance(v, int) or isinstance(v, bool) or v < minimum:
        raise BadGenerator(f"generator field {key!r} must be an integer >= {minimum}")
    return v


def _name(spec: dict) -> str:
    return str(spec.get("generator", "")).replace("-", "_")


def generate_set(spec: dict, G: FiniteGroup, seed: int = 0) -> GroupSubset:
    """Build a subset from a generator spec; ``seed`` is used when the spec has none.

    Generators: ``explicit`` (elements), ``random`` (size or density),
    ``coset_union_with_noise`` (subgroup, count, flips), ``arc`` (length, start;
    cyclic groups) and ``quadratic_residues`` (cyclic groups).
    """
    if not isinstance(spec, dict):
        raise BadGenerator("generator spec must be a JSON object")
    kind = _name(spec)
    if kind == "explicit":
        elems = spec.get("elements")
        if not isinstance(elems, list):
            raise BadGenerator("explicit generator needs 'elements'")
        try:
            return GroupSubset.from_elements(G, elems)
        except InputError as exc:
            raise BadGenerator(str(exc)) from None
    rng = np.random.default_rng(_int(spec, "seed", seed))
    n = G.order
    if kind == "random":
        if "size" in spec:
            k = _int(spec, "size")
            if k > n:
                raise BadGenerator(f"size {k} exceeds group order {n}")
            return GroupSubset.from_elements(G, rng.choice(n, size=k, replace=False).tolist())
        from .schema import frac

        try:
            p = frac(spec.get("density", "1/2"))
        except InputError as exc:
            raise BadGenerator(str(exc)) from None
        if not 0 <= p <= 1:
            raise BadGenerator("density must lie in [0, 1]")
        draw = rng.integers(0, p.denominator, size=n)
        return GroupSubset.from_indicator(G, draw < p.numerator)
    if kind == "coset_union_with_noise":
        from .groups import subgroup_from_json

        try:
            H = spec["subgroup"] if isinstance(spec.get("subgroup"), Subgroup) else subgroup_from_json(G, spec.get("subgroup"))
        except InputError as exc:
            raise BadGenerator(f"bad subgroup: {exc}") from None
        count, flips = _int(spec, "count"), _int(spec, "flips", 0)
        if count > H.index or flips > n:
            raise BadGenerator("count exceeds the number of cosets or flips exceed the group order")
        chosen = np.zeros(H.index, dtype=bool)
        chosen[rng.choice(H.index, size=count, replace=False)] = True
        ind = chosen[H.coset_of].copy()
        flip = rng.choice(n, size=flips, replace=False)
        ind[flip] = ~ind[flip]
        return GroupSubset.from_indicator(G, ind)
    if kind in ("arc", "quadratic_residues"):
        if not is_cyclic_preset(G):
            raise BadGenerator(f"{kind} needs a cyclic group")
        if kind == "arc":
            length, start = _int(spec, "length"), _int(spec, "start", 0)
            if length > n:
                raise BadGenerator("arc longer than the group")
            return GroupSubset.from_elements(G, [(start + i) % n for i in range(length)])
        return GroupSubset.from_elements(G, sorted({x * x % n for x in range(n) if gcd(x, n) == 1}))
    raise BadGenerator(f"unknown generator {spec.get('generator')!r}")
