"""Commutator quotient and invariant-factor decomposition of finite groups."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import prod

import numpy as np

from .groups import FiniteGroup, GroupSubset, Subgroup, mask_elements, quotient


@dataclass(frozen=True, eq=False)
class Abelianization:
    """``H -> H/[H,H] ≅ Z/d1 x ... x Z/dj`` with ``d1 | d2 | ... | dj``.

    ``coords[x]`` is the mixed-radix tuple of the image of ``x``; ``basis``
    lists elements of ``H`` whose images form the cyclic generators.
    """

    group: FiniteGroup
    factors: tuple[int, ...]
    coords: np.ndarray
    basis: tuple[int, ...]
    commutator: Subgroup

    @property
    def order(self) -> int:
        return prod(self.factors)

    @property
    def exponent(self) -> int:
        return self.factors[-1] if self.factors else 1


def commutator_subgroup(H: FiniteGroup) -> Subgroup:
    x = np.arange(H.order)
    xy = H.mul[x[:, None], x[None, :]]
    comm = H.mul[H.mul[xy, H.inv[:, None]], H.inv[None, :]]
    gens = np.unique(comm).tolist()
    return Subgroup(GroupSubset(H, H.closure(gens)))


def _multiple(Q: FiniteGroup, x: int, k: int) -> int:
    y = Q.identity
    for _ in range(k):
        y = int(Q.mul[y, x])
    return y


def _p_basis(Q: FiniteGroup, part: list[int], p: int) -> list[tuple[int, int]]:
    """Basis ``[(element, order), ...]`` of the abelian p-subgroup ``part``.

    Greedy: take an element of maximal order modulo the span so far, then
    subtract the span component of its order-multiple so the new generator
    meets the span trivially.
    """
    coords = {Q.identity: ()}
    basis: list[tuple[int, int]] = []
    orders = {}
    target = set(part)
    while len(coords) < len(target):
        best, best_t = None, 0
        for y in part:
            if y in coords:
                continue
            t, z = 1, y
            while z not in coords:
                z = int(Q.mul[z, y])
                t += 1
            if t > best_t:
                best, best_t = y, t
        y, t = best, best_t
        s = coords[_multiple(Q, y, t)]
        correction = Q.identity
        for (b, _), c in zip(basis, s):
            assert c % t == 0
            correction = Q.mul[correction, _multiple(Q, b, c // t)]
        y = int(Q.mul[y, Q.inv[correction]])
        orders[y] = t
        basis.append((y, t))
        new = {}
        for z, cz in coords.items():
            w = z
            for k in range(t):
                new[w] = cz + (k,)
                w = int(Q.mul[w, y])
        coords = new
    assert len(coords) == len(target) and all(t % p == 0 for _, t in basis)
    return basis


def _factor_primes(n: int) -> list[int]:
    ps, d = [], 2
    while d * d <= n:
        if n % d == 0:
            ps.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        ps.append(n)
    return ps


def decompose_abelian(Q: FiniteGroup) -> tuple[tuple[int, ...], tuple[int, ...], np.ndarray]:
    """Invariant factors, generators, and coordinates of an abelian group."""
    if Q.order == 1:
        return (), (), np.zeros((1, 0), dtype=np.int64)
    orders = [Q.element_order(x) for x in Q.elements()]
    per_prime = []
    for p in _factor_primes(Q.order):
        part = [x for x in Q.elements() if _is_power_of(orders[x], p)]
        basis = sorted(_p_basis(Q, part, p), key=lambda bt: -bt[1])
        per_prime.append(basis)
    width = max(len(b) for b in per_prime)
    gens, factors = [], []
    # slot 0 gets the largest prime powers; reverse later so d1 | d2 | ...
    for slot in range(width):
        g, d = Q.identity, 1
        for basis in per_prime:
            if slot < len(basis):
                b, t = basis[slot]
                g = int(Q.mul[g, b])
                d *= t
        gens.append(g)
        factors.append(d)
    gens.reverse()
    factors.reverse()
    coords = np.full((Q.order, len(factors)), -1, dtype=np.int64)
    for tup in itertools.product(*[range(d) for d in factors]):
        x = Q.identity
        for g, c in zip(gens, tup):
            x = int(Q.mul[x, _multiple(Q, g, c)])
        if coords[x, 0] != -1:
            raise AssertionError("invariant-factor basis is not independent")
        coords[x] = tup
    return tuple(factors), tuple(gens), coords


def _is_power_of(n: int, p: int) -> bool:
    while n % p == 0:
        n //= p
    return n == 1


def _preset_factors(H: FiniteGroup) -> tuple[int, ...] | None:
    """Factors of an abelian preset whose own mixed-radix coordinates already form a divisor chain."""
    spec = H.spec or {}
    if spec.get("preset") == "cyclic":
        factors = [spec["n"]]
    elif spec.get("preset") == "modular_quotient":
        factors = [spec["p"] ** spec["k"]]
    elif spec.get("preset") == "elementary_abelian":
        factors = [spec["p"]] * spec["k"]
    elif "abelian_invariants" in spec and "cayley_table" not in spec:
        factors = list(spec["abelian_invariants"])
    else:
        return None
    if any(d == 1 for d in factors) or any(b % a for a, b in zip(factors, factors[1:])):
        return None
    return tuple(factors)


def _mixed_radix(n: int, factors: tuple[int, ...]) -> np.ndarray:
    coords = np.zeros((n, len(factors)), dtype=np.int64)
    x = np.arange(n)
    for i in range(len(factors) - 1, -1, -1):
        coords[:, i] = x % factors[i]
        x = x // factors[i]
    return coords


def abelianization(H: FiniteGroup) -> Abelianization:
    """Presets with a divisor-chain factor list keep their native coordinates (so
    character ``(c,)`` on ``Z/n`` is ``x -> c x / n``); everything else goes
    through the commutator quotient."""
    if "abelianization" in H._cache:
        return H._cache["abelianization"]
    pf = _preset_factors(H)
    if pf is not None:
        coords = _mixed_radix(H.order, pf)
        coords.setflags(write=False)
        # the generator of slot i is the tuple with a single 1 in position i
        basis = tuple(prod(pf[i + 1:]) for i in range(len(pf)))
        ab = Abelianization(H, pf, coords, basis, Subgroup(GroupSubset(H, 1 << H.identity)))
        H._cache["abelianization"] = ab
        return ab
    K = commutator_subgroup(H)
    Q, proj = quotient(H, K)
    factors, gens, qcoords = decompose_abelian(Q)
    coords = qcoords[proj]
    coords.setflags(write=False)
    # lift each quotient generator to its coset representative in H
    basis = tuple(int(K.representatives[g]) for g in gens)
    ab = Abelianization(H, factors, coords, basis, K)
    H._cache["abelianization"] = ab
    return ab
