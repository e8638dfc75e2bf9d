"""Exact torus arithmetic, characters, Bohr neighborhoods and approximate homomorphisms.

Every torus value is a rational in [0, 1).  Characters of a group ``H`` take
values in ``(1/e)Z/Z`` with ``e`` the exponent of the abelianization, so they
are stored as integer numerators over that common denominator.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Sequence

import numpy as np

from .abelian import abelianization
from .errors import (
    BadRadius,
    CorrectionFailed,
    InputError,
    InternalCheckFailed,
    NotApproxHom,
    RankMismatch,
)
from .groups import FiniteGroup, GroupSubset, Subgroup, whole


def _unit(q) -> Fraction:
    q = Fraction(q)
    return q - (q.numerator // q.denominator)


@dataclass(frozen=True)
class TorusPoint:
    coords: tuple[Fraction, ...]

    def __init__(self, coords: Sequence = ()):
        object.__setattr__(self, "coords", tuple(_unit(c) for c in coords))

    @classmethod
    def origin(cls, r: int) -> "TorusPoint":
        return cls((0,) * r)

    @property
    def rank(self) -> int:
        return len(self.coords)

    def __add__(self, other: "TorusPoint") -> "TorusPoint":
        _same_rank(self, other)
        return TorusPoint([a + b for a, b in zip(self.coords, other.coords)])

    def __sub__(self, other: "TorusPoint") -> "TorusPoint":
        _same_rank(self, other)
        return TorusPoint([a - b for a, b in zip(self.coords, other.coords)])

    def __neg__(self) -> "TorusPoint":
        return TorusPoint([-a for a in self.coords])


def _same_rank(x: TorusPoint, y: TorusPoint) -> None:
    if x.rank != y.rank:
        raise RankMismatch(f"torus ranks differ: {x.rank} vs {y.rank}")


def circle_distance(a, b) -> Fraction:
    d = _unit(Fraction(a) - Fraction(b))
    return min(d, 1 - d)


def torus_distance(x: TorusPoint, y: TorusPoint) -> Fraction:
    """Max over coordinates of the circle distance ``min(|a-b|, 1-|a-b|)``; 0 in rank 0."""
    _same_rank(x, y)
    return max((circle_distance(a, b) for a, b in zip(x.coords, y.coords)), default=Fraction(0))


# numerators over larger denominators are kept as Python ints (object arrays)
_INT_SAFE = 2 ** 60


def _exact(num: np.ndarray, den: int) -> np.ndarray:
    return num.astype(object) if den >= _INT_SAFE and num.dtype != object else num


def _dist_num(num: np.ndarray, den: int) -> np.ndarray:
    """Circle distance to 0 of ``num/den`` as a numerator over ``den``."""
    r = np.mod(num, den)
    return np.minimum(r, den - r)


def _below(dnum: np.ndarray, den: int, bound: Fraction) -> np.ndarray:
    """Elementwise ``dnum/den < bound`` in exact integer arithmetic."""
    if den * max(bound.numerator, bound.denominator) >= _INT_SAFE:
        dnum = dnum.astype(object)
    return np.asarray(dnum * bound.denominator < bound.numerator * den, dtype=bool)


# -------------------------------------------------------------- characters

@dataclass(frozen=True, eq=False)
class Character:
    """``x -> sum_i c_i * proj_i(x) / d_i (mod 1)``; value at ``x`` is ``num[x] / den``."""

    domain: FiniteGroup
    coeffs: tuple[int, ...]
    factors: tuple[int, ...]
    num: np.ndarray
    den: int

    def __call__(self, x: int) -> Fraction:
        return Fraction(int(self.num[x]), self.den)

    @property
    def values(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(int(v), self.den) for v in self.num)

    def __eq__(self, other) -> bool:
        return (isinstance(other, Character) and other.domain is self.domain
                and other.coeffs == self.coeffs)

    def __hash__(self) -> int:
        return hash((id(self.domain), self.coeffs))

    def __repr__(self) -> str:
        return f"Character(coeffs={list(self.coeffs)}, factors={list(self.factors)})"

    def to_json(self) -> dict:
        return {"coeffs": list(self.coeffs), "invariant_factors": list(self.factors)}


def character_from_coeffs(H: FiniteGroup, coeffs: Sequence[int]) -> Character:
    ab = abelianization(H)
    coeffs = tuple(int(c) for c in coeffs)
    if len(coeffs) != len(ab.factors):
        raise RankMismatch(f"expected {len(ab.factors)} coefficients, got {len(coeffs)}")
    e = ab.exponent
    coeffs = tuple(c % d for c, d in zip(coeffs, ab.factors))
    scale = np.array([c * (e // d) for c, d in zip(coeffs, ab.factors)], dtype=np.int64)
    num = (ab.coords @ scale) % e if coeffs else np.zeros(H.order, dtype=np.int64)
    num = num.astype(np.int64)
    num.setflags(write=False)
    return Character(H, coeffs, ab.factors, num, e)


def characters(H: FiniteGroup) -> list[Character]:
    """All homomorphisms ``H -> T``, sorted lexicographically by coefficient tuple."""
    if "characters" not in H._cache:
        ab = abelianization(H)
        chars = [character_from_coeffs(H, c) for c in itertools.product(*[range(d) for d in ab.factors])]
        H._cache["characters"] = tuple(chars)
    return list(H._cache["characters"])


def character_matrix(H: FiniteGroup) -> np.ndarray:
    """Numerators of all characters, one row per character, over the exponent of ``H^ab``."""
    if "character_matrix" not in H._cache:
        mat = np.stack([c.num for c in characters(H)])
        mat.setflags(write=False)
        H._cache["character_matrix"] = mat
    return H._cache["character_matrix"]


def character_from_json(H: FiniteGroup, obj) -> Character:
    if isinstance(obj, dict):
        coeffs = obj.get("coeffs")
        factors = obj.get("invariant_factors")
    else:
        coeffs, factors = obj, None
    if not isinstance(coeffs, list) or not all(isinstance(c, int) for c in coeffs):
        raise InputError("character needs an integer 'coeffs' list")
    chi = character_from_coeffs(H, coeffs)
    if factors is not None and tuple(factors) != chi.factors:
        raise RankMismatch(f"invariant factors {factors} do not match {list(chi.factors)}")
    return chi


# ---------------------------------------------------------- Bohr neighborhoods

def _resolve(H) -> tuple[Subgroup, FiniteGroup, tuple[int, ...]]:
    if isinstance(H, Subgroup):
        local, emb = H.as_group()
        return H, local, emb
    if isinstance(H, FiniteGroup):
        return whole(H), H, tuple(range(H.order))
    raise InputError("expected a FiniteGroup or a Subgroup")


@dataclass(frozen=True, eq=False)
class BohrSpec:
    """``{x in H : max_i d(tau_i(x), 0) < delta}``.

    ``local`` lives in ``H`` as a stand-alone group (the characters' domain);
    ``realized`` is the same set in the ambient group.
    """

    subgroup: Subgroup
    taus: tuple[Character, ...]
    delta: Fraction
    local: GroupSubset
    realized: GroupSubset

    @property
    def rank(self) -> int:
        return len(self.taus)

    def __len__(self) -> int:
        return len(self.realized)


def max_distance_num(taus: Sequence[Character], n: int) -> tuple[np.ndarray, int]:
    """``max_i d(tau_i(x), 0)`` for every x, as numerators over a common denominator."""
    if not taus:
        return np.zeros(n, dtype=np.int64), 1
    den = taus[0].den
    out = np.zeros(n, dtype=np.int64)
    for t in taus:
        if t.den != den:
            raise InputError("characters do not share a denominator")
        np.maximum(out, _dist_num(t.num, den), out=out)
    return out, den


def bohr_neighborhood(H, taus: Sequence[Character], delta) -> BohrSpec:
    delta = Fraction(delta)
    if delta <= 0:
        raise BadRadius("delta must be positive")
    sub, local, emb = _resolve(H)
    taus = tuple(taus)
    for t in taus:
        if t.domain is not local:
            raise InputError("character is defined on a different group")
    dnum, den = max_distance_num(taus, local.order)
    ind = _below(dnum, den, delta)
    loc = GroupSubset.from_indicator(local, ind)
    amb = GroupSubset.from_elements(sub.group, [emb[x] for x in np.flatnonzero(ind)])
    return BohrSpec(sub, taus, delta, loc, amb)


def ball_volume(r: int, delta) -> Fraction:
    """Haar measure of the open max-metric ball of radius delta in ``T^r``."""
    delta = Fraction(delta)
    if delta <= 0:
        raise BadRadius("delta must be positive")
    if r < 0:
        raise InputError("rank must be non-negative")
    return min(2 * delta, Fraction(1)) ** r


@dataclass(frozen=True)
class AveragingShift:
    center: TorusPoint
    S: GroupSubset
    a: int


def _center_candidates(vals: np.ndarray, e: int, delta: Fraction) -> tuple[list[Fraction], np.ndarray]:
    """Per-coordinate centers, one per distinct ball trace, ascending, plus their indicator rows.

    The trace {x : d(v_x, t) < delta} only changes when t crosses some
    ``v +- delta``; at a crossing point it is contained in the traces of both
    neighbouring open arcs, so the midpoints of consecutive breakpoints reach
    every maximal trace.
    """
    L = lcm(e, delta.denominator)
    D = 2 * L
    vnum = np.unique(vals) * (D // e)
    dstep = delta.numerator * (D // delta.denominator)
    bps = np.unique(np.mod(np.concatenate([vnum - dstep, vnum + dstep]), D))
    nxt = np.roll(bps, -1)
    nxt[-1] += D
    mids = np.mod((bps + nxt) // 2, D)
    mids = np.unique(mids)
    diff = np.mod(vals[None, :] * (D // e) - mids[:, None], D)
    dist = np.minimum(diff, D - diff)
    rows = dist < dstep
    seen, keep = set(), []
    for i, row in enumerate(rows):
        key = row.tobytes()
        if key not in seen:
            seen.add(key)
            keep.append(i)
    return [Fraction(int(mids[i]), D) for i in keep], rows[keep]


def averaging_shift(H, taus: Sequence[Character], delta) -> AveragingShift:
    """A center ``t`` maximizing ``|S|``, ``S = {x : d(tau(x), t) < delta}``, and ``a`` in S.

    ``|S| >= ball_volume(r, delta) |H|`` and ``S a^-1`` lies in ``B_{tau, 2 delta}``;
    both are re-checked.  Ties go to the lexicographically smallest center.
    """
    delta = Fraction(delta)
    if delta <= 0:
        raise BadRadius("delta must be positive")
    taus = tuple(taus)
    if not taus:
        raise InputError("averaging needs at least one character")
    sub, local, emb = _resolve(H)
    n = local.order
    cands = [_center_candidates(t.num, t.den, delta) for t in taus]
    best, best_ix = -1, None
    heads = cands[:-2] if len(cands) >= 2 else []
    for head in itertools.product(*[range(len(c[0])) for c in heads]):
        w = np.ones(n, dtype=bool)
        for c, i in zip(heads, head):
            w &= c[1][i]
        if len(cands) == 1:
            counts = cands[0][1].sum(axis=1)
            j = int(np.argmax(counts))
            tail, val = (j,), int(counts[j])
        else:
            M1 = cands[-2][1] & w
            M2 = cands[-1][1]
            counts = M1.astype(np.int64) @ M2.T.astype(np.int64)
            flat = int(np.argmax(counts))
            tail, val = divmod(flat, counts.shape[1]), int(counts.flat[flat])
        if val > best:
            best, best_ix = val, tuple(head) + tuple(tail)
    ind = np.ones(n, dtype=bool)
    for c, i in zip(cands, best_ix):
        ind &= c[1][i]
    center = TorusPoint([c[0][i] for c, i in zip(cands, best_ix)])
    a_loc = int(np.flatnonzero(ind)[0])
    S_loc = np.flatnonzero(ind)
    bound = ball_volume(len(taus), delta) * n
    if len(S_loc) < bound:
        raise InternalCheckFailed(f"averaging bound violated: |S|={len(S_loc)} < {bound}")
    B2 = bohr_neighborhood(local, taus, 2 * delta).local
    shifted = local.mul[S_loc, local.inv[a_loc]]
    if not all(int(y) in B2 for y in shifted):
        raise InternalCheckFailed("S a^-1 escapes the doubled Bohr neighborhood")
    S = GroupSubset.from_elements(sub.group, [emb[x] for x in S_loc])
    return AveragingShift(center, S, emb[a_loc])


# ------------------------------------------------------ approximate homomorphisms

@dataclass(frozen=True, eq=False)
class TorusMap:
    """A map ``H -> T^r``; ``num[x, i] / den`` is coordinate ``i`` of ``f(x)``."""

    domain: FiniteGroup
    rank: int
    num: np.ndarray
    den: int

    @classmethod
    def from_values(cls, H: FiniteGroup, values: Sequence[Sequence]) -> "TorusMap":
        if len(values) != H.order:
            raise InputError(f"expected {H.order} values, got {len(values)}")
        pts = [v if isinstance(v, TorusPoint) else TorusPoint(v) for v in values]
        rank = pts[0].rank if pts else 0
        for p in pts:
            if p.rank != rank:
                raise RankMismatch("torus map values have mixed ranks")
        den = lcm(1, *[c.denominator for p in pts for c in p.coords])
        dtype = object if den >= _INT_SAFE else np.int64
        num = np.array([[int(c * den) for c in p.coords] for p in pts], dtype=dtype).reshape(H.order, rank)
        if num[H.identity].any():
            raise InputError("a torus map must send the identity to the origin")
        num.setflags(write=False)
        return cls(H, rank, num, den)

    @classmethod
    def from_characters(cls, H: FiniteGroup, taus: Sequence[Character]) -> "TorusMap":
        den = taus[0].den if taus else 1
        num = np.stack([t.num for t in taus], axis=1) if taus else np.zeros((H.order, 0), dtype=np.int64)
        return cls(H, len(taus), num, den)

    def __call__(self, x: int) -> TorusPoint:
        return TorusPoint([Fraction(int(v), self.den) for v in self.num[x]])

    @property
    def values(self) -> list[TorusPoint]:
        return [self(x) for x in range(self.domain.order)]

    def to_json(self) -> dict:
        from .schema import rat

        return {"rank": self.rank, "values": [[rat(c) for c in p.coords] for p in self.values]}


def defect(f: TorusMap, chunk: int = 256) -> Fraction:
    """``max_{x,y} d(f(xy), f(x) + f(y))``."""
    H, den = f.domain, f.den
    worst = 0
    for lo in range(0, H.order, chunk):
        xs = np.arange(lo, min(lo + chunk, H.order))
        prod = H.mul[xs]
        for i in range(f.rank):
            col = f.num[:, i]
            diff = col[prod] - col[xs][:, None] - col[None, :]
            worst = max(worst, int(_dist_num(diff, den).max()))
    return Fraction(worst, den)


def approximate_bohr(f: TorusMap, epsilon) -> GroupSubset:
    """``{x : d(f(x), 0) < epsilon}``."""
    epsilon = Fraction(epsilon)
    if epsilon <= 0:
        raise BadRadius("epsilon must be positive")
    H = f.domain
    if f.rank == 0:
        return GroupSubset.full(H)
    dnum = _dist_num(f.num, f.den).max(axis=1)
    return GroupSubset.from_indicator(H, _below(dnum, f.den, epsilon))


def nearest_homomorphism(f: TorusMap) -> tuple[list[Character], Fraction]:
    """Per coordinate, the character minimizing ``sup_x d(f_i(x), chi(x))``; first in canonical order on ties."""
    H = f.domain
    chars = characters(H)
    mat = character_matrix(H)
    e = chars[0].den
    D = lcm(e, f.den)
    cm = _exact(mat, D) * (D // e)
    taus, sup = [], Fraction(0)
    for i in range(f.rank):
        col = _exact(f.num[:, i], D) * (D // f.den)
        best = np.empty(len(chars), dtype=object if D >= _INT_SAFE else np.int64)
        for lo in range(0, len(chars), 512):
            block = _dist_num(col[None, :] - cm[lo:lo + 512], D)
            best[lo:lo + 512] = block.max(axis=1)
        j = int(np.argmin(best))
        taus.append(chars[j])
        sup = max(sup, Fraction(int(best[j]), D))
    return taus, sup


def bohr_inside_approximate(f: TorusMap, delta) -> BohrSpec:
    """Correct a delta-homomorphism to the nearest character tuple and nest its Bohr set in Y.

    ``Y = {x : d(f(x), 0) < 3 delta}``.  When the correction lies within
    ``2 delta`` of ``f`` the triangle inequality puts ``B_{tau, delta}``
    inside ``Y``; otherwise :class:`CorrectionFailed` is raised.
    """
    delta = Fraction(delta)
    if delta <= 0:
        raise BadRadius("delta must be positive")
    dfc = defect(f)
    if dfc >= delta:
        raise NotApproxHom(f"defect {dfc} is not below delta {delta}")
    Y = approximate_bohr(f, 3 * delta)
    taus, sup = nearest_homomorphism(f)
    if sup >= 2 * delta:
        raise CorrectionFailed(f"nearest character is at distance {sup} >= 2 delta = {2 * delta}", taus, sup)
    B = bohr_neighborhood(f.domain, taus, delta)
    if not B.realized.issubset(Y):
        raise InternalCheckFailed("corrected Bohr neighborhood is not inside the approximate Bohr set")
    return B
