"""Structure-and-regularity witnesses: subgroup, Bohr and exact decompositions of a subset.

All thresholds are compared in exact integer arithmetic.  A witness is a plain
record; the verifiers recompute everything they check from the group, the
set and the witness' defining data.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, comb
from typing import Sequence

import numpy as np

from .bohr import BohrSpec, Character, bohr_neighborhood, characters
from .errors import (
    BadRadius,
    BudgetExceeded,
    EmptyBase,
    InputError,
    InternalCheckFailed,
    MalformedWitness,
    NotCosetUnion,
    NotNormal,
)
from .groups import (
    FiniteGroup,
    GroupSubset,
    Subgroup,
    mask_elements,
    normal_subgroups_up_to_index,
    rows_to_masks,
)

DEFAULT_CANDIDATE_BUDGET = 1_000_000
DEFAULT_ALGEBRA_BUDGET = 200_000
ALGEBRA_MAX_ORDER = 256


def _lt(count: int, q: Fraction, size: int) -> bool:
    """``count < q * size``."""
    return count * q.denominator < q.numerator * size


def _check_eps(epsilon) -> Fraction:
    epsilon = Fraction(epsilon)
    if not 0 < epsilon <= 1:
        raise InputError("epsilon must lie in (0, 1]")
    return epsilon


def translate_counts(G: FiniteGroup, A: GroupSubset, B: GroupSubset) -> np.ndarray:
    """``|gB ∩ A|`` for every g."""
    elems = B.elements()
    if not elems:
        return np.zeros(G.order, dtype=np.int64)
    return A.indicator()[G.mul[:, elems]].sum(axis=1)


def bad_set(G: FiniteGroup, A: GroupSubset, B: GroupSubset, threshold) -> GroupSubset:
    """``{g : |gB ∩ A| >= t|B| and |gB \\ A| >= t|B|}``."""
    threshold = Fraction(threshold)
    if threshold <= 0:
        raise BadRadius("threshold must be positive")
    if isinstance(B, BohrSpec):
        B = B.realized
    if not len(B):
        raise EmptyBase("bad_set needs a nonempty base")
    b = len(B)
    inside = translate_counts(G, A, B)
    lim = threshold.numerator * b
    bad = (inside * threshold.denominator >= lim) & ((b - inside) * threshold.denominator >= lim)
    return GroupSubset.from_indicator(G, bad)


def separating_cover(G: FiniteGroup, base: GroupSubset, Z: GroupSubset) -> tuple[int, ...]:
    """Greedy maximal family in ``G \\ Z`` (ascending) with pairwise disjoint translates ``x * base``.

    Maximality gives ``G \\ Z ⊆ F base base^-1`` and disjointness gives
    ``|F| <= |G| / |base|``; both are re-checked.
    """
    if isinstance(base, BohrSpec):
        base = base.realized
    elems = base.elements()
    if not elems:
        raise EmptyBase("separating cover needs a nonempty base")
    taken = np.zeros(G.order, dtype=bool)
    zind = Z.indicator()
    F = []
    for x in range(G.order):
        if zind[x]:
            continue
        row = G.mul[x, elems]
        if not taken[row].any():
            taken[row] = True
            F.append(x)
    if len(F) > G.order // len(elems):
        raise InternalCheckFailed("separating cover is larger than 1/density")
    diff = np.unique(G.mul[np.ix_(elems, G.inv[elems])])
    covered = np.zeros(G.order, dtype=bool)
    covered[G.mul[np.ix_(F, diff)].ravel()] = True
    if (~covered & ~zind).any():
        raise InternalCheckFailed("separating cover misses part of the complement of Z")
    return tuple(F)


def gamma(epsilon, m: int, r: int, delta) -> Fraction:
    """``epsilon / m * (delta / 4)^r``."""
    return Fraction(epsilon) / m * (Fraction(delta) / 4) ** r


def build_structure_set(G: FiniteGroup, A: GroupSubset, B, F: Sequence[int], gamma_val) -> tuple[GroupSubset, tuple[int, ...]]:
    """``I = {i : |x_i B \\ A| < gamma |B|}`` and ``D`` the union of ``x_i B`` over I."""
    if isinstance(B, BohrSpec):
        B = B.realized
    gamma_val = Fraction(gamma_val)
    elems = B.elements()
    F = list(F)
    if not F or not elems:
        return GroupSubset.empty(G), ()
    rows = G.mul[np.ix_(F, elems)]
    outside = (~A.indicator()[rows]).sum(axis=1)
    sel = [i for i, o in enumerate(outside) if _lt(int(o), gamma_val, len(elems))]
    ind = np.zeros(G.order, dtype=bool)
    ind[rows[sel].ravel()] = True
    return GroupSubset.from_indicator(G, ind), tuple(sel)


# ------------------------------------------------------------- reports

@dataclass
class RegularityReport:
    kind: str
    accept: bool
    clauses: dict
    margins: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        from .schema import encode

        return encode({"kind": self.kind, "verdict": "accept" if self.accept else "reject",
                       "clauses": self.clauses, "margins": self.margins, "diagnostics": self.diagnostics})


def _clause(holds: bool, value, bound, **extra) -> dict:
    return {"holds": bool(holds), "value": value, "bound": bound, **extra}


# ------------------------------------------------------------- subgroup mode

@dataclass
class SubgroupWitness:
    H: Subgroup
    Z: GroupSubset
    D: GroupSubset
    epsilon: Fraction
    margins: tuple[int, ...]

    @property
    def index(self) -> int:
        return self.H.index


def _subgroup_candidate(A: GroupSubset, H: Subgroup, eps: Fraction):
    G = H.group
    h = H.order
    counts = H.coset_counts(A)
    mins = np.minimum(counts, h - counts)
    zc = mins * eps.denominator >= eps.numerator * h
    dc = ~zc & (2 * counts >= h)
    Z = GroupSubset.from_indicator(G, zc[H.coset_of])
    D = GroupSubset.from_indicator(G, dc[H.coset_of])
    return Z, D, tuple(int(v) for v in mins)


def find_subgroup_witness(G: FiniteGroup, A: GroupSubset, epsilon, n_max: int,
                          subgroups: Sequence[Subgroup] | None = None) -> SubgroupWitness | None:
    """First witness by (index, |Z|, canonical subgroup order).

    Z is the union of cosets meeting A and its complement in at least
    ``epsilon |H|`` points each, D the majority cosets outside Z.  A candidate
    is accepted when ``|Z| < epsilon |G|`` and ``|(A \\ Z) △ D| < epsilon |H|``.
    """
    eps = _check_eps(epsilon)
    subs = normal_subgroups_up_to_index(G, n_max) if subgroups is None else list(subgroups)
    best = None
    for H in subs:
        if best is not None and H.index > best.H.index:
            break
        Z, D, mins = _subgroup_candidate(A, H, eps)
        if not _lt(len(Z), eps, G.order):
            continue
        if not _lt(len((A - Z) ^ D), eps, H.order):
            continue
        if best is None or len(Z) < len(best.Z):
            best = SubgroupWitness(H, Z, D, eps, mins)
    return best


def verify_subgroup_witness(G: FiniteGroup, A: GroupSubset, w: SubgroupWitness) -> RegularityReport:
    H, Z, D, eps = w.H, w.Z, w.D, _check_eps(w.epsilon)
    for S, name in ((Z, "Z"), (D, "D")):
        if S.group is not G:
            raise MalformedWitness(f"{name} belongs to a different group")
        if not H.is_coset_union(S):
            raise MalformedWitness(f"{name} is not a union of cosets of H")
    if not H.normal:
        raise MalformedWitness("H is not normal")
    h = H.order
    counts = H.coset_counts(A)
    mins = np.minimum(counts, h - counts)
    zc = Z.indicator()[np.array(H.representatives)]
    outside = [(int(mins[c]), H.representatives[c]) for c in range(H.index) if not zc[c]]
    worst = max(outside, default=(0, None))
    sym = len((A - Z) ^ D)
    clauses = {
        "small_exceptional_set": _clause(_lt(len(Z), eps, G.order), Fraction(len(Z), G.order), eps),
        "structure": _clause(_lt(sym, eps, h), sym, eps * h),
        "regularity": _clause(_lt(worst[0], eps, h), worst[0], eps * h, worst_coset=worst[1]),
    }
    margins = {"coset_min_counts": [int(v) for v in mins], "index": H.index, "subgroup_order": h}
    return RegularityReport("subgroup", all(c["holds"] for c in clauses.values()), clauses, margins)


# ------------------------------------------------------------- Bohr mode

@dataclass
class BohrWitness:
    H: Subgroup
    taus: tuple[Character, ...]
    delta: Fraction
    B: BohrSpec
    Z: GroupSubset
    D: GroupSubset
    epsilon: Fraction
    cover: tuple[int, ...]
    selected: tuple[int, ...]
    margins: dict

    @property
    def r(self) -> int:
        return len(self.taus)

    @property
    def index(self) -> int:
        return self.H.index


def delta_grid(H_local: FiniteGroup) -> list[Fraction]:
    """``j/e`` for ``j = 1..ceil(e/2)``, descending, with ``e`` the exponent of ``H^ab``."""
    e = characters(H_local)[0].den
    return [Fraction(j, e) for j in range(ceil(e / 2), 0, -1)]


def _bohr_attempt(G, A, eps, H, taus, delta):
    """Evaluate one (H, taus, delta); returns the witness or None."""
    r = len(taus)
    B = bohr_neighborhood(H, taus, delta)
    b = len(B.realized)
    Z = bad_set(G, A, B.realized, eps)
    if not _lt(len(Z), eps, G.order):
        return None
    B0 = bohr_neighborhood(H, taus, delta / 2) if r else B
    F = separating_cover(G, B0.realized, Z)
    g = gamma(eps, H.index, r, delta)
    D, sel = build_structure_set(G, A, B.realized, F, g)
    resid = len((A ^ D) - Z)
    if not _lt(resid, eps, b):
        return None
    margins = {"bad_set_size": len(Z), "residual": resid, "bohr_size": b, "gamma": g}
    return BohrWitness(H, tuple(taus), Fraction(delta), B, Z, D, eps, F, sel, margins)


def _bohr_task(args):
    G, A, eps, H, taus, grid = args
    tried = 0
    for delta in grid:
        tried += 1
        w = _bohr_attempt(G, A, eps, H, taus, delta)
        if w is not None:
            return w, tried
    return None, tried


def find_bohr_witness(G: FiniteGroup, A: GroupSubset, epsilon, n_max: int, r_max: int,
                      budget: int = DEFAULT_CANDIDATE_BUDGET, threads: int = 1,
                      stats: dict | None = None) -> BohrWitness | None:
    """Search (H, tau, delta) by preference (index, r, -delta, |Z|), then canonical order.

    tau ranges over r-element combinations of distinct characters of H in
    lexicographic order of character index; delta over the complete threshold
    grid.  r = 0 is the subgroup itself with delta = 1.  The candidate count of
    each (index, r) block is charged against the budget before the block runs.
    """
    eps = _check_eps(epsilon)
    if r_max < 0:
        raise InputError("r_max must be >= 0")
    stats = {} if stats is None else stats
    stats.update(candidates_charged=0, candidates_evaluated=0, blocks=0)
    subs = normal_subgroups_up_to_index(G, n_max)
    indices = sorted({H.index for H in subs})
    pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        for m in indices:
            level = [H for H in subs if H.index == m]
            for r in range(r_max + 1):
                tasks = []
                for H in level:
                    local, _ = H.as_group()
                    if r == 0:
                        tasks.append((G, A, eps, H, (), [Fraction(1)]))
                        continue
                    chars = characters(local)
                    grid = delta_grid(local)
                    for combo in itertools.combinations(chars, r):
                        tasks.append((G, A, eps, H, combo, grid))
                if not tasks:
                    continue
                cost = sum(len(t[5]) for t in tasks)
                if stats["candidates_charged"] + cost > budget:
                    raise BudgetExceeded(
                        f"candidate budget {budget} exceeded at index {m}, rank {r}",
                        dict(stats, next_block={"index": m, "rank": r, "candidates": cost}))
                stats["candidates_charged"] += cost
                stats["blocks"] += 1
                results = list(pool.map(_bohr_task, tasks)) if pool else [_bohr_task(t) for t in tasks]
                best = None
                for w, tried in results:
                    stats["candidates_evaluated"] += tried
                    if w is not None and (best is None or (-w.delta, len(w.Z)) < (-best.delta, len(best.Z))):
                        best = w
                if best is not None:
                    return best
        return None
    finally:
        if pool:
            pool.shutdown()


def verify_bohr_witness(G: FiniteGroup, A: GroupSubset, w: BohrWitness) -> RegularityReport:
    eps = _check_eps(w.epsilon)
    H = w.H
    if H.group is not G or w.Z.group is not G or w.D.group is not G or A.group is not G:
        raise MalformedWitness("witness sets belong to a different group")
    if not H.normal:
        raise MalformedWitness("H is not normal")
    delta = Fraction(w.delta)
    if delta <= 0:
        raise MalformedWitness("delta must be positive")
    local, _ = H.as_group()
    for t in w.taus:
        if not isinstance(t, Character) or t.domain is not local:
            raise MalformedWitness("characters are not defined on H")
    B = bohr_neighborhood(H, w.taus, delta).realized
    b = len(B)
    cover = [int(x) for x in w.cover]
    if any(not 0 <= x < G.order for x in cover):
        raise MalformedWitness("cover element out of range")
    belems = B.elements()
    rows = G.mul[np.ix_(cover, belems)] if cover else np.zeros((0, b), dtype=np.int64)
    dind = w.D.indicator()
    used = [i for i in range(len(cover)) if dind[rows[i]].all()]
    rebuilt = np.zeros(G.order, dtype=bool)
    rebuilt[rows[used].ravel()] = True
    if not (rebuilt == dind).all():
        raise MalformedWitness("D is not a union of cover translates of B")
    inside = translate_counts(G, A, B)
    mins = np.minimum(inside, b - inside)
    mins = np.where(w.Z.indicator(), -1, mins)
    g_worst = int(np.argmax(mins))
    worst = int(mins[g_worst])
    resid = len((A ^ w.D) - w.Z)
    clauses = {
        "small_exceptional_set": _clause(_lt(len(w.Z), eps, G.order), Fraction(len(w.Z), G.order), eps),
        "structure": _clause(_lt(resid, eps, b), resid, eps * b),
        "regularity": _clause(worst < 0 or _lt(worst, eps, b), max(worst, 0), eps * b,
                              worst_translate=g_worst if worst >= 0 else None),
    }
    zind = w.Z.indicator()
    margins = {"bohr_size": b, "bad_set_size": len(w.Z), "residual": resid,
               "cover_size": len(cover), "cover_avoids_Z": bool(not any(zind[x] for x in cover))}
    return RegularityReport("bohr", all(c["holds"] for c in clauses.values()), clauses, margins)


# ------------------------------------------------------------- exact mode

def straddling_cosets(H: Subgroup, A: GroupSubset) -> GroupSubset:
    """Union of the cosets meeting both A and its complement."""
    counts = H.coset_counts(A)
    st = (counts > 0) & (counts < H.order)
    return GroupSubset.from_indicator(H.group, st[H.coset_of])


def verify_exact_witness(G: FiniteGroup, A: GroupSubset, H: Subgroup, Z: GroupSubset, epsilon) -> RegularityReport:
    """Accept iff ``|Z| < epsilon |G|`` and every coset outside Z lies inside A or misses it."""
    eps = _check_eps(epsilon)
    if H.group is not G or Z.group is not G:
        raise InputError("subgroup and Z must live in the given group")
    if not H.normal:
        raise NotNormal("H must be normal")
    if not H.is_coset_union(Z):
        raise NotCosetUnion("Z is not a union of cosets of H")
    minimal = straddling_cosets(H, A)
    leftover = minimal - Z
    clauses = {
        "small_exceptional_set": _clause(_lt(len(Z), eps, G.order), Fraction(len(Z), G.order), eps),
        "exact_outside_Z": _clause(not len(leftover), len(leftover), 0,
                                   straddling_outside_Z=mask_elements(leftover.mask)[:16]),
    }
    margins = {"minimal_Z_size": len(minimal), "minimal_Z_mask": minimal.hex(), "index": H.index}
    return RegularityReport("exact", all(c["holds"] for c in clauses.values()), clauses, margins)


@dataclass
class ExactWitness:
    H: Subgroup
    Z: GroupSubset
    D: GroupSubset
    epsilon: Fraction


def find_exact_witness(G: FiniteGroup, A: GroupSubset, epsilon, n_max: int) -> ExactWitness | None:
    """Smallest index, then smallest |Z|, with Z the straddling cosets and ``|Z| < epsilon |G|``."""
    eps = _check_eps(epsilon)
    best = None
    for H in normal_subgroups_up_to_index(G, n_max):
        if best is not None and H.index > best.H.index:
            break
        Z = straddling_cosets(H, A)
        if _lt(len(Z), eps, G.order) and (best is None or len(Z) < len(best.Z)):
            best = ExactWitness(H, Z, A - Z, eps)
    return best


# ------------------------------------------------------------- Boolean algebra diagnostic

def two_sided_translates(G: FiniteGroup, A: GroupSubset) -> list[int]:
    """Distinct masks ``gAh``, in first-occurrence order over (g, h)."""
    elems = A.elements()
    if not elems:
        return [0]
    seen: dict[int, None] = {}
    hs = np.arange(G.order)
    for g in range(G.order):
        row = G.mul[g, elems]
        ind = np.zeros((G.order, G.order), dtype=bool)
        # ind[h] is the indicator of (gA)h
        ind[np.repeat(hs, len(elems)), G.mul[row[None, :], hs[:, None]].ravel()] = True
        for m in rows_to_masks(ind):
            seen.setdefault(m, None)
    return list(seen)


def boolean_algebra_rank(G: FiniteGroup, A: GroupSubset, target: GroupSubset, c_max: int = 4,
                         budget: int = DEFAULT_ALGEBRA_BUDGET) -> dict:
    """Least c <= c_max such that target is a union of atoms of c two-sided translates of A.

    Returns ``{"c": c, "translates": [...]}``, ``{"c": None}`` when no
    combination works, or ``{"c": None, "undetermined": True}`` once the
    combination budget is spent.
    """
    full = (1 << G.order) - 1
    t = target.mask
    if t in (0, full):
        return {"c": 0, "translates": []}
    if G.order > ALGEBRA_MAX_ORDER:
        return {"c": None, "undetermined": True, "checked_up_to": 0}
    trans = two_sided_translates(G, A)
    spent = 0
    for c in range(1, c_max + 1):
        if spent + comb(len(trans), c) > budget:
            return {"c": None, "undetermined": True, "checked_up_to": c - 1}
        for combo in itertools.combinations(range(len(trans)), c):
            spent += 1
            atoms = [full]
            for i in combo:
                s = trans[i]
                atoms = [a & m for a in atoms for m in (s, ~s & full) if a & m]
            if all((a & t) in (0, a) for a in atoms):
                return {"c": c, "translates": [hex(trans[i]) for i in combo]}
    return {"c": None}
