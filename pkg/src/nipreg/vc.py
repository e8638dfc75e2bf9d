"""VC-dimension of the left-translate family of a subset and its order-property (stability) index."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError, SizeLimit
from .groups import FiniteGroup, GroupSubset, mask_elements, rows_to_masks

DEFAULT_NODE_BUDGET = 5_000_000
DEFAULT_MAX_K = 6


@dataclass(frozen=True, eq=False)
class TranslateSystem:
    """The deduplicated family ``{gA : g in G}``.

    ``translates[i]`` is a bitmask and ``first_g[i]`` the smallest ``g``
    producing it; ``translates`` keeps first-occurrence order in ``g``.
    """

    group: FiniteGroup
    base: GroupSubset
    translates: tuple[int, ...]
    first_g: tuple[int, ...]

    @classmethod
    def of(cls, A: GroupSubset) -> "TranslateSystem":
        G = A.group
        ind = np.zeros((G.order, G.order), dtype=bool)
        elems = A.elements()
        if elems:
            rows = np.repeat(np.arange(G.order), len(elems))
            ind[rows, G.mul[:, elems].ravel()] = True
        seen: dict[int, int] = {}
        for g, m in enumerate(rows_to_masks(ind)):
            seen.setdefault(m, g)
        return cls(G, A, tuple(seen), tuple(seen.values()))

    @property
    def distinct_translates(self) -> list[GroupSubset]:
        return [GroupSubset(self.group, m) for m in self.translates]

    def point_masks(self) -> list[int]:
        """For each element x, the bitmask of translate indices containing x."""
        pm = [0] * self.group.order
        for i, t in enumerate(self.translates):
            for x in mask_elements(t):
                pm[x] |= 1 << i
        return pm

    def traces(self, S) -> set[int]:
        smask = 0
        for x in S:
            smask |= 1 << x
        return {t & smask for t in self.translates}

    def is_shattered(self, S) -> bool:
        return len(self.traces(S)) == 1 << len(set(S))


class _Search:
    def __init__(self, sys: TranslateSystem, budget: int):
        self.sys = sys
        self.m = len(sys.translates)
        self.full = (1 << self.m) - 1
        self.pm = sys.point_masks()
        self.budget = budget
        self.nodes = 0

    def tick(self):
        self.nodes += 1
        if self.nodes > self.budget:
            raise SizeLimit(f"shattering search exceeded node budget {self.budget}")

    @staticmethod
    def split(classes, pmask):
        """Refine trace classes by membership of one point; None if some class does not split."""
        out = []
        for c in classes:
            inside = c & pmask
            if not inside or inside == c:
                return None
            out.append(inside)
            out.append(c & ~pmask)
        return out


def _max_depth_from_identity(srch: _Search, cap: int) -> int:
    """Largest shattered set containing the identity (translation invariance makes this the VC-dimension)."""
    G = srch.sys.group
    e = G.identity
    root = _Search.split([srch.full], srch.pm[e])
    if root is None:
        return 0
    others = [x for x in G.elements() if x != e]
    best = 1

    def dfs(start, classes, depth):
        nonlocal best
        if depth > best:
            best = depth
        if best >= cap:
            return
        for j in range(start, len(others)):
            srch.tick()
            nxt = _Search.split(classes, srch.pm[others[j]])
            if nxt is not None:
                dfs(j + 1, nxt, depth + 1)
                if best >= cap:
                    return

    dfs(0, root, 1)
    return best


def _first_shattered(srch: _Search, d: int, points=None) -> tuple[int, ...] | None:
    """Lexicographically first shattered d-set (ascending tuples, DFS preorder)."""
    if d == 0:
        return ()
    need = 1 << (d - 1)
    points = [x for x in (points if points is not None else srch.sys.group.elements())
              if srch.pm[x].bit_count() >= need and srch.m - srch.pm[x].bit_count() >= need]

    def dfs(start, classes, chosen):
        if len(chosen) == d:
            return tuple(chosen)
        for j in range(start, len(points) - (d - len(chosen)) + 1):
            srch.tick()
            nxt = _Search.split(classes, srch.pm[points[j]])
            if nxt is not None:
                hit = dfs(j + 1, nxt, chosen + [points[j]])
                if hit is not None:
                    return hit
        return None

    return dfs(0, [srch.full], [])


@dataclass(frozen=True)
class ShatterResult:
    vc_dimension: int
    shattered_set: tuple[int, ...]
    witness_translates: dict[tuple[int, ...], int]
    nodes: int


def shatter(sys: TranslateSystem, budget: int = DEFAULT_NODE_BUDGET) -> ShatterResult:
    srch = _Search(sys, budget)
    cap = max(0, (len(sys.translates)).bit_length() - 1)
    d = _max_depth_from_identity(srch, cap) if cap else 0
    S = _first_shattered(srch, d)
    if S is None:
        raise SizeLimit("inconsistent shattering search")
    witnesses: dict[tuple[int, ...], int] = {}
    smask = sum(1 << x for x in S)
    for t, g in zip(sys.translates, sys.first_g):
        key = tuple(mask_elements(t & smask))
        if key not in witnesses or g < witnesses[key]:
            witnesses[key] = g
    witnesses = dict(sorted(witnesses.items(), key=lambda kv: (len(kv[0]), kv[0])))
    return ShatterResult(d, S, witnesses, srch.nodes)


def vc_dimension(sys: TranslateSystem, budget: int = DEFAULT_NODE_BUDGET) -> int:
    return shatter(sys, budget).vc_dimension


def is_k_nip(G: FiniteGroup, A: GroupSubset, k: int, budget: int = DEFAULT_NODE_BUDGET) -> bool:
    """True iff no k points are shattered by the left translates of A."""
    if k < 1:
        raise InputError("k must be >= 1")
    if A.group is not G:
        raise InputError("set belongs to a different group")
    sys = TranslateSystem.of(A)
    if (1 << k) > len(sys.translates):
        return True
    srch = _Search(sys, budget)
    e = G.identity
    others = [x for x in G.elements() if x != e]
    return _first_shattered_rooted(srch, k, e, others) is None


def _first_shattered_rooted(srch: _Search, k: int, root: int, others: list[int]):
    classes = _Search.split([srch.full], srch.pm[root])
    if classes is None:
        return None
    if k == 1:
        return (root,)
    need = 1 << (k - 1)
    pts = [x for x in others if srch.pm[x].bit_count() >= need and srch.m - srch.pm[x].bit_count() >= need]

    def dfs(start, cl, chosen):
        if len(chosen) == k:
            return tuple(chosen)
        for j in range(start, len(pts) - (k - len(chosen)) + 1):
            srch.tick()
            nxt = _Search.split(cl, srch.pm[pts[j]])
            if nxt is not None:
                hit = dfs(j + 1, nxt, chosen + [pts[j]])
                if hit is not None:
                    return hit
        return None

    return dfs(0, classes, [root])


# ------------------------------------------------------------ order property

@dataclass(frozen=True)
class OrderPattern:
    """``a[i] * b[j] in A`` iff ``i <= j`` (0-based)."""

    k: int
    a: tuple[int, ...]
    b: tuple[int, ...]
    nodes: int


def order_pattern(G: FiniteGroup, A: GroupSubset, k_max: int = DEFAULT_MAX_K,
                  budget: int = DEFAULT_NODE_BUDGET) -> OrderPattern:
    """Longest half-graph a_1..a_k, b_1..b_k (k <= k_max), lexicographically first in a.

    With rows R_a = {b : ab in A}, the columns b_j exist iff every
    P_j = (R_1 ∩ .. ∩ R_j) minus (R_{j+1} ∪ .. ∪ R_k) is nonempty; appending a
    row only shrinks earlier P_j, so prefixes of patterns are patterns.
    """
    if k_max < 1:
        raise InputError("k_max must be >= 1")
    if A.group is not G:
        raise InputError("set belongs to a different group")
    n = G.order
    ind = np.zeros((n, n), dtype=bool)
    elems = A.elements()
    if elems:
        # row a holds {b : a*b in A} = {a^-1 * x : x in A}
        rows = np.repeat(np.arange(n), len(elems))
        ind[rows, G.mul[G.inv][:, elems].ravel()] = True
    row = rows_to_masks(ind)
    full = (1 << n) - 1
    best = {"k": 0, "a": (), "P": ()}
    nodes = 0

    def dfs(seq, P, inter):
        nonlocal nodes
        if len(seq) > best["k"]:
            best.update(k=len(seq), a=tuple(seq), P=tuple(P))
            if best["k"] >= k_max:
                return True
        for x in range(n):
            nodes += 1
            if nodes > budget:
                raise SizeLimit(f"order-property search exceeded node budget {budget}")
            r = row[x]
            new_last = inter & r
            if not new_last:
                continue
            nP = []
            for p in P:
                q = p & ~r
                if not q:
                    break
                nP.append(q)
            else:
                nP.append(new_last)
                if dfs(seq + [x], nP, new_last):
                    return True
        return False

    dfs([], [], full)
    b = tuple((p & -p).bit_length() - 1 for p in best["P"])
    return OrderPattern(best["k"], best["a"], b, nodes)


def stability_order(G: FiniteGroup, A: GroupSubset, k_max: int = DEFAULT_MAX_K,
                    budget: int = DEFAULT_NODE_BUDGET) -> int:
    """Largest k <= k_max admitting an order pattern; A is (k+1)-stable iff the result is <= k."""
    return order_pattern(G, A, k_max, budget).k
