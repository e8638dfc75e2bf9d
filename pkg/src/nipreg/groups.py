"""Finite groups on element indices 0..n-1, bit-packed subsets, normal subgroups and quotients.

Preset element orderings (fixed so that examples are reproducible):

* ``cyclic n`` / ``modular_quotient p k``: ``x`` is the residue ``x``.
* ``abelian_invariants [d1, .., dj]`` / ``elementary_abelian p k``: tuples
  ``(c1, .., cj)`` in lexicographic order, i.e. index ``((c1*d2 + c2)*d3 + c3)...``.
* ``dihedral n`` (order ``2n``): index ``i`` is ``r^i`` and ``n + i`` is ``r^i s``.
* ``quaternion8``: ``1, -1, i, -i, j, -j, k, -k``.
* ``symmetric n``: permutations of ``range(n)`` in lexicographic order,
  composed right-to-left, ``(s*t)(x) = s(t(x))``.
"""

from __future__ import annotations

import hashlib
import itertools
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import (
    InputError,
    MaskLengthMismatch,
    NotAGroup,
    NotASubgroup,
    NotNormal,
    SizeLimit,
)

DEFAULT_SIZE_LIMIT = 4096
DEFAULT_LATTICE_BUDGET = 200_000


def size_limit() -> int:
    return int(os.environ.get("NIPREG_SIZE_LIMIT", DEFAULT_SIZE_LIMIT))


def mask_to_indicator(mask: int, n: int) -> np.ndarray:
    raw = np.frombuffer(mask.to_bytes((n + 7) // 8 or 1, "little"), dtype=np.uint8)
    return np.unpackbits(raw, bitorder="little")[:n].astype(bool)


def indicator_to_mask(ind) -> int:
    packed = np.packbits(np.asarray(ind, dtype=bool), bitorder="little")
    return int.from_bytes(packed.tobytes(), "little")


def rows_to_masks(matrix: np.ndarray) -> list[int]:
    """Bit-pack each row of a 2-D boolean array."""
    packed = np.packbits(np.asarray(matrix, dtype=bool), axis=1, bitorder="little")
    return [int.from_bytes(row.tobytes(), "little") for row in packed]


def mask_elements(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


class FiniteGroup:
    """A group given by its full multiplication table.

    ``mul[x, y]`` is the index of ``x*y``.  Construction validates that every
    row and column is a permutation, that a two-sided identity exists, and
    associativity (Light's test over a generating set).
    """

    def __init__(self, table, name: str = "G", spec: dict | None = None, check: bool = True):
        mul = np.array(table, dtype=np.int32)
        if mul.ndim != 2 or mul.shape[0] != mul.shape[1] or mul.shape[0] == 0:
            raise NotAGroup("multiplication table must be a non-empty square array")
        n = mul.shape[0]
        if n > size_limit():
            raise SizeLimit(f"group order {n} exceeds size limit {size_limit()}")
        self.order = n
        self.name = name
        self.spec = spec
        self._cache: dict = {}
        if mul.min() < 0 or mul.max() >= n:
            raise NotAGroup("table entries must lie in 0..n-1")
        ref = np.arange(n)
        if check:
            if not (np.sort(mul, axis=1) == ref).all() or not (np.sort(mul, axis=0) == ref[:, None]).all():
                raise NotAGroup("some row or column of the table is not a permutation")
        ident = [e for e in range(n) if (mul[e] == ref).all() and (mul[:, e] == ref).all()]
        if not ident:
            raise NotAGroup("no two-sided identity")
        self.identity = ident[0]
        inv = np.argmax(mul == self.identity, axis=1).astype(np.int32)
        if check and not (mul[inv, ref] == self.identity).all():
            raise NotAGroup("left and right inverses differ")
        mul.setflags(write=False)
        inv.setflags(write=False)
        self.mul = mul
        self.inv = inv
        if check:
            self._check_associative()

    def _check_associative(self) -> None:
        mul = self.mul
        for s in self.generators():
            if not (mul[mul[:, s], :] == mul[:, mul[s, :]]).all():
                raise NotAGroup("multiplication is not associative")

    def __repr__(self) -> str:
        return f"FiniteGroup({self.name!r}, order={self.order})"

    def __len__(self) -> int:
        return self.order

    def op(self, x: int, y: int) -> int:
        return int(self.mul[x, y])

    def elements(self) -> range:
        return range(self.order)

    def generators(self) -> list[int]:
        """Greedy generating set: repeatedly add the smallest element not yet generated."""
        if "generators" not in self._cache:
            gens: list[int] = []
            reached = np.zeros(self.order, dtype=bool)
            reached[self.identity] = True
            while not reached.all():
                g = int(np.argmin(reached))
                gens.append(g)
                reached = mask_to_indicator(self.closure(gens), self.order)
            self._cache["generators"] = gens
        return list(self._cache["generators"])

    def closure(self, gens: Iterable[int], start: Iterable[int] = ()) -> int:
        """Mask of the subgroup generated by ``gens`` together with ``start``."""
        gens = list(dict.fromkeys(int(g) for g in gens))
        seen = np.zeros(self.order, dtype=bool)
        seen[self.identity] = True
        for s in start:
            seen[s] = True
        frontier = np.flatnonzero(seen)
        if not gens:
            gens = [int(x) for x in frontier]
        g_arr = np.array(gens, dtype=np.int64)
        while frontier.size:
            prods = self.mul[np.ix_(frontier, g_arr)].ravel()
            new = np.unique(prods[~seen[prods]])
            seen[new] = True
            frontier = new
        return indicator_to_mask(seen)

    @property
    def is_abelian(self) -> bool:
        if "abelian" not in self._cache:
            self._cache["abelian"] = bool((self.mul == self.mul.T).all())
        return self._cache["abelian"]

    def element_order(self, x: int) -> int:
        k, y = 1, x
        while y != self.identity:
            y = int(self.mul[y, x])
            k += 1
        return k

    def exponent(self) -> int:
        from math import lcm

        e = 1
        for x in self.elements():
            e = lcm(e, self.element_order(x))
        return e

    def conjugacy_classes(self) -> list[tuple[int, ...]]:
        """Classes sorted by smallest member; each class is a sorted tuple."""
        if "classes" not in self._cache:
            seen = np.zeros(self.order, dtype=bool)
            classes = []
            for x in range(self.order):
                if seen[x]:
                    continue
                conj = np.unique(self.mul[self.mul[:, x], self.inv])
                seen[conj] = True
                classes.append(tuple(int(c) for c in conj))
            self._cache["classes"] = classes
        return list(self._cache["classes"])

    def table_hash(self) -> str:
        if "hash" not in self._cache:
            h = hashlib.sha256(self.mul.astype("<i4").tobytes()).hexdigest()
            self._cache["hash"] = h
        return self._cache["hash"]


@dataclass(frozen=True)
class GroupSubset:
    """Subset of a group encoded as an int whose bit ``i`` means element ``i``."""

    group: FiniteGroup
    mask: int

    def __post_init__(self):
        if self.mask < 0 or self.mask >> self.group.order:
            raise MaskLengthMismatch(f"mask has bits beyond group order {self.group.order}")

    @classmethod
    def from_elements(cls, group: FiniteGroup, elements: Iterable[int]) -> "GroupSubset":
        mask = 0
        for x in elements:
            x = int(x)
            if not 0 <= x < group.order:
                raise MaskLengthMismatch(f"element {x} outside 0..{group.order - 1}")
            mask |= 1 << x
        return cls(group, mask)

    @classmethod
    def from_indicator(cls, group: FiniteGroup, ind) -> "GroupSubset":
        ind = np.asarray(ind, dtype=bool)
        if ind.shape != (group.order,):
            raise MaskLengthMismatch("indicator length differs from group order")
        return cls(group, indicator_to_mask(ind))

    @classmethod
    def empty(cls, group: FiniteGroup) -> "GroupSubset":
        return cls(group, 0)

    @classmethod
    def full(cls, group: FiniteGroup) -> "GroupSubset":
        return cls(group, (1 << group.order) - 1)

    def __len__(self) -> int:
        return self.mask.bit_count()

    def __contains__(self, x) -> bool:
        return bool(self.mask >> int(x) & 1)

    def __iter__(self) -> Iterator[int]:
        return iter(mask_elements(self.mask))

    def __repr__(self) -> str:
        return f"GroupSubset({self.elements()})"

    def elements(self) -> list[int]:
        return mask_elements(self.mask)

    def indicator(self) -> np.ndarray:
        return mask_to_indicator(self.mask, self.group.order)

    def _same(self, other: "GroupSubset") -> None:
        if other.group is not self.group:
            raise InputError("subsets belong to different groups")

    def __and__(self, other):
        self._same(other)
        return GroupSubset(self.group, self.mask & other.mask)

    def __or__(self, other):
        self._same(other)
        return GroupSubset(self.group, self.mask | other.mask)

    def __xor__(self, other):
        self._same(other)
        return GroupSubset(self.group, self.mask ^ other.mask)

    def __sub__(self, other):
        self._same(other)
        return GroupSubset(self.group, self.mask & ~other.mask)

    def complement(self) -> "GroupSubset":
        return GroupSubset(self.group, ((1 << self.group.order) - 1) & ~self.mask)

    def issubset(self, other: "GroupSubset") -> bool:
        self._same(other)
        return self.mask & ~other.mask == 0

    def isdisjoint(self, other: "GroupSubset") -> bool:
        self._same(other)
        return self.mask & other.mask == 0

    def left_translate(self, g: int) -> "GroupSubset":
        """``g * S``."""
        return GroupSubset.from_elements(self.group, self.group.mul[g, self.elements()])

    def right_translate(self, g: int) -> "GroupSubset":
        """``S * g``."""
        return GroupSubset.from_elements(self.group, self.group.mul[self.elements(), g])

    def inverse(self) -> "GroupSubset":
        return GroupSubset.from_elements(self.group, self.group.inv[self.elements()])

    def product(self, other: "GroupSubset") -> "GroupSubset":
        """Product set ``S * T``."""
        self._same(other)
        a, b = self.elements(), other.elements()
        if not a or not b:
            return GroupSubset.empty(self.group)
        return GroupSubset.from_elements(self.group, np.unique(self.group.mul[np.ix_(a, b)]))

    def hex(self) -> str:
        return hex(self.mask)


def density(S: GroupSubset) -> Fraction:
    return Fraction(len(S), S.group.order)


class Subgroup:
    """A subgroup with its left-coset partition.

    Cosets are indexed by ascending canonical representative (the smallest
    element of the coset); ``coset_of[x]`` is the coset index of ``x``.
    """

    def __init__(self, elements: GroupSubset):
        G = elements.group
        elems = elements.elements()
        if G.identity not in elements:
            raise NotASubgroup("subset does not contain the identity")
        ind = elements.indicator()
        prods = G.mul[np.ix_(elems, elems)]
        if not ind[prods].all() or not ind[G.inv[elems]].all():
            raise NotASubgroup("subset is not closed under multiplication and inverses")
        self.group = G
        self.elements = elements
        self.order = len(elems)
        self.index = G.order // self.order
        reps_per_x = G.mul[:, elems].min(axis=1)
        self.representatives = tuple(int(r) for r in np.unique(reps_per_x))
        self.coset_of = np.searchsorted(np.array(self.representatives), reps_per_x).astype(np.int32)
        self.coset_of.setflags(write=False)
        conj = G.mul[G.mul[:, elems], G.inv[:, None]]
        self.normal = bool(ind[conj].all())
        self._local = None
        if self.index * self.order != G.order or len(self.representatives) != self.index:
            raise NotASubgroup("coset partition inconsistent with Lagrange")

    def __repr__(self) -> str:
        return f"Subgroup(order={self.order}, index={self.index}, normal={self.normal})"

    def __eq__(self, other) -> bool:
        return isinstance(other, Subgroup) and other.group is self.group and other.elements.mask == self.elements.mask

    def __hash__(self) -> int:
        return hash((id(self.group), self.elements.mask))

    def __contains__(self, x) -> bool:
        return x in self.elements

    def cosets(self) -> list[GroupSubset]:
        ind = [[] for _ in range(self.index)]
        for x, c in enumerate(self.coset_of):
            ind[c].append(x)
        return [GroupSubset.from_elements(self.group, c) for c in ind]

    def coset(self, g: int) -> GroupSubset:
        return self.elements.left_translate(g)

    def is_coset_union(self, S: GroupSubset) -> bool:
        hit = np.zeros(self.index, dtype=bool)
        ind = S.indicator()
        hit[self.coset_of[ind]] = True
        return bool((hit[self.coset_of] == ind).all())

    def coset_counts(self, A: GroupSubset) -> np.ndarray:
        """``|gH ∩ A|`` for each coset, in coset-index order."""
        return np.bincount(self.coset_of[A.indicator()], minlength=self.index)

    def as_group(self) -> tuple[FiniteGroup, tuple[int, ...]]:
        """The subgroup as a stand-alone group on ``0..|H|-1`` plus the embedding."""
        if self._local is None:
            elems = self.elements.elements()
            if len(elems) == self.group.order:
                self._local = (self.group, tuple(range(self.group.order)))
            else:
                pos = np.full(self.group.order, -1, dtype=np.int64)
                pos[elems] = np.arange(len(elems))
                table = pos[self.group.mul[np.ix_(elems, elems)]]
                local = FiniteGroup(table, name=f"{self.group.name}[H{len(elems)}]", check=False)
                self._local = (local, tuple(elems))
        return self._local


def whole(G: FiniteGroup) -> Subgroup:
    if "whole" not in G._cache:
        G._cache["whole"] = Subgroup(GroupSubset.full(G))
    return G._cache["whole"]


# ---------------------------------------------------------------- presets

def _cyclic_table(n: int) -> np.ndarray:
    r = np.arange(n)
    return (r[:, None] + r[None, :]) % n


def _abelian_table(factors: Sequence[int]) -> np.ndarray:
    factors = [int(d) for d in factors]
    coords = np.array(list(itertools.product(*[range(d) for d in factors])), dtype=np.int64)
    if not factors:
        return np.zeros((1, 1), dtype=np.int64)
    dims = np.array(factors)
    strides = np.ones(len(factors), dtype=np.int64)
    for i in range(len(factors) - 2, -1, -1):
        strides[i] = strides[i + 1] * factors[i + 1]
    summed = (coords[:, None, :] + coords[None, :, :]) % dims
    return summed @ strides


def _dihedral_table(n: int) -> np.ndarray:
    # r^a s^b * r^c s^d = r^(a + (-1)^b c) s^(b+d)
    idx = np.arange(2 * n)
    a, b = idx % n, idx // n
    rot = (a[:, None] + np.where(b[:, None] == 1, -a[None, :], a[None, :])) % n
    ref = (b[:, None] + b[None, :]) % 2
    return rot + n * ref


def _quaternion_table() -> np.ndarray:
    # units 1,i,j,k as 0..3; unit product = (sign, unit)
    unit = [[(1, 0), (1, 1), (1, 2), (1, 3)],
            [(1, 1), (-1, 0), (1, 3), (-1, 2)],
            [(1, 2), (-1, 3), (-1, 0), (1, 1)],
            [(1, 3), (1, 2), (-1, 1), (-1, 0)]]
    table = np.zeros((8, 8), dtype=np.int64)
    for x in range(8):
        ux, sx = x // 2, -1 if x % 2 else 1
        for y in range(8):
            uy, sy = y // 2, -1 if y % 2 else 1
            s, u = unit[ux][uy]
            table[x, y] = 2 * u + (0 if s * sx * sy == 1 else 1)
    return table


def _symmetric_table(n: int) -> np.ndarray:
    perms = list(itertools.permutations(range(n)))
    pos = {p: i for i, p in enumerate(perms)}
    return np.array([[pos[tuple(s[t[x]] for x in range(n))] for t in perms] for s in perms])


def _posint(spec: dict, key: str, minimum: int = 1) -> int:
    try:
        v = spec[key]
    except KeyError:
        raise InputError(f"group spec missing {key!r}") from None
    if not isinstance(v, int) or isinstance(v, bool) or v < minimum:
        raise InputError(f"group spec field {key!r} must be an integer >= {minimum}")
    return v


def _check_order(n: int) -> None:
    if n > size_limit():
        raise SizeLimit(f"group order {n} exceeds size limit {size_limit()}")


def build_group(spec: dict) -> FiniteGroup:
    """Build a validated group from a GroupSpec dictionary."""
    if not isinstance(spec, dict):
        raise InputError("group spec must be a JSON object")
    if "cayley_table" in spec:
        return FiniteGroup(spec["cayley_table"], name="table", spec=spec)
    if "abelian_invariants" in spec:
        factors = spec["abelian_invariants"]
        if not isinstance(factors, list) or not all(isinstance(d, int) and d >= 1 for d in factors):
            raise InputError("abelian_invariants must be a list of positive integers")
        _check_order(int(np.prod(factors, dtype=object)) if factors else 1)
        name = "x".join(f"Z{d}" for d in factors) or "trivial"
        return FiniteGroup(_abelian_table(factors), name=name, spec=spec)
    preset = spec.get("preset")
    if preset == "cyclic":
        n = _posint(spec, "n")
        _check_order(n)
        return FiniteGroup(_cyclic_table(n), name=f"Z{n}", spec=spec)
    if preset == "modular_quotient":
        p, k = _posint(spec, "p", 2), _posint(spec, "k")
        _check_order(p ** k)
        return FiniteGroup(_cyclic_table(p ** k), name=f"Z{p}^{k}", spec=spec)
    if preset == "elementary_abelian":
        p, k = _posint(spec, "p", 2), _posint(spec, "k")
        _check_order(p ** k)
        return FiniteGroup(_abelian_table([p] * k), name=f"(Z{p})^{k}", spec=spec)
    if preset == "dihedral":
        n = _posint(spec, "n")
        _check_order(2 * n)
        return FiniteGroup(_dihedral_table(n), name=f"D{n}", spec=spec)
    if preset == "quaternion8":
        return FiniteGroup(_quaternion_table(), name="Q8", spec=spec)
    if preset == "symmetric":
        n = _posint(spec, "n")
        if n > 5:
            raise SizeLimit("symmetric preset supports n <= 5")
        return FiniteGroup(_symmetric_table(n), name=f"S{n}", spec=spec)
    raise InputError(f"unknown group spec {spec!r}")


def is_cyclic_preset(G: FiniteGroup) -> bool:
    spec = G.spec or {}
    return spec.get("preset") in ("cyclic", "modular_quotient") or (
        "abelian_invariants" in spec and len(spec["abelian_invariants"]) <= 1
    )


# ---------------------------------------------------------- normal subgroups

def _close_right(ind: np.ndarray, perms: list[np.ndarray]) -> np.ndarray:
    """Smallest superset of ``ind`` closed under right multiplication by the given translations."""
    cur = ind
    steps = max(1, int(ind.size).bit_length())
    while True:
        nxt = cur.copy()
        for perm in perms:
            # doubling: after step k, nxt holds S*c^j for all j < 2^k
            p = perm
            for _ in range(steps):
                grown = nxt | nxt[p]
                if (grown == nxt).all():
                    break
                nxt = grown
                p = p[p]
        if (nxt == cur).all():
            return cur
        cur = nxt


# sorted lattice masks by table hash, shared by every instance of the same table
_LATTICES: dict[str, list[int]] = {}


def normal_subgroups(G: FiniteGroup, budget: int = DEFAULT_LATTICE_BUDGET) -> list[Subgroup]:
    """All normal subgroups, sorted by (index, sorted element tuple).

    Every normal subgroup is a union of conjugacy classes.  Starting from the
    trivial subgroup we adjoin one class at a time and close under
    multiplication.  A subgroup ``M = N<C>`` is kept only when ``C`` has a
    larger class index than every class used for ``N`` and every smaller
    class inside ``M`` already lies in ``N``; this canonical form reaches each
    normal subgroup exactly once.
    """
    key = ("normal", budget)
    if key in G._cache:
        return list(G._cache[key])
    known = _LATTICES.get(G.table_hash())
    if known is not None:
        subs = [Subgroup(GroupSubset(G, m)) for m in known]
        G._cache[key] = subs
        return list(subs)
    classes = G.conjugacy_classes()
    class_of = np.empty(G.order, dtype=np.int64)
    for i, c in enumerate(classes):
        class_of[list(c)] = i
    # right multiplication by c: indicator of S*c is ind[x * c^-1]
    right = {x: G.mul[:, G.inv[x]] for x in range(G.order)}
    start = np.zeros(G.order, dtype=bool)
    start[G.identity] = True
    found = [start]
    stack = [(start, class_of[G.identity])]
    closures = 0
    while stack:
        ind, last = stack.pop()
        present = np.zeros(len(classes), dtype=bool)
        present[class_of[ind]] = True
        for ci in range(last + 1, len(classes)):
            if present[ci]:
                continue
            closures += 1
            if closures > budget:
                raise SizeLimit(f"normal-subgroup enumeration exceeded budget {budget}")
            perms = [right[x] for x in classes[ci]]
            cur = _close_right(ind, perms)
            inside = np.zeros(len(classes), dtype=bool)
            inside[class_of[cur]] = True
            if (inside[:ci] & ~present[:ci]).any():
                continue
            found.append(cur)
            stack.append((cur, ci))
    subs = [Subgroup(GroupSubset.from_indicator(G, ind)) for ind in found]
    subs.sort(key=lambda H: (H.index, tuple(H.elements.elements())))
    for H in subs:
        if not H.normal:
            raise NotNormal("class-union closure produced a non-normal subgroup")
    _LATTICES[G.table_hash()] = [H.elements.mask for H in subs]
    G._cache[key] = subs
    return list(subs)


def normal_subgroups_up_to_index(G: FiniteGroup, n_max: int, budget: int = DEFAULT_LATTICE_BUDGET) -> list[Subgroup]:
    if n_max < 1:
        raise InputError("n_max must be >= 1")
    return [H for H in normal_subgroups(G, budget) if H.index <= n_max]


def quotient(G: FiniteGroup, H: Subgroup) -> tuple[FiniteGroup, np.ndarray]:
    """``G/H`` on coset indices, and the projection ``x -> coset index``."""
    if H.group is not G:
        raise InputError("subgroup belongs to a different group")
    if not H.normal:
        raise NotNormal("quotient requires a normal subgroup")
    reps = np.array(H.representatives)
    proj = H.coset_of.astype(np.int64)
    table = proj[G.mul[np.ix_(reps, reps)]]
    Q = FiniteGroup(table, name=f"{G.name}/H{H.order}")
    if not (proj[G.mul] == Q.mul[proj[:, None], proj[None, :]]).all():
        raise NotNormal("projection is not a homomorphism")
    if set(np.flatnonzero(proj == Q.identity).tolist()) != set(H.elements.elements()):
        raise NotNormal("projection kernel differs from the subgroup")
    return Q, proj


def subgroup_from_json(G: FiniteGroup, obj) -> Subgroup:
    from .schema import subset_from_json

    return Subgroup(subset_from_json(G, obj))
