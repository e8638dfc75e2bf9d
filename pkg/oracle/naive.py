"""Straight-line brute force used to freeze golden values and cross-check the library.

Nothing here imports nipreg.  Groups are plain multiplication tables
(lists of lists), sets are Python sets, rationals are Fractions.
"""

from fractions import Fraction
from itertools import combinations, product
from math import gcd


# ---------------------------------------------------------------- groups

def cyclic(n):
    return [[(x + y) % n for y in range(n)] for x in range(n)]


def elementary_abelian_2(k):
    n = 2 ** k
    return [[x ^ y for y in range(n)] for x in range(n)]


def symmetric3():
    perms = sorted(product(range(3), repeat=3))
    perms = [p for p in perms if len(set(p)) == 3]
    idx = {p: i for i, p in enumerate(perms)}
    return [[idx[tuple(s[t[x]] for x in range(3))] for t in perms] for s in perms]


def identity_of(T):
    n = len(T)
    return next(e for e in range(n) if all(T[e][x] == x and T[x][e] == x for x in range(n)))


def inverse_of(T, x):
    e = identity_of(T)
    return next(y for y in range(len(T)) if T[x][y] == e)


def is_normal_subgroup(T, S):
    n = len(T)
    e = identity_of(T)
    if e not in S:
        return False
    for a in S:
        for b in S:
            if T[a][b] not in S:
                return False
    for g in range(n):
        gi = inverse_of(T, g)
        for s in S:
            if T[T[g][s]][gi] not in S:
                return False
    return True


def normal_subgroups(T, n_max=None):
    """Every normal subgroup, by testing every subset containing the identity."""
    n = len(T)
    e = identity_of(T)
    others = [x for x in range(n) if x != e]
    found = []
    for bits in range(2 ** len(others)):
        S = {e} | {others[i] for i in range(len(others)) if bits >> i & 1}
        if n % len(S):
            continue
        if is_normal_subgroup(T, S):
            found.append(S)
    found = [S for S in found if n_max is None or n // len(S) <= n_max]
    found.sort(key=lambda S: (n // len(S), sorted(S)))
    return [sorted(S) for S in found]


def cosets(T, H):
    """Left cosets sorted by smallest element."""
    seen, out = set(), []
    for g in range(len(T)):
        if g in seen:
            continue
        c = {T[g][h] for h in H}
        seen |= c
        out.append(sorted(c))
    out.sort()
    return out


# ---------------------------------------------------------------- VC / stability

def translates(T, A):
    return {frozenset(T[g][a] for a in A) for g in range(len(T))}


def is_shattered(trs, S):
    S = set(S)
    traces = {frozenset(t & S) for t in trs}
    return len(traces) == 2 ** len(S)


def vc_dimension(T, A):
    """(d, first shattered d-set in lexicographic order)."""
    trs = translates(T, A)
    n = len(T)
    best = (0, ())
    for d in range(1, n + 1):
        hit = None
        for S in combinations(range(n), d):
            if is_shattered(trs, S):
                hit = S
                break
        if hit is None:
            break
        best = (d, hit)
    return best


def order_pattern(T, A, k_max):
    """(k, a, b): lexicographically first longest a-sequence with a_i b_j in A iff i <= j."""
    n = len(T)
    A = set(A)
    best = (0, (), ())
    for k in range(1, k_max + 1):
        found = None
        for a in product(range(n), repeat=k):
            bs = []
            for j in range(k):
                want = [i <= j for i in range(k)]
                b = next((b for b in range(n) if [T[a[i]][b] in A for i in range(k)] == want), None)
                if b is None:
                    break
                bs.append(b)
            if len(bs) == k:
                found = (k, a, tuple(bs))
                break
        if found is None:
            break
        best = found
    return best


# ---------------------------------------------------------------- torus / Bohr

def circ(a):
    a = Fraction(a) % 1
    return min(a, 1 - a)


def cyclic_bohr(n, coeffs, delta):
    """{x in Z/n : max_c d(c x / n, 0) < delta}."""
    return [x for x in range(n) if max([circ(Fraction(c * x, n)) for c in coeffs], default=Fraction(0)) < delta]


def defect(T, values):
    worst = Fraction(0)
    n = len(T)
    for x in range(n):
        for y in range(n):
            worst = max(worst, max([circ(a - b - c) for a, b, c in zip(values[T[x][y]], values[x], values[y])],
                                   default=Fraction(0)))
    return worst


def approximate_bohr(values, eps):
    return [x for x, v in enumerate(values) if max([circ(c) for c in v], default=Fraction(0)) < eps]


def cyclic_nearest(n, column):
    """Best c for one coordinate of a map Z/n -> T, and its sup distance."""
    best = None
    for c in range(n):
        s = max(circ(column[x] - Fraction(c * x, n)) for x in range(n))
        if best is None or s < best[1]:
            best = (c, s)
    return best


def averaging_best(n, coeffs, delta):
    """Max over centers t of |{x : max_c d(c x / n, t_c) < delta}| for cyclic tau.

    All breakpoints c x / n +- delta are multiples of 1/(n q) for delta = p/q,
    so the grid of multiples of 1/(2 n q) meets every cell between them.
    Distances are compared in those integer units.
    """
    delta = Fraction(delta)
    L = 2 * n * delta.denominator
    rad = delta * L
    best = 0
    for t in product(range(L), repeat=len(coeffs)):
        cnt = 0
        for x in range(n):
            ok = True
            for c, tc in zip(coeffs, t):
                d = (c * x * (L // n) - tc) % L
                if min(d, L - d) >= rad:
                    ok = False
                    break
            cnt += ok
        best = max(best, cnt)
    return best


# ---------------------------------------------------------------- regularity pieces

def bad_set(T, A, B, t):
    A = set(A)
    out = []
    for g in range(len(T)):
        gB = [T[g][b] for b in B]
        inside = sum(1 for y in gB if y in A)
        outside = len(gB) - inside
        if inside >= t * len(B) and outside >= t * len(B):
            out.append(g)
    return out


def separating_cover(T, base, Z):
    Z = set(Z)
    used = set()
    F = []
    for x in range(len(T)):
        if x in Z:
            continue
        xb = {T[x][b] for b in base}
        if not (xb & used):
            used |= xb
            F.append(x)
    return F


def structure_set(T, A, B, F, gam):
    A = set(A)
    sel, D = [], set()
    for i, x in enumerate(F):
        xB = {T[x][b] for b in B}
        if len(xB - A) < gam * len(B):
            sel.append(i)
            D |= xB
    return sorted(D), sel


def subgroup_witness(T, A, eps, n_max):
    """(H, Z, D) by (index, |Z|, canonical order) or None."""
    n = len(T)
    A = set(A)
    best = None
    for H in normal_subgroups(T, n_max):
        m = n // len(H)
        if best is not None and m > best[0]:
            break
        Z, D = set(), set()
        for c in cosets(T, H):
            inside = len(set(c) & A)
            if min(inside, len(c) - inside) >= eps * len(H):
                Z |= set(c)
            elif 2 * inside >= len(H):
                D |= set(c)
        if not len(Z) < eps * n:
            continue
        if not len((A - Z) ^ D) < eps * len(H):
            continue
        if best is None or len(Z) < len(best[2]):
            best = (m, sorted(H), sorted(Z), sorted(D))
    return None if best is None else {"H": best[1], "Z": best[2], "D": best[3]}


def cyclic_bohr_witness(n, A, eps):
    """Whole group, rank <= 1, characters x -> c x / n; preference (r, -delta, |Z|, c)."""
    T = cyclic(n)
    A = set(A)

    def attempt(coeffs, delta, r):
        B = cyclic_bohr(n, coeffs, delta)
        Z = set(bad_set(T, A, B, eps))
        if not len(Z) < eps * n:
            return None
        B0 = cyclic_bohr(n, coeffs, delta / 2) if r else B
        F = separating_cover(T, B0, Z)
        gam = eps * (delta / 4) ** r
        D, sel = structure_set(T, A, B, F, gam)
        resid = len((A ^ set(D)) - Z)
        if not resid < eps * len(B):
            return None
        return {"coeffs": list(coeffs), "delta": delta, "B": B, "Z": sorted(Z), "D": D, "F": F,
                "selected": sel, "residual": resid}

    w = attempt((), Fraction(1), 0)
    if w is not None:
        return w
    best = None
    grid = [Fraction(j, n) for j in range((n + 1) // 2, 0, -1)]
    for c in range(n):
        for delta in grid:
            w = attempt((c,), delta, 1)
            if w is not None:
                if best is None or (-w["delta"], len(w["Z"])) < (-best["delta"], len(best["Z"])):
                    best = w
                break
    return best


# ---------------------------------------------------------------- Cayley graphs

def uniformly_good(T, A, C, D, eps):
    A = set(A)
    rows = [sum(1 for y in D if T[x][y] in A) for x in C]
    cols = [sum(1 for x in C if T[x][y] in A) for y in D]
    degs = rows + cols
    if any(d != degs[0] for d in degs):
        return "not-uniform"
    if degs[0] <= eps * len(C):
        return "uniformly-good-low"
    if degs[0] >= (1 - eps) * len(C):
        return "uniformly-good-high"
    return "not-uniform"


def regular_pair(T, A, X, Y, eps):
    """(regular, density, number of qualifying sub-pairs) by enumerating every sub-pair."""
    A = set(A)
    edges = {(x, y) for x in X for y in Y if T[x][y] in A}
    dens = Fraction(len(edges), len(X) * len(Y))
    ok, count = True, 0
    for i in range(1, len(X) + 1):
        if i < eps * len(X):
            continue
        for X0 in combinations(X, i):
            for j in range(1, len(Y) + 1):
                if j < eps * len(Y):
                    continue
                for Y0 in combinations(Y, j):
                    count += 1
                    e0 = sum(1 for x in X0 for y in Y0 if (x, y) in edges)
                    if abs(Fraction(e0, i * j) - dens) > eps:
                        ok = False
    return ok, dens, count


def quadratic_residues(n):
    return sorted({x * x % n for x in range(n) if gcd(x, n) == 1})
