import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import naive as nv
from nipreg.errors import InputError, SizeLimit
from nipreg.groups import GroupSubset, build_group
from nipreg.vc import (
    TranslateSystem,
    is_k_nip,
    order_pattern,
    shatter,
    stability_order,
    vc_dimension,
)


def Z(n):
    return build_group({"preset": "cyclic", "n": n})


def arc(G, k):
    return GroupSubset.from_elements(G, range(k))


def test_vc_arc_Z12(golden):
    G = Z(12)
    res = shatter(TranslateSystem.of(arc(G, 4)))
    assert res.vc_dimension == golden["vc_Z12_arc4"]["vc"] == 2
    assert list(res.shattered_set) == golden["vc_Z12_arc4"]["shattered"]
    # {0, 2} is shattered too
    assert TranslateSystem.of(arc(G, 4)).is_shattered((0, 2))
    assert len(res.witness_translates) == 4


def test_vc_witnesses_realize_traces():
    G = Z(12)
    A = arc(G, 4)
    res = shatter(TranslateSystem.of(A))
    for trace, g in res.witness_translates.items():
        assert set(A.left_translate(g).elements()) & set(res.shattered_set) == set(trace)


def test_is_k_nip_examples():
    G = Z(12)
    A = arc(G, 4)
    assert is_k_nip(G, A, 3)
    assert not is_k_nip(G, A, 2)
    with pytest.raises(InputError):
        is_k_nip(G, A, 0)


def test_trivial_sets():
    G = Z(7)
    for A in (GroupSubset.empty(G), GroupSubset.full(G)):
        assert vc_dimension(TranslateSystem.of(A)) == 0
        assert is_k_nip(G, A, 1)


def test_stability_examples(golden):
    G8 = Z(8)
    assert stability_order(G8, GroupSubset.from_elements(G8, [0, 4]), 4) == 1
    G = Z(12)
    op = order_pattern(G, arc(G, 4), 4)
    g = golden["stability_Z12_arc4"]
    assert (op.k, list(op.a), list(op.b)) == (g["k"], g["a"], g["b"])
    for i in range(op.k):
        for j in range(op.k):
            assert ((op.a[i] + op.b[j]) % 12 in range(4)) == (i <= j)


def test_stability_cap():
    G = Z(12)
    assert stability_order(G, arc(G, 4), 2) == 2


def test_subgroups_are_two_stable():
    G = Z(12)
    for d in (1, 2, 3, 4, 6, 12):
        H = GroupSubset.from_elements(G, range(0, 12, d))
        assert stability_order(G, H, 6) <= 1


def test_nonabelian_rows_use_left_multiplication():
    G = build_group({"preset": "symmetric", "n": 3})
    A = GroupSubset.from_elements(G, [1, 2])
    op = order_pattern(G, A, 6)
    for i in range(op.k):
        for j in range(op.k):
            assert (int(G.mul[op.a[i], op.b[j]]) in A) == (i <= j)
    k, a, b = nv.order_pattern(G.mul.tolist(), [1, 2], 6)
    assert (op.k, op.a, op.b) == (k, a, b)


def test_budget():
    G = build_group({"preset": "symmetric", "n": 4})
    A = GroupSubset.from_elements(G, range(0, 24, 2))
    with pytest.raises(SizeLimit):
        order_pattern(G, A, 10, budget=50)
    with pytest.raises(SizeLimit):
        shatter(TranslateSystem.of(GroupSubset.from_elements(G, [1, 5, 7, 11, 13, 20])), budget=3)


sets = st.integers(1, 14).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, (1 << n) - 1)))


@given(sets)
@settings(max_examples=150, deadline=None)
def test_vc_matches_oracle(nm):
    n, m = nm
    G = Z(n)
    A = GroupSubset(G, m)
    res = shatter(TranslateSystem.of(A))
    d, S = nv.vc_dimension(nv.cyclic(n), A.elements())
    assert (res.vc_dimension, res.shattered_set) == (d, S)


@given(sets, st.data())
@settings(max_examples=150, deadline=None)
def test_shattering_is_hereditary(nm, data):
    n, m = nm
    G = Z(n)
    sys = TranslateSystem.of(GroupSubset(G, m))
    res = shatter(sys)
    S = res.shattered_set
    sub = data.draw(st.lists(st.sampled_from(S), unique=True)) if S else []
    assert sys.is_shattered(tuple(sorted(sub)))
    for k in range(1, 5):
        assert is_k_nip(G, GroupSubset(G, m), k) == (res.vc_dimension < k)


@given(sets)
@settings(max_examples=150, deadline=None)
def test_complement_changes_stability_by_at_most_one(nm):
    n, m = nm
    G = Z(n)
    A = GroupSubset(G, m)
    s, t = stability_order(G, A, n + 1), stability_order(G, A.complement(), n + 1)
    assert abs(s - t) <= 1


@given(sets, st.integers(0, 13))
@settings(max_examples=100, deadline=None)
def test_translation_invariance(nm, g):
    n, m = nm
    G = Z(n)
    A = GroupSubset(G, m)
    B = A.left_translate(g % n)
    assert vc_dimension(TranslateSystem.of(A)) == vc_dimension(TranslateSystem.of(B))
    assert stability_order(G, A, n + 1) == stability_order(G, B, n + 1)
