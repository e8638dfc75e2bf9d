from fractions import Fraction as Fr

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import naive as nv
from nipreg import bohr as bh
from nipreg import regularity as rg
from nipreg.errors import BudgetExceeded, EmptyBase, InputError, MalformedWitness, NotCosetUnion
from nipreg.groups import GroupSubset, Subgroup, build_group, normal_subgroups, whole


def Z(n):
    return build_group({"preset": "cyclic", "n": n})


def S(G, xs):
    return GroupSubset.from_elements(G, xs)


def test_bad_set_example(golden):
    G = Z(12)
    Zs = rg.bad_set(G, S(G, range(6)), S(G, [0, 1, 2, 10, 11]), Fr(1, 5))
    assert Zs.elements() == golden["bad_set_Z12"]
    assert Zs.complement().elements() == [2, 3, 8, 9]
    with pytest.raises(EmptyBase):
        rg.bad_set(G, S(G, [0]), GroupSubset.empty(G), Fr(1, 5))


def test_bad_set_threshold_is_inclusive():
    G = Z(4)
    # each translate of {0, 1} meets {0, 2} in exactly one point: 1 >= (1/2) * 2
    assert len(rg.bad_set(G, S(G, [0, 2]), S(G, [0, 1]), Fr(1, 2))) == 4


def test_separating_cover_examples(golden):
    G = Z(10)
    F = rg.separating_cover(G, S(G, [0, 1]), GroupSubset.empty(G))
    assert list(F) == golden["cover_Z10"] == [0, 2, 4, 6, 8]
    G6 = Z(6)
    assert list(rg.separating_cover(G6, S(G6, [0]), S(G6, [3, 4, 5]))) == golden["cover_Z6"]


def test_gamma():
    assert rg.gamma(Fr(1, 5), 1, 1, Fr(1, 4)) == Fr(1, 80)
    assert rg.gamma(Fr(1, 2), 2, 0, Fr(1, 3)) == Fr(1, 4)


def test_pipeline_Z12(golden):
    G = Z(12)
    A = S(G, range(6))
    t = [bh.character_from_coeffs(G, [1])]
    B = bh.bohr_neighborhood(G, t, Fr(1, 4)).realized
    B0 = bh.bohr_neighborhood(G, t, Fr(1, 8)).realized
    Zs = rg.bad_set(G, A, B, Fr(1, 5))
    F = rg.separating_cover(G, B0, Zs)
    D, sel = rg.build_structure_set(G, A, B, F, rg.gamma(Fr(1, 5), 1, 1, Fr(1, 4)))
    g = golden["pipeline_Z12"]
    assert B0.elements() == g["B0"] and list(F) == g["F"]
    assert D.elements() == g["D"] and list(sel) == g["selected"]
    assert len((A ^ D) - Zs) == g["residual"]


def test_subgroup_witness_flipped(golden):
    G = build_group({"preset": "elementary_abelian", "p": 2, "k": 4})
    g = golden["subgroup_witness_Z2_4"]
    A = S(G, g["A"])
    w = rg.find_subgroup_witness(G, A, Fr(1, 4), 16)
    assert w.H.elements.elements() == g["witness"]["H"]
    assert w.Z.elements() == g["witness"]["Z"] and w.D.elements() == g["witness"]["D"]
    assert w.index == 2
    assert rg.verify_subgroup_witness(G, A, w).accept


def test_subgroup_witness_matches_oracle_on_small_groups():
    for spec in ({"preset": "cyclic", "n": 8}, {"preset": "dihedral", "n": 4}):
        G = build_group(spec)
        T = G.mul.tolist()
        for mask in range(0, 1 << G.order, 7):
            A = GroupSubset(G, mask)
            for eps in (Fr(1, 4), Fr(1, 2)):
                w = rg.find_subgroup_witness(G, A, eps, 8)
                ref = nv.subgroup_witness(T, A.elements(), eps, 8)
                if ref is None:
                    assert w is None
                else:
                    got = {"H": w.H.elements.elements(), "Z": w.Z.elements(), "D": w.D.elements()}
                    assert got == ref


def test_verify_subgroup_rejects_malformed():
    G = Z(8)
    H = Subgroup(S(G, [0, 4]))
    w = rg.SubgroupWitness(H, S(G, [0]), GroupSubset.empty(G), Fr(1, 4), ())
    with pytest.raises(MalformedWitness):
        rg.verify_subgroup_witness(G, S(G, [0, 4]), w)


def test_verify_subgroup_reports_failing_clause():
    G = Z(8)
    H = Subgroup(S(G, [0, 4]))
    A = S(G, [0, 1])
    rep = rg.verify_subgroup_witness(G, A, rg.SubgroupWitness(H, GroupSubset.empty(G), S(G, [0, 4]), Fr(1, 2), ()))
    assert not rep.accept
    assert not rep.clauses["regularity"]["holds"]
    assert rep.margins["coset_min_counts"] == [1, 1, 0, 0]


def test_bohr_witness_Z101(golden):
    G = Z(101)
    A = S(G, range(50))
    w = rg.find_bohr_witness(G, A, Fr(2, 5), 1, 1)
    gw = golden["bohr_witness_Z101"]
    assert list(w.taus[0].coeffs) == gw["coeffs"] and str(w.delta) == gw["delta"]
    assert w.B.realized.elements() == gw["B"]
    rep = rg.verify_bohr_witness(G, A, w)
    assert rep.accept and rep.margins["cover_avoids_Z"]


def test_bohr_rank_zero_on_a_coset_union():
    G = Z(12)
    H = Subgroup(S(G, [0, 4, 8]))
    A = H.coset(1) | H.coset(2)
    w = rg.find_bohr_witness(G, A, Fr(1, 4), 4, 0)
    assert w.r == 0 and w.H == H and len(w.Z) == 0 and w.D == A
    assert w.B.realized == H.elements


def test_bohr_budget():
    G = Z(101)
    stats = {}
    with pytest.raises(BudgetExceeded) as exc:
        rg.find_bohr_witness(G, S(G, range(50)), Fr(2, 5), 1, 1, budget=100, stats=stats)
    assert exc.value.stats["next_block"]["rank"] == 1


def test_bohr_witness_Z13(golden):
    G = Z(13)
    g = golden["bohr_verify_Z13"]
    A = S(G, g["A"])
    H = whole(G)
    t = (bh.character_from_coeffs(G, [1]),)
    delta = Fr(1, 13)
    B = bh.bohr_neighborhood(H, t, delta)
    assert B.realized.elements() == g["B"]
    ok = rg.BohrWitness(H, t, delta, B, GroupSubset.empty(G), S(G, g["D"]), Fr(1, 4), tuple(g["cover"]),
                        (), {})
    rep = rg.verify_bohr_witness(G, A, ok)
    assert rep.accept
    assert rep.clauses["structure"]["value"] == g["residual_with_D"]
    bad = rg.BohrWitness(H, t, delta, B, GroupSubset.empty(G), GroupSubset.empty(G), Fr(1, 4),
                         tuple(g["cover"]), (), {})
    rep = rg.verify_bohr_witness(G, A, bad)
    assert not rep.accept
    assert rep.clauses["regularity"]["holds"]
    assert not rep.clauses["structure"]["holds"]
    assert rep.clauses["structure"]["value"] == g["residual_empty_D"]


def test_bohr_witness_D_must_come_from_cover():
    G = Z(13)
    H = whole(G)
    t = (bh.character_from_coeffs(G, [1]),)
    B = bh.bohr_neighborhood(H, t, Fr(3, 13))
    w = rg.BohrWitness(H, t, Fr(3, 13), B, GroupSubset.empty(G), S(G, [0]), Fr(1, 4), (0,), (), {})
    with pytest.raises(MalformedWitness):
        rg.verify_bohr_witness(G, S(G, [0]), w)


def test_exact_examples(golden):
    G = Z(4)
    H = Subgroup(S(G, [0, 2]))
    rep = rg.verify_exact_witness(G, S(G, [0, 1]), H, GroupSubset.empty(G), Fr(1, 2))
    assert not rep.accept
    assert rep.margins["minimal_Z_size"] == len(golden["exact_Z4_minimal_Z"]) == 4
    with pytest.raises(NotCosetUnion):
        rg.verify_exact_witness(G, S(G, [0, 1]), H, S(G, [0]), Fr(1, 2))
    assert rg.find_exact_witness(G, S(G, [0, 1]), Fr(1, 2), 4).H.order == 1


def test_epsilon_range():
    G = Z(4)
    with pytest.raises(InputError):
        rg.find_subgroup_witness(G, S(G, [0]), Fr(0), 4)
    with pytest.raises(InputError):
        rg.find_subgroup_witness(G, S(G, [0]), Fr(3, 2), 4)


def test_moreover_diagnostic():
    G = Z(12)
    H = S(G, [0, 3, 6, 9])
    rep = rg.boolean_algebra_rank(G, H, H)
    assert rep["c"] == 1
    big = build_group({"preset": "cyclic", "n": 300})
    assert rg.boolean_algebra_rank(big, S(big, [0]), S(big, [0]))["c"] is None


GROUPS = [{"preset": "cyclic", "n": 12}, {"preset": "dihedral", "n": 4}, {"preset": "quaternion8"},
          {"preset": "elementary_abelian", "p": 2, "k": 3}, {"preset": "symmetric", "n": 3}]


@given(st.sampled_from(GROUPS), st.data())
@settings(max_examples=80, deadline=None)
def test_coset_unions_are_found_exactly(spec, data):
    G = build_group(spec)
    H = data.draw(st.sampled_from(normal_subgroups(G)))
    picks = data.draw(st.lists(st.booleans(), min_size=H.index, max_size=H.index))
    A = GroupSubset.empty(G)
    for rep, on in zip(H.representatives, picks):
        if on:
            A = A | H.coset(rep)
    eps = data.draw(st.sampled_from([Fr(1, 8), Fr(1, 4), Fr(1, 2)]))
    w = rg.find_subgroup_witness(G, A, eps, G.order)
    assert w is not None and w.index <= H.index and len(w.Z) == 0
    assert rg.verify_subgroup_witness(G, A, w).accept
    pinned = rg.find_subgroup_witness(G, A, eps, G.order, subgroups=[H])
    assert pinned.D == A and len(pinned.Z) == 0
    ex = rg.find_exact_witness(G, A, eps, G.order)
    assert ex is not None and len(ex.Z) == 0 and ex.H.index <= H.index
    assert rg.verify_exact_witness(G, A, H, GroupSubset.empty(G), eps).accept


@given(st.sampled_from(GROUPS), st.data())
@settings(max_examples=80, deadline=None)
def test_verification_monotone_in_epsilon(spec, data):
    G = build_group(spec)
    A = GroupSubset(G, data.draw(st.integers(0, (1 << G.order) - 1)))
    eps = data.draw(st.sampled_from([Fr(1, 8), Fr(1, 4), Fr(1, 3)]))
    w = rg.find_subgroup_witness(G, A, eps, G.order)
    if w is None:
        return
    for bigger in (eps + Fr(1, 10), Fr(1, 2), Fr(1)):
        w2 = rg.SubgroupWitness(w.H, w.Z, w.D, bigger, w.margins)
        assert rg.verify_subgroup_witness(G, A, w2).accept
    H = w.H
    assert rg.verify_exact_witness(G, A, H, rg.straddling_cosets(H, A), Fr(1)).clauses["exact_outside_Z"]["holds"]


@given(st.integers(2, 16), st.data())
@settings(max_examples=80, deadline=None)
def test_cover_properties(n, data):
    G = Z(n)
    base = GroupSubset(G, data.draw(st.integers(1, (1 << n) - 1)))
    Zs = GroupSubset(G, data.draw(st.integers(0, (1 << n) - 1)))
    F = rg.separating_cover(G, base, Zs)
    assert len(F) <= n // len(base)
    trans = [base.left_translate(x) for x in F]
    for i in range(len(trans)):
        for j in range(i + 1, len(trans)):
            assert trans[i].isdisjoint(trans[j])
    assert not any(x in Zs for x in F)
    assert list(F) == nv.separating_cover(nv.cyclic(n), base.elements(), Zs.elements())


@given(st.sampled_from(GROUPS), st.data())
@settings(max_examples=60, deadline=None)
def test_rank_zero_bohr_search_reproduces_subgroup_search(spec, data):
    G = build_group(spec)
    A = GroupSubset(G, data.draw(st.integers(0, (1 << G.order) - 1)))
    eps = data.draw(st.sampled_from([Fr(1, 8), Fr(1, 4), Fr(1, 2)]))
    w = rg.find_subgroup_witness(G, A, eps, G.order)
    b = rg.find_bohr_witness(G, A, eps, G.order, 0)
    assert (w is None) == (b is None)
    if w is not None:
        assert (b.H, b.Z, b.D) == (w.H, w.Z, w.D)
