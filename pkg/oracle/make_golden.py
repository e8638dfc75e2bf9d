"""Regenerate oracle/golden.json from the brute-force implementations in naive.py.

Run from the repository root:  python3 oracle/make_golden.py
"""

import json
import sys
from fractions import Fraction
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))

import naive as nv  # noqa: E402


def s(q):
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def main():
    g = {}
    S3 = nv.symmetric3()
    g["normal_subgroups_S3"] = nv.normal_subgroups(S3, 2)
    g["normal_subgroups_Z2_4_count"] = len(nv.normal_subgroups(nv.elementary_abelian_2(4)))
    g["normal_subgroups_Z12"] = nv.normal_subgroups(nv.cyclic(12))

    Z12 = nv.cyclic(12)
    arc4 = [0, 1, 2, 3]
    d, S = nv.vc_dimension(Z12, arc4)
    g["vc_Z12_arc4"] = {"vc": d, "shattered": list(S)}
    g["stability_Z8_sub04"] = list(nv.order_pattern(nv.cyclic(8), [0, 4], 4))
    k, a, b = nv.order_pattern(Z12, arc4, 4)
    g["stability_Z12_arc4"] = {"k": k, "a": list(a), "b": list(b)}

    g["bohr_Z12_quarter"] = nv.cyclic_bohr(12, [1], Fraction(1, 4))
    g["bohr_Z12_twelfth"] = nv.cyclic_bohr(12, [1], Fraction(1, 12))
    g["averaging_Z12_eighth_best"] = nv.averaging_best(12, [1], Fraction(1, 8))

    f = [[Fraction(0)], [Fraction(3, 10)], [Fraction(1, 2)], [Fraction(3, 4)]]
    g["defect_Z4_f"] = s(nv.defect(nv.cyclic(4), f))
    g["approx_Z4_f_3_10"] = nv.approximate_bohr(f, Fraction(3, 10))
    c, sup = nv.cyclic_nearest(4, [v[0] for v in f])
    g["nearest_Z4_f"] = {"coeff": c, "sup": s(sup)}
    g["bohr_Z4_eighth"] = nv.cyclic_bohr(4, [1], Fraction(1, 8))

    A06 = list(range(6))
    B = nv.cyclic_bohr(12, [1], Fraction(1, 4))
    Z = nv.bad_set(Z12, A06, B, Fraction(1, 5))
    g["bad_set_Z12"] = Z
    g["cover_Z10"] = nv.separating_cover(nv.cyclic(10), [0, 1], [])
    g["cover_Z6"] = nv.separating_cover(nv.cyclic(6), [0], [3, 4, 5])
    B0 = nv.cyclic_bohr(12, [1], Fraction(1, 8))
    F = nv.separating_cover(Z12, B0, Z)
    gam = Fraction(1, 5) * (Fraction(1, 4) / 4)
    D, sel = nv.structure_set(Z12, A06, B, F, gam)
    g["pipeline_Z12"] = {"B0": B0, "F": F, "gamma": s(gam), "D": D, "selected": sel,
                         "residual": len((set(A06) ^ set(D)) - set(Z))}

    E4 = nv.elementary_abelian_2(4)
    A_sub = [0, 1, 2, 3, 12, 13, 14]
    g["subgroup_witness_Z2_4"] = {"A": A_sub, "witness": nv.subgroup_witness(E4, A_sub, Fraction(1, 4), 16)}

    w = nv.cyclic_bohr_witness(101, list(range(50)), Fraction(2, 5))
    g["bohr_witness_Z101"] = {"coeffs": w["coeffs"], "delta": s(w["delta"]), "Z_size": len(w["Z"]),
                              "residual": w["residual"], "B": w["B"], "Z": w["Z"], "D": w["D"],
                              "cover": w["F"], "selected": w["selected"]}

    Z13 = nv.cyclic(13)
    A13 = [0, 2, 3, 5, 7, 8]
    B13 = nv.cyclic_bohr(13, [1], Fraction(1, 13))
    F13 = nv.separating_cover(Z13, B13, [])
    D13, _ = nv.structure_set(Z13, A13, B13, F13, Fraction(1, 4) * Fraction(1, 52))
    g["bohr_verify_Z13"] = {"A": A13, "B": B13, "D": D13, "cover": F13,
                            "bad_set": nv.bad_set(Z13, A13, B13, Fraction(1, 4)),
                            "residual_with_D": len(set(A13) ^ set(D13)),
                            "residual_empty_D": len(A13)}

    g["exact_Z4_minimal_Z"] = sorted(x for c in nv.cosets(nv.cyclic(4), [0, 2])
                                     if 0 < len(set(c) & {0, 1}) < 2 for x in c)

    Z4 = nv.cyclic(4)
    g["degrees_Z4"] = [len({0, 1} & {(1 + x) % 4 for x in [0, 2]}),
                       len({0, 1} & {(x + 1) % 4 for x in [0, 2]})]
    Z6 = nv.cyclic(6)
    g["uniform_Z6"] = nv.uniformly_good(Z6, [0, 1, 2], [0, 2, 4], [0, 2, 4], Fraction(1, 4))
    ok, dens, cnt = nv.regular_pair(nv.cyclic(8), [0, 1, 2, 3], [0, 1], [0, 1], Fraction(1, 2))
    g["regular_Z8"] = {"regular": ok, "density": s(dens), "checked": cnt}
    g["uniform_Z4_cosets"] = [[nv.uniformly_good(Z4, [0, 1], C, D, Fraction(1, 4))
                               for D in ([0, 2], [1, 3])] for C in ([0, 2], [1, 3])]
    V4 = nv.elementary_abelian_2(2)
    g["uniform_V4_cosets"] = [[nv.uniformly_good(V4, [0, 1], C, D, Fraction(1, 4))
                               for D in ([0, 1], [2, 3])] for C in ([0, 1], [2, 3])]
    g["quadratic_residues_7"] = nv.quadratic_residues(7)

    out = Path(__file__).resolve().parent / "golden.json"
    out.write_text(json.dumps(g, indent=2, sort_keys=True) + "\n")
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
