"""Command-line interface: ``nipreg <command> ...``.

Exit codes: 0 accept / computation complete, 1 internal check failed,
2 verdict reject, 3 size or budget limit, 4 input error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from pathlib import Path

from . import bohr as bh
from . import cayley as cy
from . import regularity as rg
from .errors import BudgetExceeded, CorrectionFailed, InputError, MalformedWitness, NipregError
from .generators import generate_set
from .groups import FiniteGroup, GroupSubset, Subgroup, build_group, subgroup_from_json
from .schema import dumps, encode, frac, load_json_arg, rat, subset_from_json, subset_to_json
from .vc import DEFAULT_MAX_K, DEFAULT_NODE_BUDGET, TranslateSystem, order_pattern, shatter

EXIT_OK, EXIT_INTERNAL, EXIT_REJECT, EXIT_LIMIT, EXIT_INPUT = 0, 1, 2, 3, 4

# flags that change how a command runs but not what it computes
_NOT_ECHOED = {"threads", "out", "format", "timing", "func", "command"}


# ------------------------------------------------------------- input helpers

def _group(arg) -> FiniteGroup:
    return build_group(load_json_arg(arg))


def _set(G: FiniteGroup, arg, seed: int) -> GroupSubset:
    obj = load_json_arg(arg)
    if isinstance(obj, dict) and "generator" in obj:
        return generate_set(obj, G, seed)
    return subset_from_json(G, obj)


def _mask(G: FiniteGroup, obj) -> GroupSubset:
    if isinstance(obj, str):
        obj = {"mask_hex": obj}
    return subset_from_json(G, obj)


def _subgroup(G: FiniteGroup, arg) -> Subgroup:
    return subgroup_from_json(G, load_json_arg(arg))


def _group_block(G: FiniteGroup) -> dict:
    return {"group": G.spec, "group_hash": G.table_hash(), "group_order": G.order}


# ------------------------------------------------------------- witness JSON

def witness_to_json(kind: str, G: FiniteGroup, A: GroupSubset, w) -> dict:
    out = {"kind": kind, **_group_block(G), "set": A.hex(), "epsilon": rat(w.epsilon),
           "H": w.H.elements.hex(), "index": w.H.index, "Z": w.Z.hex(), "D": w.D.hex()}
    if kind == "subgroup":
        out["margins"] = {"coset_min_counts": list(w.margins)}
    elif kind == "bohr":
        out.update(r=w.r, characters=[t.to_json() for t in w.taus], delta=rat(w.delta),
                   B=w.B.realized.hex(), cover=list(w.cover), selected=list(w.selected),
                   margins=encode(w.margins))
    return out


def witness_from_json(obj: dict):
    """Rebuild (kind, G, A, witness) from witness JSON, checking the embedded group hash."""
    if isinstance(obj, dict) and "kind" not in obj:
        # a full decompose report carries the witness under "result"
        obj = (obj.get("result") or {}).get("witness", obj.get("witness"))
    if not isinstance(obj, dict) or obj.get("kind") not in ("subgroup", "bohr", "exact"):
        raise MalformedWitness("witness needs a kind of subgroup, bohr or exact")
    try:
        G = build_group(obj["group"])
        if obj.get("group_hash") not in (None, G.table_hash()):
            raise MalformedWitness("group hash does not match the embedded group spec")
        A = _mask(G, obj["set"])
        H = Subgroup(_mask(G, obj["H"]))
        Z, D = _mask(G, obj["Z"]), _mask(G, obj["D"])
        eps = frac(obj["epsilon"])
        kind = obj["kind"]
        if kind == "subgroup":
            return kind, G, A, rg.SubgroupWitness(H, Z, D, eps, ())
        if kind == "exact":
            return kind, G, A, rg.ExactWitness(H, Z, D, eps)
        local, _ = H.as_group()
        taus = tuple(bh.character_from_json(local, c) for c in obj.get("characters", []))
        delta = frac(obj["delta"])
        if delta <= 0:
            raise MalformedWitness("delta must be positive")
        B = bh.bohr_neighborhood(H, taus, delta)
        if "B" in obj and _mask(G, obj["B"]) != B.realized:
            raise MalformedWitness("recorded B differs from the Bohr set of (H, characters, delta)")
        cover = tuple(int(x) for x in obj.get("cover", []))
        sel = tuple(int(x) for x in obj.get("selected", []))
        return kind, G, A, rg.BohrWitness(H, taus, delta, B, Z, D, eps, cover, sel, {})
    except KeyError as exc:
        raise MalformedWitness(f"witness is missing field {exc}") from None
    except MalformedWitness:
        raise
    except InputError as exc:
        raise MalformedWitness(str(exc)) from None


def verify_witness(kind, G, A, w) -> rg.RegularityReport:
    if kind == "subgroup":
        return rg.verify_subgroup_witness(G, A, w)
    if kind == "bohr":
        return rg.verify_bohr_witness(G, A, w)
    return rg.verify_exact_witness(G, A, w.H, w.Z, w.epsilon)


# ------------------------------------------------------------- commands
# each returns (exit code, verdict, result dict)

def cmd_vc(a):
    G = _group(a.group)
    A = _set(G, a.set, a.seed)
    res = shatter(TranslateSystem.of(A), a.budget or DEFAULT_NODE_BUDGET)
    wt = {"{" + ",".join(map(str, k)) + "}": g for k, g in res.witness_translates.items()}
    out = {"vc_dimension": res.vc_dimension, "shattered_set": list(res.shattered_set),
           "witness_translates": wt, "distinct_translates": len(TranslateSystem.of(A).translates),
           "nodes": res.nodes}
    if a.k is not None:
        out["k"] = a.k
        out["k_nip"] = res.vc_dimension <= a.k - 1
    return EXIT_OK, "complete", out


def cmd_stability(a):
    G = _group(a.group)
    A = _set(G, a.set, a.seed)
    pat = order_pattern(G, A, a.max_k, a.budget or DEFAULT_NODE_BUDGET)
    return EXIT_OK, "complete", {"stability_order": pat.k, "max_k": a.max_k, "a": list(pat.a), "b": list(pat.b),
                                 "stable_for_k": None if pat.k >= a.max_k else pat.k + 1, "capped": pat.k >= a.max_k, "nodes": pat.nodes}


def _characters(local: FiniteGroup, arg) -> list[bh.Character]:
    obj = load_json_arg(arg) if arg is not None else []
    if not isinstance(obj, list):
        raise InputError("characters must be a JSON list")
    return [bh.character_from_json(local, c) for c in obj]


def cmd_bohr(a):
    G = _group(a.group)
    H = _subgroup(G, a.subgroup) if a.subgroup else None
    host = H if H is not None else G
    local = H.as_group()[0] if H is not None else G
    taus = _characters(local, a.characters)
    delta = frac(a.delta)
    B = bh.bohr_neighborhood(host, taus, delta)
    h = len(local.elements())
    out = {"realized": subset_to_json(B.realized), "size": len(B), "rank": len(taus), "delta": delta,
           "characters": [t.to_json() for t in taus]}
    if delta > 0:
        B2 = bh.bohr_neighborhood(host, taus, 2 * delta)
        bound = bh.ball_volume(len(taus), delta) * h
        out["doubled"] = {"size": len(B2), "bound": bound, "holds": len(B2) >= bound}
        if taus:
            sh = bh.averaging_shift(host, taus, delta)
            out["averaging"] = {"center": list(sh.center.coords), "S": subset_to_json(sh.S), "a": sh.a,
                                "size": len(sh.S), "bound": bound}
    return EXIT_OK, "complete", out


def _torus_map(G: FiniteGroup, arg) -> bh.TorusMap:
    obj = load_json_arg(arg)
    if not isinstance(obj, dict) or not isinstance(obj.get("values"), list):
        raise InputError("torus map needs a 'values' list")
    vals = [[frac(c) for c in v] for v in obj["values"]]
    f = bh.TorusMap.from_values(G, vals)
    if "rank" in obj and obj["rank"] != f.rank:
        raise InputError("declared rank does not match the values")
    return f


def cmd_defect(a):
    G = _group(a.group)
    f = _torus_map(G, a.map)
    d = bh.defect(f)
    out = {"defect": d, "rank": f.rank}
    if a.delta is not None:
        out["delta"] = frac(a.delta)
        out["is_delta_homomorphism"] = d < frac(a.delta)
    return EXIT_OK, "complete", out


def cmd_correct(a):
    G = _group(a.group)
    f = _torus_map(G, a.map)
    delta = frac(a.delta)
    out = {"defect": bh.defect(f), "delta": delta}
    try:
        B = bh.bohr_inside_approximate(f, delta)
    except CorrectionFailed as exc:
        out.update(characters=[t.to_json() for t in exc.taus], sup_dist=exc.sup_dist,
                   bound=2 * delta, error="CorrectionFailed")
        return EXIT_REJECT, "reject", out
    taus, sup = bh.nearest_homomorphism(f)
    Y = bh.approximate_bohr(f, 3 * delta)
    out.update(characters=[t.to_json() for t in taus], sup_dist=sup, bound=2 * delta,
               Y=subset_to_json(Y), B=subset_to_json(B.realized), nested=B.realized.issubset(Y))
    return EXIT_OK, "accept", out


def cmd_decompose(a):
    G = _group(a.group)
    A = _set(G, a.set, a.seed)
    eps = frac(a.eps)
    out = {"mode": a.mode}
    if a.mode == "subgroup":
        w = rg.find_subgroup_witness(G, A, eps, a.max_index)
        kind = "subgroup"
    elif a.mode == "bohr":
        stats = {}
        try:
            w = rg.find_bohr_witness(G, A, eps, a.max_index, a.max_rank,
                                     budget=a.budget or rg.DEFAULT_CANDIDATE_BUDGET, threads=a.threads, stats=stats)
        finally:
            out["stats"] = stats
        kind = "bohr"
    else:
        kind = "exact"
        if a.subgroup or a.z:
            if not (a.subgroup and a.z):
                raise InputError("exact verification needs both --subgroup and --z")
            H = _subgroup(G, a.subgroup)
            Z = subset_from_json(G, load_json_arg(a.z))
            rep = rg.verify_exact_witness(G, A, H, Z, eps)
            out.update(witness=witness_to_json("exact", G, A, rg.ExactWitness(H, Z, A - Z, eps)),
                       verification=rep.to_json())
            return (EXIT_OK if rep.accept else EXIT_REJECT), rep.to_json()["verdict"], out
        w = rg.find_exact_witness(G, A, eps, a.max_index)
    if w is None:
        out["witness"] = None
        return EXIT_REJECT, "reject", out
    rep = verify_witness(kind, G, A, w)
    out["witness"] = witness_to_json(kind, G, A, w)
    out["verification"] = rep.to_json()
    if kind in ("subgroup", "bohr") and a.moreover:
        out["moreover"] = {"H": rg.boolean_algebra_rank(G, A, w.H.elements)}
        if kind == "bohr":
            out["moreover"]["Z"] = rg.boolean_algebra_rank(G, A, w.Z)
    return (EXIT_OK if rep.accept else EXIT_REJECT), ("accept" if rep.accept else "reject"), out


def cmd_verify(a):
    kind, G, A, w = witness_from_json(load_json_arg(a.witness))
    rep = verify_witness(kind, G, A, w)
    return (EXIT_OK if rep.accept else EXIT_REJECT), ("accept" if rep.accept else "reject"), \
        {"kind": kind, "verification": rep.to_json()}


def cmd_cayley(a):
    G = _group(a.group)
    A = _set(G, a.set, a.seed)
    H = _subgroup(G, a.subgroup)
    mode = "exhaustive" if a.exhaustive else ("sampled" if a.samples is not None else "auto")
    if a.no_regular:
        mode = "off"
    rep = cy.corollary_check(G, A, H, frac(a.eps), regular=mode,
                             samples=a.samples or cy.DEFAULT_SAMPLES, seed=a.seed)
    return (EXIT_OK if rep.accept else EXIT_REJECT), ("accept" if rep.accept else "reject"), rep.to_json()


COMMANDS = {"vc": cmd_vc, "stability": cmd_stability, "bohr": cmd_bohr, "defect": cmd_defect,
            "correct": cmd_correct, "decompose": cmd_decompose, "verify": cmd_verify, "cayley": cmd_cayley}


# ------------------------------------------------------------- parser

def _common(p: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--threads", type=int, default=d(1), help="worker threads")
    p.add_argument("--seed", type=int, default=d(0), help="seed for generators and sampling")
    p.add_argument("--budget", type=int, default=d(None), help="search budget (nodes or candidates)")
    p.add_argument("--out", default=d(None), help="write the report here (a directory for batch)")
    p.add_argument("--format", choices=("json", "text"), default=d("json"))
    p.add_argument("--timing", action="store_true", default=d(False),
                   help="add wall-clock time to the report (breaks byte-identical reruns)")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nipreg", description=__doc__.splitlines()[0])
    _common(p, suppress=False)
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, help_):
        sp = sub.add_parser(name, help=help_)
        _common(sp, suppress=True)
        return sp

    s = add("vc", "VC-dimension of the left translates of a set")
    s.add_argument("--group", required=True)
    s.add_argument("--set", required=True)
    s.add_argument("--k", type=int, default=None, help="also report whether the set is k-NIP")

    s = add("stability", "longest order pattern (stability order)")
    s.add_argument("--group", required=True)
    s.add_argument("--set", required=True)
    s.add_argument("--max-k", type=int, default=DEFAULT_MAX_K)

    s = add("bohr", "Bohr neighborhood of a tuple of characters")
    s.add_argument("--group", required=True)
    s.add_argument("--subgroup", default=None)
    s.add_argument("--characters", default=None, help='coefficient lists, e.g. [[1]]')
    s.add_argument("--delta", required=True)

    s = add("defect", "multiplicative defect of a torus-valued map")
    s.add_argument("--group", required=True)
    s.add_argument("--map", required=True)
    s.add_argument("--delta", default=None)

    s = add("correct", "correct an approximate homomorphism to characters")
    s.add_argument("--group", required=True)
    s.add_argument("--map", required=True)
    s.add_argument("--delta", required=True)

    s = add("decompose", "search a structure/regularity witness")
    s.add_argument("--group", required=True)
    s.add_argument("--set", required=True)
    s.add_argument("--eps", required=True)
    s.add_argument("--mode", choices=("bohr", "subgroup", "exact"), default="bohr")
    s.add_argument("--max-index", type=int, default=16)
    s.add_argument("--max-rank", type=int, default=2)
    s.add_argument("--subgroup", default=None, help="exact mode: verify this subgroup")
    s.add_argument("--z", default=None, help="exact mode: verify this exceptional set")
    s.add_argument("--moreover", action="store_true", help="test H (and Z) against two-sided translates")

    s = add("verify", "re-verify a witness file")
    s.add_argument("--witness", required=True)

    s = add("cayley", "Cayley-graph regularity over the cosets of a subgroup")
    s.add_argument("--group", required=True)
    s.add_argument("--set", required=True)
    s.add_argument("--subgroup", required=True)
    s.add_argument("--eps", required=True)
    g = s.add_mutually_exclusive_group()
    g.add_argument("--exhaustive", action="store_true")
    g.add_argument("--samples", type=int, default=None)
    g.add_argument("--no-regular", action="store_true", help="skip sub-pair regularity checks")

    s = add("batch", "run a list of experiments")
    s.add_argument("--spec", required=True)
    return p


def _param_echo(a) -> dict:
    out = {}
    for k, v in sorted(vars(a).items()):
        if k in _NOT_ECHOED or v is None or v is False:
            continue
        if isinstance(v, str) and v.lstrip().startswith(("{", "[")):
            try:
                v = json.loads(v)
            except json.JSONDecodeError:
                pass
        out[k] = v
    return out


def execute(argv: list[str]) -> tuple[int, dict]:
    """Parse and run one non-batch command; returns (exit code, report)."""
    a = build_parser().parse_args(argv)
    return _execute_ns(a)


def _execute_ns(a) -> tuple[int, dict]:
    report = {"command": a.command, "parameters": _param_echo(a)}
    t0 = time.perf_counter()
    try:
        code, verdict, result = COMMANDS[a.command](a)
        report.update(verdict=verdict, result=result)
    except BudgetExceeded as exc:
        code = exc.exit_code
        report.update(verdict="budget_exceeded", error={"type": type(exc).__name__, "message": str(exc),
                                                        "stats": exc.stats})
    except NipregError as exc:
        code = exc.exit_code
        report.update(verdict="error", error={"type": type(exc).__name__, "message": str(exc)})
    if getattr(a, "timing", False):
        report["timing_seconds"] = round(time.perf_counter() - t0, 6)
    return code, encode(report)


def _batch(a) -> tuple[int, dict]:
    spec = load_json_arg(a.spec)
    entries = spec.get("entries") if isinstance(spec, dict) else spec
    if not isinstance(entries, list):
        raise InputError("batch spec needs an 'entries' list")
    argvs = []
    for i, e in enumerate(entries):
        if not isinstance(e, dict) or e.get("command") not in COMMANDS:
            raise InputError(f"entry {i} needs a command among {sorted(COMMANDS)}")
        argv = [e["command"], "--seed", str(e.get("seed", a.seed))]
        for key in ("group", "set", "subgroup", "map", "witness", "characters"):
            if key in e:
                argv += ["--" + key, e[key] if isinstance(e[key], str) else json.dumps(e[key])]
        for k, v in (e.get("params") or {}).items():
            flag = "--" + k.replace("_", "-")
            if v is True:
                argv.append(flag)
            elif v is not False and v is not None:
                argv += [flag, str(v)]
        argvs.append(argv)
    with ThreadPoolExecutor(max_workers=max(1, a.threads)) as pool:
        results = list(pool.map(execute, argvs))
    names = [str(e.get("name", i)) for i, e in enumerate(entries)]
    summary = {"command": "batch", "entries": [
        {"name": n, "command": e["command"], "exit_code": c, "verdict": r.get("verdict")}
        for n, e, (c, r) in zip(names, entries, results)]}
    counts: dict = {}
    for c, r in results:
        counts[r.get("verdict")] = counts.get(r.get("verdict"), 0) + 1
    summary["counts"] = counts
    if a.out:
        d = Path(a.out)
        d.mkdir(parents=True, exist_ok=True)
        for i, (n, (c, r)) in enumerate(zip(names, results)):
            (d / f"{i:03d}_{n}.json").write_text(dumps(r))
        (d / "summary.json").write_text(dumps(summary))
    else:
        summary["reports"] = [r for _, r in results]
    worst = max((c for c, _ in results), default=0)
    return worst, summary


def _render_text(report: dict) -> str:
    lines = [f"command: {report.get('command')}", f"verdict: {report.get('verdict')}"]
    body = report.get("result") or report.get("error") or {}
    if report.get("command") == "batch":
        body = {e["name"]: f"{e['verdict']} (exit {e['exit_code']})" for e in report["entries"]}
    for k, v in body.items():
        if isinstance(v, (dict, list)):
            v = json.dumps(v, sort_keys=True)
            if len(v) > 100:
                v = v[:97] + "..."
        lines.append(f"{k}: {v}")
    return "\n".join(lines) + "\n"


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code not in (0, None) else 0
    try:
        if a.command == "batch":
            code, report = _batch(a)
        else:
            code, report = _execute_ns(a)
    except NipregError as exc:
        print(f"nipreg: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    text = _render_text(report) if a.format == "text" else dumps(report)
    if a.out and a.command != "batch":
        Path(a.out).write_text(text)
    else:
        sys.stdout.write(text)
    if report.get("error"):
        print(f"nipreg: {report['error']['type']}: {report['error']['message']}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
