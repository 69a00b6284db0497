"""Command-line front end.

Every run echoes its manifest (subcommand and all parameters) into the
report.  Exit status is 0 whenever a verdict was computed, 2 for malformed
input and 3 when a budget ran out.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, canonical, clone, constructions, designs, group, oep, optable, quasigroups
from .kernels import BACKEND


class InputError(ValueError):
    pass


class BudgetExhausted(RuntimeError):
    pass


# -- input parsing ------------------------------------------------------------------


def _lines(path: str):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    return text, text.splitlines()


def read_action(path: str) -> group.FiniteAction:
    text, lines = _lines(path)
    n = None
    for no, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        try:
            vals = [int(t) for t in toks]
        except ValueError:
            raise InputError(f"{path}:{no}: expected integers") from None
        if n is None:
            if len(vals) != 1 or vals[0] < 1:
                raise InputError(f"{path}:{no}: first line must be the domain size")
            n = vals[0]
        elif sorted(vals) != list(range(n)):
            raise InputError(f"{path}:{no}: not a permutation of 0..{n - 1}")
    if n is None:
        raise InputError(f"{path}: empty action file")
    try:
        return group.parse_action(text, name=Path(path).stem)
    except group.GroupError as exc:
        raise InputError(f"{path}: {exc}") from None


def read_op(path: str) -> optable.OpTable:
    text, lines = _lines(path)
    count = 0
    header = None
    for no, raw in enumerate(lines, 1):
        for tok in raw.split("#", 1)[0].split():
            try:
                v = int(tok)
            except ValueError:
                raise InputError(f"{path}:{no}: {tok!r} is not an integer") from None
            if header is None or len(header) < 2:
                header = (header or ()) + (v,)
                continue
            if not 0 <= v < header[0]:
                raise InputError(f"{path}:{no}: value {v} outside 0..{header[0] - 1}")
            count += 1
    if header is None or len(header) < 2:
        raise InputError(f"{path}: missing 'n k' header")
    n, k = header
    if count != n ** k:
        raise InputError(f"{path}:{len(lines)}: expected {n ** k} values, found {count}")
    clean = "\n".join(raw.split("#", 1)[0] for raw in lines)
    return optable.parse_op(clean)


def read_bounds(spec: str) -> frozenset:
    if spec in oep.PRESETS:
        return oep.PRESETS[spec]
    text, lines = _lines(spec)
    try:
        return oep.parse_bounds(text)
    except ValueError as exc:
        raise InputError(f"{spec}: {exc}") from None


def make_action(args) -> group.FiniteAction:
    chosen = [a for a in ("action", "free_boolean", "cyclic", "trivial") if getattr(args, a, None) is not None]
    if len(chosen) != 1:
        raise InputError("give exactly one of --action, --free-boolean, --cyclic, --trivial")
    if args.action is not None:
        return read_action(args.action)
    if args.free_boolean is not None:
        s, m = args.free_boolean
        return group.free_boolean_action(s, m)
    if args.cyclic is not None:
        order, s = args.cyclic
        return group.regular_cyclic_action(order, s)
    return group.trivial_action(args.trivial)


FAMILIES = ("exmin", "boolean-sum", "rank-osp", "odd-majority", "odd-malcev", "mstar", "palfy")


def construct(action, family: str, args) -> optable.OpTable:
    if family == "exmin":
        return constructions.exmin_minority(action)
    if family == "boolean-sum":
        return constructions.boolean_sum(action)
    if family == "rank-osp":
        return constructions.rank_orbit_semiprojection(action, args.k)
    if family == "odd-majority":
        return constructions.odd_majority(action)
    if family == "odd-malcev":
        return constructions.odd_malcev(action)
    if family == "mstar":
        return constructions.mstar(action, constructions.odd_majority(action))
    if family == "palfy":
        b = constructions.default_base_point(action) if args.b is None else args.b
        return constructions.palfy_op(constructions.PalfyParams(action, args.k, b, args.alpha, args.beta))
    raise InputError(f"unknown family {family}")


def _budget(args) -> clone.Budget:
    return clone.Budget(args.budget_tables, args.budget_evals)


def _decision(d: clone.Decision) -> dict:
    if d.value is None and d.detail.get("reason") == "budget":
        raise BudgetExhausted(d.detail.get("budget") or "budget")
    out = {"value": d.label, "detail": d.detail}
    if d.certificate is not None:
        out["certificate"] = d.certificate.to_text().split("\n", 1)[1].split()
    return out


# -- subcommands --------------------------------------------------------------------------


def cmd_classify(args) -> dict:
    action = make_action(args)
    if (args.op is None) == (args.construct is None):
        raise InputError("give exactly one of --op and --construct")
    f = read_op(args.op) if args.op else construct(action, args.construct, args)
    if f.n != action.n:
        raise InputError("operation and action have different domain sizes")
    budget = _budget(args)
    unary = optable.in_group_part(f, action)
    if unary is not None:
        return {"type": "in-group", "almost_minimal": False}
    out = {"action": action.name, "order": action.order, "orbits": action.s,
           "arity": f.k, "type": optable.rosenberg_type(f, action)}
    am = clone.is_almost_minimal(action, f, budget)
    out["almost_minimal_decision"] = _decision(am)
    out["almost_minimal"] = am.value
    if args.strict and am.value:
        out["strictly_almost_minimal"] = _decision(clone.is_strictly_almost_minimal(action, f, budget))
    if args.arity_cap and am.value:
        out["minimal_bounded"] = _decision(clone.is_minimal_bounded(action, f, args.arity_cap, budget))
    return out


def cmd_construct(args) -> dict:
    action = make_action(args)
    f = construct(action, args.family, args)
    text = f.to_text()
    if args.out:
        Path(args.out).write_text(text)
    return {"family": args.family, "n": f.n, "k": f.k, "table": text if not args.out else args.out,
            "type": optable.rosenberg_type(f, action)}


def cmd_enumerate(args) -> dict:
    action = make_action(args)
    qs = quasigroups.enumerate_ginv_boolean(action)
    out = {"action": action.name, "orbits": action.s, "count": len(qs)}
    if args.count_check:
        s = action.s
        if s & (s - 1) == 0:
            out["formula_count"] = designs.ginv_boolean_count(s.bit_length() - 1, action.order)
        else:
            out["formula_count"] = 0
        out["match"] = out["formula_count"] == len(qs)
    if args.brute_force:
        bf = quasigroups.brute_force_ginv_boolean(action)
        out["brute_force_count"] = len(bf)
        out["brute_force_match"] = bf == qs
    if args.tables:
        out["tables"] = [q.values.tolist() for q in qs]
    return out


def cmd_count_check(args) -> dict:
    rows = []
    for s in args.orbits:
        action = group.free_boolean_action(s, args.rank)
        qs = quasigroups.enumerate_ginv_boolean(action)
        formula = designs.ginv_boolean_count(s.bit_length() - 1, action.order) if s & (s - 1) == 0 else 0
        rows.append({"s": s, "count": len(qs), "formula_count": formula, "match": formula == len(qs)})
    return {"rank": args.rank, "rows": rows, "all_match": all(r["match"] for r in rows)}


def cmd_palfy(args) -> dict:
    action = make_action(args)
    ident = constructions.verify_palfy_identities(action, args.k, args.b, args.m)
    closure = constructions.verify_palfy_closure(action, args.k, args.b, _budget(args))
    if not closure["saturated"]:
        raise BudgetExhausted("max_tables or max_evaluations")
    closure.pop("members")
    return {"action": action.name, "identities": ident, "closure": closure}


def cmd_oep(args) -> dict:
    bounds = read_bounds(args.bounds)
    v = oep.has_oep(bounds)
    out = v.as_dict()
    out["bounds"] = sorted(str(t) for t in bounds)
    if args.bounds not in oep.PRESETS:
        out["note"] = "conditional on amalgamation of the bound set"
    return out


def cmd_datalog(args) -> dict:
    # omitted codomain sizes default to max(16, the smallest valid size)
    P = max(16, args.p * args.p + 2 * args.p) if args.P is None else args.P
    Q = max(16, args.q * args.q) if args.Q is None else args.Q
    w = canonical.Window(args.p, args.q, P, Q)
    rep = canonical.demo(w, args.count, args.seed)
    rep["core_relations"] = (canonical.check_core_relations(w)
                              if w.size ** w.size <= canonical.MAP_SCAN_CAP else "skipped")
    return rep


def cmd_selftest(args) -> dict:
    checks = {}
    z2 = group.free_boolean_action(2, 1)
    m = constructions.odd_majority(z2)
    checks["odd_majority"] = bool(optable.is_odd_majority(m, z2))
    checks["exmin_almost_minimal"] = bool(clone.is_almost_minimal(z2, constructions.exmin_minority(z2)))
    checks["count_s4"] = len(quasigroups.enumerate_ginv_boolean(group.free_boolean_action(4, 1))) == 2
    checks["wd"] = [designs.wd(i) for i in range(4)] == [0, 1, 4, 11]
    checks["oep_s3tilde"] = not oep.has_oep(oep.PRESETS["s3tilde"]).holds
    checks["datalog"] = canonical.demo(count=3)["same_orbital_table"] == 3
    return {"backend": BACKEND, "checks": checks, "ok": all(checks.values())}


COMMANDS = {
    "classify": cmd_classify,
    "construct": cmd_construct,
    "enumerate-steiner": cmd_enumerate,
    "count-check": cmd_count_check,
    "palfy-verify": cmd_palfy,
    "oep-check": cmd_oep,
    "datalog-demo": cmd_datalog,
    "selftest": cmd_selftest,
}


# -- output ------------------------------------------------------------------------------


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, (optable.OpTable, oep.EdgeLabel, oep.TriangleSpec)):
        return str(x) if not isinstance(x, optable.OpTable) else x.values.tolist()
    return x


def _flatten(d, prefix=""):
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            yield from _flatten(v, key + ".")
        else:
            yield key, json.dumps(v) if isinstance(v, (list, tuple)) else v


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2, sort_keys=True) + "\n"
    rows = list(_flatten(report))
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["key", "value"])
        w.writerows(rows)
        return buf.getvalue()
    lines = ["| key | value |", "|---|---|"]
    lines += [f"| {k} | {str(v).replace('|', '/')} |" for k, v in rows]
    return "\n".join(lines) + "\n"


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "markdown"), default="json")
    common.add_argument("--output", help="write the report here instead of stdout")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--no-timing", action="store_true",
                        help="omit wall time so identical manifests give identical reports")
    common.add_argument("--budget-tables", type=int, default=clone.DEFAULT_MAX_TABLES)
    common.add_argument("--budget-evals", type=int, default=clone.DEFAULT_MAX_EVALUATIONS)

    act = argparse.ArgumentParser(add_help=False)
    act.add_argument("--action", help="action file: n, then one generator per line")
    act.add_argument("--free-boolean", type=int, nargs=2, metavar=("S", "M"))
    act.add_argument("--cyclic", type=int, nargs=2, metavar=("ORDER", "S"))
    act.add_argument("--trivial", type=int, metavar="N")

    fam = argparse.ArgumentParser(add_help=False)
    fam.add_argument("--k", type=int, default=2)
    fam.add_argument("--b", type=int)
    fam.add_argument("--alpha", type=int, default=0)
    fam.add_argument("--beta", type=int, default=0)

    p = argparse.ArgumentParser(prog="minclones", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("classify", parents=[common, act, fam])
    c.add_argument("--op")
    c.add_argument("--construct", choices=FAMILIES)
    c.add_argument("--strict", action="store_true")
    c.add_argument("--arity-cap", type=int)

    c = sub.add_parser("construct", parents=[common, act, fam])
    c.add_argument("--family", choices=FAMILIES, required=True)
    c.add_argument("--out")

    c = sub.add_parser("enumerate-steiner", parents=[common, act])
    c.add_argument("--count-check", action="store_true")
    c.add_argument("--brute-force", action="store_true")
    c.add_argument("--tables", action="store_true")

    c = sub.add_parser("count-check", parents=[common])
    c.add_argument("--orbits", type=int, nargs="+", default=[1, 2, 4, 8])
    c.add_argument("--rank", type=int, default=1)

    c = sub.add_parser("palfy-verify", parents=[common, act, fam])
    c.add_argument("--m", type=int)

    c = sub.add_parser("oep-check", parents=[common])
    c.add_argument("--bounds", required=True, help="bound file or preset: " + ", ".join(oep.PRESETS))

    c = sub.add_parser("datalog-demo", parents=[common])
    c.add_argument("--p", type=int, default=3)
    c.add_argument("--q", type=int, default=3)
    c.add_argument("--P", type=int)
    c.add_argument("--Q", type=int)
    c.add_argument("--count", type=int, default=20)

    sub.add_parser("selftest", parents=[common])
    return p


def run(argv=None) -> tuple[int, str, str | None]:
    parser = build_parser()
    args = parser.parse_args(argv)
    manifest = {k: v for k, v in sorted(vars(args).items()) if k not in ("output", "format")}
    report = {"tool": "minclones", "version": __version__, "manifest": manifest}
    t0 = time.perf_counter()
    try:
        report["result"] = _jsonable(COMMANDS[args.command](args))
        status = 0
    except (InputError, optable.PreconditionError, optable.ArityError, group.GroupError,
            designs.DesignError, canonical.WindowError) as exc:
        report["error"] = {"kind": "input", "message": str(exc)}
        status = 2
    except BudgetExhausted as exc:
        report["error"] = {"kind": "budget", "budget": str(exc)}
        status = 3
    if not args.no_timing:
        report["wall_time_s"] = round(time.perf_counter() - t0, 4)
    text = render(report, args.format)
    if args.output:
        Path(args.output).write_text(text)
    return status, text, args.output


def main(argv=None) -> int:
    status, text, output = run(argv)
    if not output:
        sys.stdout.write(text)
    if status:
        sys.stderr.write(f"minclones: {'input error' if status == 2 else 'budget exhausted'}\n")
    return status


if __name__ == "__main__":
    sys.exit(main())
