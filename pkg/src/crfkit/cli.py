"""Batch front door: check, cohomology, eval and corpus subcommands.

Exit codes: 0 verdict pass, 1 verdict fail (report carries witnesses),
2 input or usage error.  Reports are byte-deterministic for identical
inputs: ordering is structural and printing is canonical.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import __version__, cohomology, library, structures
from .evaldsl import EvalError, evaluate_expression
from .instancefile import (InstanceFormatError, instance_digest, load_instance)
from .report import CheckReport, PreconditionError
from .scalar import ParseError

LEVELS = ("f", "cr", "crf", "quasi", "integrable", "contact", "normality",
          "contact_poisson", "submanifold")


class UsageError(ValueError):
    pass


def _run_level(inst, level: str) -> CheckReport:
    if level in ("f", "cr", "crf", "quasi", "integrable"):
        if inst.a is None:
            raise UsageError(f"level {level!r} needs the A block, absent from this file")
    if level == "f":
        return structures.check_f_structure(inst.a)
    if level == "cr":
        return structures.check_cr_type(inst.a)
    if level == "crf":
        return structures.check_classical_crf(inst.a)
    if level == "quasi":
        rep = structures.check_quasi_classical(inst.a, inst.bivector())
        if rep.passed:
            local = structures.check_local_form(inst.a, inst.bivector())
            seen = {c.cond_id for c in rep.conditions}
            rep.conditions.extend(
                c for c in local.conditions if c.cond_id not in seen)
        return rep
    if level == "integrable":
        return structures.check_integrability(inst.a, inst.bivector())
    if level in ("contact", "normality", "contact_poisson"):
        if not inst.contact:
            raise UsageError(f"level {level!r} needs contact data, absent from this file")
        if inst.a is None:
            raise UsageError(f"level {level!r} needs the A block, absent from this file")
    if level == "contact":
        return structures.check_almost_contact(inst)
    if level == "normality":
        return structures.check_normality(inst)
    if level == "contact_poisson":
        return structures.check_contact_poisson(inst)
    if level == "submanifold":
        if inst.pi is None:
            raise UsageError("level 'submanifold' needs the pi block")
        if inst.p_proj is None:
            raise UsageError("level 'submanifold' needs the P projector block")
        return structures.check_nonholonomic_poisson_submanifold(
            inst.bivector(), inst.p_proj)
    raise UsageError(f"unknown level {level!r}")


def _document(inst, command: str, payload: dict) -> dict:
    doc = {"tool": "crfkit", "version": __version__,
           "instance": inst.name, "digest": instance_digest(inst),
           "command": command}
    doc.update(payload)
    return doc


def _emit(doc: dict, as_json: bool, out=sys.stdout):
    if as_json:
        out.write(json.dumps(doc, sort_keys=True, indent=1))
        out.write("\n")
        return
    head = f"crfkit {doc['command']} - instance {doc['instance'] or '(unnamed)'} [{doc['digest']}]"
    out.write(head + "\n")
    for cond in doc.get("conditions", []):
        mark = "PASS" if cond["verdict"] == "pass" else "FAIL"
        info = " (informational)" if cond.get("informational") else ""
        out.write(f"[{mark}] {cond['id']}  {cond['description']}{info}\n")
        for w in cond["witnesses"]:
            out.write(f"       witness {w['where']}: {w['value']}\n")
    for title, table in doc.get("tables", {}).items():
        out.write(f"{title}:\n")
        for row in table:
            out.write("  " + "  ".join(str(x) for x in row) + "\n")
    if "result" in doc:
        out.write(doc["result"] + "\n")
    if "verdict" in doc:
        out.write(f"overall: {doc['verdict'].upper()}\n")


def _report_payload(rep: CheckReport) -> dict:
    return {"verdict": "pass" if rep.passed else "fail",
            "conditions": [c.to_dict() for c in rep.conditions]}


def cmd_check(args) -> int:
    inst = load_instance(args.file)
    if args.base_point:
        inst.base_point = _parse_base_point(args.base_point, inst.patch.dim)
    rep = _run_level(inst, args.level)
    doc = _document(inst, "check", _report_payload(rep))
    doc["level"] = args.level
    _emit(doc, args.json)
    return 0 if rep.passed else 1


def _parse_base_point(text: str, dim: int):
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != dim:
        raise UsageError(f"base point needs {dim} comma-separated rationals")
    try:
        return tuple(Fraction(p) for p in parts)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"bad base point {text!r}") from None


def _dims_table(table: dict, imax: int, jmax: int) -> list[list]:
    rows = [["i\\j"] + list(range(jmax + 1))]
    for i in range(imax + 1):
        rows.append([i] + [table.get((i, j), 0) for j in range(jmax + 1)])
    return rows


def cmd_cohomology(args) -> int:
    inst = load_instance(args.file)
    pi = inst.bivector()
    payload: dict = {"tables": {}}
    k_max = args.k_max if args.k_max is not None else inst.patch.dim
    betti = cohomology.poisson_cohomology(pi, args.bound, k_max)
    payload["tables"][f"truncated cohomology dimensions (degree bound {args.bound})"] = \
        [["k"] + list(range(len(betti))), ["dim"] + betti]
    payload["betti"] = betti
    if args.bigrading or args.spectral:
        if inst.a is None:
            raise UsageError("bigraded output needs the A block")
        tabs = cohomology.spectral_terms(pi, inst.a, args.bound)
        imax, jmax = tabs.p_rank, tabs.q_rank
        payload["tables"]["page-1 dimensions"] = _dims_table(tabs.e1, imax, jmax)
        if args.spectral:
            payload["tables"]["page-2 dimensions"] = _dims_table(tabs.e2, imax, jmax)
            payload["tables"]["page-3 dimensions"] = _dims_table(tabs.e3, imax, jmax)
            payload["sigma_prime_on_page2"] = {
                f"({i},{j})": m for (i, j), m in sorted(tabs.sigma_prime_on_e2.items())}
    if args.triple:
        if inst.frames is None:
            raise UsageError("triple grading needs an adapted frame in the file")
        payload["triple"] = "validated"
        rep = inst.frames.validate(inst.a, inst.point())
        payload["conditions"] = [c.to_dict() for c in rep.conditions]
        if not rep.passed:
            payload["verdict"] = "fail"
            doc = _document(inst, "cohomology", payload)
            _emit(doc, args.json)
            return 1
    payload.setdefault("verdict", "pass")
    doc = _document(inst, "cohomology", payload)
    _emit(doc, args.json)
    return 0


def cmd_eval(args) -> int:
    inst = load_instance(args.file)
    value = evaluate_expression(inst, args.expression)
    doc = _document(inst, "eval", {"expression": args.expression,
                                   "result": str(value)})
    _emit(doc, args.json)
    return 0


CORPUS_JOBS = (
    ("trivial", "integrable", "pass"),
    ("complex-r2", "integrable", "pass"),
    ("holomorphic-poisson-r4", "integrable", "pass"),
    ("locally-product-r5", "integrable", "pass"),
    ("perturbed-holomorphic-r6", "integrable", "fail"),
    ("cosymplectic-r5", "contact_poisson", "pass"),
    ("sasakian-r3", "normality", "pass"),
    ("nonnormal-contact-r3", "normality", "fail"),
    ("example41-r5", "submanifold", "pass"),
    ("nxnprime-r7", "contact_poisson", "pass"),
)


def cmd_corpus(args) -> int:
    jobs = []
    all_match = True
    for name, level, expected in CORPUS_JOBS:
        inst = library.load_builtin(name)
        rep = _run_level(inst, level)
        verdict = "pass" if rep.passed else "fail"
        match = verdict == expected
        all_match = all_match and match
        jobs.append({
            "instance": name,
            "digest": instance_digest(inst),
            "level": level,
            "verdict": verdict,
            "expected": expected,
            "as_expected": match,
            "failed_conditions": rep.failed_ids(),
        })
    doc = {"tool": "crfkit", "version": __version__, "command": "corpus",
           "jobs": jobs, "verdict": "pass" if all_match else "fail"}
    if args.json:
        sys.stdout.write(json.dumps(doc, sort_keys=True, indent=1))
        sys.stdout.write("\n")
    else:
        for job in jobs:
            mark = "ok " if job["as_expected"] else "BAD"
            sys.stdout.write(
                f"[{mark}] {job['instance']:28s} {job['level']:16s} "
                f"{job['verdict']} (expected {job['expected']})\n")
        sys.stdout.write(f"overall: {doc['verdict'].upper()}\n")
    return 0 if all_match else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="crfkit",
        description="exact checks and truncated cohomology for generalized "
                    "CRF-type structures on a coordinate patch")
    ap.add_argument("--version", action="version", version=f"crfkit {__version__}")
    sub = ap.add_subparsers(dest="cmd", required=True)

    c = sub.add_parser("check", help="run a checker level against an instance file")
    c.add_argument("file")
    c.add_argument("--level", required=True, choices=LEVELS)
    c.add_argument("--json", action="store_true")
    c.add_argument("--base-point", default=None,
                   help="comma-separated rationals overriding the file base point")
    c.set_defaults(func=cmd_check)

    h = sub.add_parser("cohomology", help="truncated cohomology and page tables")
    h.add_argument("file")
    h.add_argument("-D", "--bound", type=int, required=True,
                   help="polynomial coefficient degree bound")
    h.add_argument("--k-max", type=int, default=None)
    h.add_argument("--bigrading", action="store_true")
    h.add_argument("--spectral", action="store_true")
    h.add_argument("--triple", action="store_true")
    h.add_argument("--json", action="store_true")
    h.set_defaults(func=cmd_cohomology)

    e = sub.add_parser("eval", help="evaluate a bracket-DSL expression")
    e.add_argument("file")
    e.add_argument("expression")
    e.add_argument("--json", action="store_true")
    e.set_defaults(func=cmd_eval)

    r = sub.add_parser("corpus", help="run the built-in regression corpus")
    r.add_argument("--json", action="store_true")
    r.set_defaults(func=cmd_corpus)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, InstanceFormatError, ParseError, EvalError,
            cohomology.TruncationError, FileNotFoundError) as e:
        sys.stderr.write(f"error: {e}\n")
        return 2
    except PreconditionError as e:
        sys.stderr.write(f"error: precondition failure: {e}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
