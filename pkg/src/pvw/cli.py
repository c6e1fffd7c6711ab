"""Command-line interface: pvw eval|check|transform|audit|beckmann."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .beckmann import chain_proof, growth_row, instance
from .calculus import audit_report, conclusions, validate
from .evaluator import FULL, EvaluationError, approx_eval, exact_eval, numeral_comp
from .formats import (
    Defs, emit_comp, emit_proof, emit_term, parse_comp, parse_defs, parse_env, parse_proof,
    parse_term,
)
from .proofs import check as check_proof
from .proofs import conclusion as proof_conclusion
from .proofs import proof_size
from .sexpr import ParseError
from .terms import EMPTY, EPS
from .transform import Budget, BudgetError, TransformError, transform_along_proof

EXIT_OK, EXIT_INVALID, EXIT_EVAL, EXIT_PARSE, EXIT_BUDGET = 0, 1, 2, 3, 4


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


def _read_file(path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}", EXIT_PARSE) from None


def _parsed(what, fn, *args):
    try:
        return fn(*args)
    except ParseError as exc:
        raise CliError(f"{what}: {exc}", EXIT_PARSE) from None


def load_defs(args) -> Defs:
    if not args.defs:
        return Defs()
    return _parsed(args.defs, parse_defs, _read_file(args.defs))


def _env(args, defs):
    if not args.env:
        return EMPTY
    return _parsed("--env", parse_env, args.env, defs)


def _report(args, payload: dict, to_stdout=False):
    text = json.dumps(payload, indent=2, default=str)
    if args.json:
        Path(args.json).write_text(text + "\n", encoding="utf-8")
    if to_stdout or not args.json:
        print(text, file=sys.stdout if to_stdout else sys.stderr)


def _write_output(args, text: str):
    if getattr(args, "out", None):
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)


def _mode(text: str):
    if text == "exact":
        return None
    if text.startswith("demand:"):
        d = text.split(":", 1)[1]
        if d in ("full", "inf"):
            return FULL
        try:
            n = int(d)
        except ValueError:
            n = -1
        if n >= 0:
            return n
    raise CliError(f"bad --mode {text!r}; use exact or demand:N", EXIT_PARSE)


# ---------------------------------------------------------------------------
# Commands


def cmd_eval(args) -> int:
    defs = load_defs(args)
    if not args.term:
        raise CliError("eval needs --term", EXIT_PARSE)
    t = _parsed("--term", parse_term, args.term, defs)
    rho = _env(args, defs)
    d = _mode(args.mode)
    try:
        dag = exact_eval(t, rho) if d is None else approx_eval(t, rho, d)
    except (EvaluationError, RecursionError) as exc:
        raise CliError(f"evaluation failed: {exc}", EXIT_EVAL) from None
    _write_output(args, emit_comp(dag, defs))
    report = audit_report(dag, args.const_C)
    report["value"] = emit_term(conclusions(dag)[-1].value)
    _report(args, report)
    return EXIT_OK


def _load_comp(args, defs):
    if not args.comp:
        raise CliError("missing --comp", EXIT_PARSE)
    return _parsed(args.comp, parse_comp, _read_file(args.comp), defs)


def _load_proof(args, defs):
    if not args.proof:
        raise CliError("missing --proof", EXIT_PARSE)
    return _parsed(args.proof, parse_proof, _read_file(args.proof), defs)


def cmd_check(args) -> int:
    defs = load_defs(args)
    if args.proof and not args.comp:
        p = _load_proof(args, defs)
        bad = check_proof(p)
        if bad is not None:
            _report(args, {"ok": False, "violation": {"location": bad.location(), "message": bad.message}},
                    to_stdout=True)
            return EXIT_INVALID
        eq = proof_conclusion(p)
        _report(args, {"ok": True, "conclusion": {"lhs": emit_term(eq.lhs, defs), "rhs": emit_term(eq.rhs, defs)},
                       "size": proof_size(p)}, to_stdout=True)
        return EXIT_OK
    dag = _load_comp(args, defs)
    bad = validate(dag)
    report = {"ok": bad is None, "node_count": len(dag),
              "conclusions": [emit_term(st.main, defs) for st in conclusions(dag)] if dag.nodes else []}
    if bad is not None:
        report["violation"] = {"node": bad.index, "condition": bad.condition, "detail": bad.detail}
    else:
        report["audits"] = audit_report(dag, args.const_C)["audits"]
    _report(args, report, to_stdout=True)
    return EXIT_OK if bad is None else EXIT_INVALID


def cmd_audit(args) -> int:
    defs = load_defs(args)
    dag = _load_comp(args, defs)
    bad = validate(dag)
    if bad is not None:
        _report(args, {"ok": False, "violation": {"node": bad.index, "condition": bad.condition,
                                                  "detail": bad.detail}}, to_stdout=True)
        return EXIT_INVALID
    report = audit_report(dag, args.const_C)
    _report(args, report, to_stdout=True)
    ok = all(report["audits"].values()) and report["M_bound_holds"]
    return EXIT_OK if ok else EXIT_INVALID


def _pick_target(dag, eq, direction, index, defs=None):
    concl = conclusions(dag)
    if index is not None:
        idx = dag.conclusion_indices()
        if not 0 <= index < len(idx):
            raise CliError(f"--target {index} out of range ({len(idx)} conclusions)", EXIT_INVALID)
        return concl[index]
    side = eq.lhs if direction == "fwd" else eq.rhs
    for st in concl:
        if st.main == side:
            return st
    raise CliError(f"no conclusion has main term {emit_term(side, defs)}", EXIT_INVALID)


def cmd_transform(args) -> int:
    defs = load_defs(args)
    dag = _load_comp(args, defs)
    p = _load_proof(args, defs)
    bad = validate(dag)
    if bad is not None:
        raise CliError(f"computation is invalid: {bad}", EXIT_INVALID)
    pbad = check_proof(p)
    if pbad is not None:
        raise CliError(f"proof is invalid at {pbad}", EXIT_INVALID)
    target = _pick_target(dag, proof_conclusion(p), args.direction, args.target, defs)
    budget = None
    if any(x is not None for x in (args.budget_U, args.budget_B, args.budget_V)):
        budget = Budget(args.budget_U, args.budget_B, args.budget_V, args.const_C)
    try:
        res = transform_along_proof(dag, target, p, args.direction, budget, args.strict)
    except BudgetError as exc:
        raise CliError(f"budget violation: {exc}", EXIT_BUDGET) from None
    except TransformError as exc:
        raise CliError(f"transformation failed: {exc}", EXIT_INVALID) from None
    _write_output(args, emit_comp(res.dag, defs))
    ledger = res.ledger.to_json()
    ledger["conclusion"] = {"main": emit_term(res.conclusion.main, defs),
                            "value": emit_term(res.conclusion.value, defs)}
    _report(args, ledger)
    return EXIT_OK if res.ledger.overall else EXIT_INVALID


def cmd_beckmann(args) -> int:
    lengths = [int(x) for x in args.lengths.split(",") if x]
    rows = []
    out_dir = Path(args.out_dir) if args.out_dir else None
    if out_dir:
        out_dir.mkdir(parents=True, exist_ok=True)
    for k in args.k:
        for n in lengths:
            row = growth_row(k, n)
            rows.append(row.to_json())
            if out_dir:
                write_beckmann_fixtures(out_dir, k, n)
    _report(args, {"rows": rows}, to_stdout=True)
    return EXIT_OK


def write_beckmann_fixtures(out_dir: Path, k: int, n: int):
    inst = instance(k, n)
    stem = f"beckmann_k{k}_l{n}"
    defs = Defs()
    (out_dir / f"{stem}_approx.comp").write_text(emit_comp(approx_eval(inst.term), defs) + "\n")
    (out_dir / f"{stem}_exact.comp").write_text(emit_comp(exact_eval(inst.term), defs) + "\n")
    (out_dir / f"{stem}_chain.proof").write_text(emit_proof(chain_proof(inst), defs) + "\n")
    (out_dir / f"{stem}_eps.comp").write_text(emit_comp(numeral_comp(EPS), defs) + "\n")


# ---------------------------------------------------------------------------
# Argument parsing


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--defs", help="definitions file (defs (def NAME DEF)...)")
    common.add_argument("--json", help="write the JSON report to this path")
    common.add_argument("--const-C", dest="const_C", type=float, default=8,
                        help="constant for the main-term size audit (default 8)")

    parser = argparse.ArgumentParser(prog="pvw", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", parents=[common], help="evaluate a term to a computation")
    p.add_argument("--term", help="term text, e.g. '(app (named zeroize1) (s1 eps))'")
    p.add_argument("--env", help="environment text (env (bind NAME TERM)...)")
    p.add_argument("--mode", default="exact", help="exact or demand:N")
    p.add_argument("--out", help="write the computation here instead of stdout")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("check", parents=[common], help="check a computation or a proof")
    p.add_argument("--comp")
    p.add_argument("--proof")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("audit", parents=[common], help="structural and size audits of a computation")
    p.add_argument("--comp")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("transform", parents=[common], help="carry a computation across a proof")
    p.add_argument("--comp")
    p.add_argument("--proof")
    p.add_argument("--direction", choices=("fwd", "bwd"), default="fwd")
    p.add_argument("--target", type=int, help="index of the conclusion to transform")
    p.add_argument("--budget-U", dest="budget_U", type=int)
    p.add_argument("--budget-B", dest="budget_B", type=int)
    p.add_argument("--budget-V", dest="budget_V", type=int)
    p.add_argument("--strict", action="store_true", help="fail with exit 4 on budget violations")
    p.add_argument("--out", help="write the computation here instead of stdout")
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("beckmann", parents=[common], help="growth table for the Beckmann example")
    p.add_argument("--k", type=int, nargs="+", default=[1, 2, 3])
    p.add_argument("--lengths", default="1,2,3,4,5,6,7,8", help="comma-separated numeral lengths")
    p.add_argument("--out-dir", dest="out_dir", help="also write fixtures to this directory")
    p.set_defaults(func=cmd_beckmann)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"pvw: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())

