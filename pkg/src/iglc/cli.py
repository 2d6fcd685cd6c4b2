"""Command-line surface: proving, transforming, model checking, frame reports,
tail-extension truth sets, and corpus runs.

Exit codes: 0 valid/in-logic, 1 invalid, 2 usage or formula parse error,
3 budget exceeded, 4 model-file violation.
"""

from __future__ import annotations

import argparse
import json
import sys

from .formula import Formula, ParseError, parse, render
from .ipc import IpcValid, decide_ipc
from .iglc_prover import DEFAULT_BUDGET, Invalid, Valid, decide_iglc
from .ha import (in_ha_fast_sigma1_logic, in_ha_sigma1_logic,
                 in_selfcompletion_fast_logic)
from .kripke import (Frame, KripkeModel, ModelError, check_frame, forces,
                     model_from_json, model_to_dot, model_to_json)
from .nnil import ClassBudgetExceeded, nnil_star
from .solovay import extend_model, truth_set
from .tnnil import tnnil_plus

EXIT_VALID = 0
EXIT_INVALID = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3
EXIT_MODEL = 4

LOGICS = ("ipc", "iglc", "ha-sigma1", "ha-fast-sigma1", "ustar-fast")


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="iglc",
                                  description="decision procedures for "
                                              "intuitionistic provability logic")
    sub = top.add_subparsers(dest="command", required=True)

    prove = sub.add_parser("prove", help="decide a formula in a logic")
    prove.add_argument("--logic", choices=LOGICS, required=True)
    prove.add_argument("formula")
    prove.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    prove.add_argument("--countermodel", metavar="PATH",
                       help="write the countermodel here when invalid")
    prove.add_argument("--format", choices=("json", "dot"), default="json",
                       help="countermodel file format")
    prove.add_argument("--json", action="store_true", dest="as_json",
                       help="machine-readable verdict on stdout")

    transform = sub.add_parser("transform", help="apply a normal-form transform")
    transform.add_argument("--op", choices=("nnil", "tnnil"), required=True)
    transform.add_argument("formula")
    transform.add_argument("--json", action="store_true", dest="as_json")

    model = sub.add_parser("model", help="operations on model files")
    model_sub = model.add_subparsers(dest="subcommand", required=True)
    mcheck = model_sub.add_parser("check", help="evaluate a formula on a model")
    mcheck.add_argument("path")
    mcheck.add_argument("formula")
    mcheck.add_argument("--json", action="store_true", dest="as_json")

    frame = sub.add_parser("frame", help="operations on frames")
    frame_sub = frame.add_subparsers(dest="subcommand", required=True)
    freport = frame_sub.add_parser("report", help="report the frame properties")
    freport.add_argument("path")
    freport.add_argument("--json", action="store_true", dest="as_json")

    solovay = sub.add_parser("solovay", help="tail-extension semantics")
    solovay_sub = solovay.add_subparsers(dest="subcommand", required=True)
    struth = solovay_sub.add_parser("truthset",
                                    help="truth set of a formula in the extended model")
    struth.add_argument("path")
    struth.add_argument("formula")
    struth.add_argument("--json", action="store_true", dest="as_json")

    corpus = sub.add_parser("corpus", help="batch verdict runs")
    corpus_sub = corpus.add_subparsers(dest="subcommand", required=True)
    crun = corpus_sub.add_parser("run", help="run a corpus TSV file")
    crun.add_argument("path")
    crun.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    crun.add_argument("--json", action="store_true", dest="as_json")
    return top


def _decide_in_logic(logic: str, f: Formula, budget: int):
    """Return (verdict_word, countermodel, root, witness)."""
    if logic == "ipc":
        v = decide_ipc((), f)
        if isinstance(v, IpcValid):
            return "valid", None, None, ()
        return "invalid", v.countermodel, v.world, ()
    decider = {"iglc": decide_iglc,
               "ha-sigma1": in_ha_sigma1_logic,
               "ha-fast-sigma1": in_ha_fast_sigma1_logic,
               "ustar-fast": in_selfcompletion_fast_logic}[logic]
    v = decider(f, budget)
    if isinstance(v, Valid):
        return "valid", None, None, v.witness
    if isinstance(v, Invalid):
        return "invalid", v.countermodel, v.root, ()
    return "budget-exceeded", None, None, ()


def _write_countermodel(path: str, fmt: str, model: KripkeModel) -> None:
    text = model_to_json(model) if fmt == "json" else model_to_dot(model)
    with open(path, "w") as fh:
        fh.write(text + "\n")


def _cmd_prove(args) -> int:
    f = parse(args.formula)
    word, model, root, witness = _decide_in_logic(args.logic, f, args.budget)
    if model is not None and args.countermodel:
        _write_countermodel(args.countermodel, args.format, model)
    if args.as_json:
        payload = {"formula": render(f), "logic": args.logic, "verdict": word,
                   "countermodel": None if model is None
                   else json.loads(model_to_json(model)),
                   "root": root, "witness": list(witness)}
        print(json.dumps(payload, sort_keys=True))
    else:
        print({"valid": "VALID", "invalid": "INVALID",
               "budget-exceeded": "BUDGET EXCEEDED"}[word])
        if model is not None:
            print(f"refuted at world {root} of {model_to_json(model)}")
    return {"valid": EXIT_VALID, "invalid": EXIT_INVALID,
            "budget-exceeded": EXIT_BUDGET}[word]


def _cmd_transform(args) -> int:
    f = parse(args.formula)
    out = nnil_star(f) if args.op == "nnil" else tnnil_plus(f)
    if args.as_json:
        print(json.dumps({"input": render(f), "op": args.op,
                          "output": render(out)}, sort_keys=True))
    else:
        print(render(out))
    return EXIT_VALID


def _load_model(path: str) -> KripkeModel:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as e:
        raise ModelError(f"cannot read {path}: {e}") from None
    return model_from_json(text)


def _cmd_model_check(args) -> int:
    model = _load_model(args.path)
    f = parse(args.formula)
    refuting = sorted(w for w in model.frame.worlds if not forces(model, w, f))
    if args.as_json:
        print(json.dumps({"formula": render(f), "valid": not refuting,
                          "refuting_worlds": refuting}, sort_keys=True))
    elif not refuting:
        print("VALID ON MODEL")
    else:
        print("REFUTED at worlds " + " ".join(map(str, refuting)))
    return EXIT_VALID if not refuting else EXIT_INVALID


def _load_frame_raw(path: str) -> Frame:
    try:
        with open(path) as fh:
            data = json.load(fh)
        worlds = [int(w) for w in data["worlds"]]
        leq = {(int(a), int(b)) for a, b in data.get("leq", [])}
        r = {(int(a), int(b)) for a, b in data.get("r", [])}
    except (OSError, ValueError, KeyError, TypeError) as e:
        raise ModelError(f"bad frame file {path}: {e}") from None
    leq |= {(w, w) for w in worlds}
    return Frame.make(worlds, leq, r)


def _cmd_frame_report(args) -> int:
    report = check_frame(_load_frame_raw(args.path))
    if args.as_json:
        print(json.dumps(report.as_dict(), sort_keys=True))
    else:
        for key, value in report.as_dict().items():
            print(f"{key}: {'yes' if value else 'no'}")
    return EXIT_VALID


def _cmd_solovay_truthset(args) -> int:
    model = _load_model(args.path)
    f = parse(args.formula)
    try:
        extended = extend_model(model)
    except ValueError as e:
        raise ModelError(str(e)) from None
    ts = truth_set(extended, f)
    if args.as_json:
        print(json.dumps({"formula": render(f), "all": ts.all_worlds,
                          "worlds": sorted(ts.worlds)}, sort_keys=True))
    elif ts.all_worlds:
        print("ALL")
    else:
        print(" ".join(map(str, sorted(ts.worlds))) or "(empty)")
    return EXIT_VALID


def _cmd_corpus_run(args) -> int:
    try:
        with open(args.path) as fh:
            lines = fh.readlines()
    except OSError as e:
        print(f"error: cannot read {args.path}: {e}", file=sys.stderr)
        return EXIT_USAGE
    results = []
    mismatches = budget_hits = 0
    for lineno, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        parts = stripped.split("\t")
        if len(parts) != 3:
            print(f"error: line {lineno}: expected 3 tab-separated fields",
                  file=sys.stderr)
            return EXIT_USAGE
        expected, logic, text = (p.strip() for p in parts)
        if expected not in ("valid", "invalid") or logic not in LOGICS:
            print(f"error: line {lineno}: bad verdict or logic", file=sys.stderr)
            return EXIT_USAGE
        f = parse(text)
        word, _, _, _ = _decide_in_logic(logic, f, args.budget)
        if word == "budget-exceeded":
            outcome = "budget-exceeded"
            budget_hits += 1
        elif word == expected:
            outcome = "ok"
        else:
            outcome = "MISMATCH"
            mismatches += 1
        results.append({"line": lineno, "logic": logic, "formula": text,
                        "expected": expected, "actual": word, "outcome": outcome})
    if args.as_json:
        print(json.dumps({"results": results, "mismatches": mismatches,
                          "budget_exceeded": budget_hits}, sort_keys=True))
    else:
        for row in results:
            print(f"{row['outcome']:>16}  line {row['line']:>3}  {row['logic']:>14}  "
                  f"{row['formula']}  (expected {row['expected']}, got {row['actual']})")
        print(f"{len(results)} entries, {len(results) - mismatches - budget_hits} ok, "
              f"{mismatches} mismatched, {budget_hits} budget-exceeded")
    if budget_hits:
        return EXIT_BUDGET
    return EXIT_INVALID if mismatches else EXIT_VALID


def run(argv: list[str]) -> int:
    """Execute one CLI invocation; returns the exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else 0
    try:
        if args.command == "prove":
            return _cmd_prove(args)
        if args.command == "transform":
            return _cmd_transform(args)
        if args.command == "model":
            return _cmd_model_check(args)
        if args.command == "frame":
            return _cmd_frame_report(args)
        if args.command == "solovay":
            return _cmd_solovay_truthset(args)
        return _cmd_corpus_run(args)
    except ParseError as e:
        print(f"error: formula: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ModelError as e:
        print(f"error: model: {e}", file=sys.stderr)
        return EXIT_MODEL
    except (ClassBudgetExceeded, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
