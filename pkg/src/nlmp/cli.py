"""Command-line front end.

Exit codes: 0 success, 1 usage or parse error, 2 invalid model,
3 internal invariant violation, 4 formula unsatisfied, 5 states
equivalent, 6 unsupported configuration.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from importlib import resources
from pathlib import Path

from .bisim import (
    BisimReport,
    compare_bisims,
    largest_state,
    largest_traditional,
    smallest_stable_sigma,
)
from .errors import DomainError, InternalCheckError, ModelSyntaxError, UnsupportedModelError
from .logic import distinguish, eval_state, formula_labels, formula_to_text
from .measures import Measure
from .model import Finding, ValidationReport, lmp_validate, nlmp_validate
from .parser import ModelDocument, _measure_text, parse_model, parse_state_formula

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INVALID_MODEL = 2
EXIT_INTERNAL = 3
EXIT_UNSATISFIED = 4
EXIT_EQUIVALENT = 5
EXIT_UNSUPPORTED = 6


def corpus_dir() -> Path:
    """Directory of the bundled example models."""
    return Path(str(resources.files("nlmp") / "corpus"))


def _sorted_sets(doc: ModelDocument, sets) -> list[list[str]]:
    universe = doc.nlmp.universe
    return sorted(
        (universe.sort(block) for block in sets),
        key=lambda b: [universe.index(s) for s in b],
    )


def _measure_json(mu: Measure) -> str:
    return _measure_text(mu)


def _finding_json(f: Finding) -> dict:
    out: dict = {"severity": f.severity, "message": f.message}
    if f.label is not None:
        out["label"] = f.label
    if f.state is not None:
        out["state"] = f.state
    if f.xi is not None:
        out["xi"] = [_measure_json(mu) for mu in f.xi]
    if f.witness_set is not None:
        out["witness_set"] = sorted(f.witness_set)
    return out


def _bisim_json(doc: ModelDocument, rep: BisimReport) -> dict:
    out = {
        "kind": rep.kind,
        "partition": _sorted_sets(doc, rep.partition),
        "iterations": len(rep.trace),
    }
    if rep.sigma is not None:
        out["sigma_atoms"] = _sorted_sets(doc, rep.sigma.atoms)
    return out


def _report(doc: ModelDocument, command: str, args: dict, result: dict, started: float) -> dict:
    return {
        "command": command,
        "args": args,
        "model": {
            "digest": doc.digest,
            "kind": doc.kind,
            "states": list(doc.nlmp.states),
            "labels": list(doc.nlmp.labels),
            "sigma_atoms": _sorted_sets(doc, doc.nlmp.sigma.atoms),
        },
        "result": result,
        "timing_ms": round((time.perf_counter() - started) * 1000, 3),
    }


def _emit(report: dict) -> None:
    print(json.dumps(report, indent=2, sort_keys=True))


def _load(path: str) -> ModelDocument:
    text = Path(path).read_text(encoding="utf-8")
    return parse_model(text, source=path)


def _validate(doc: ModelDocument) -> ValidationReport:
    if doc.kind == "lmp":
        return lmp_validate(doc.lmp)
    return nlmp_validate(doc.nlmp)


def cmd_validate(args) -> int:
    started = time.perf_counter()
    doc = _load(args.path)
    report = _validate(doc)
    result = {
        "valid": report.valid,
        "findings": [_finding_json(f) for f in report.findings],
    }
    _emit(_report(doc, "validate", {"path": args.path}, result, started))
    return EXIT_OK if report.valid else EXIT_INVALID_MODEL


def _require_valid_doc(doc: ModelDocument, command: str, args: dict, started: float) -> bool:
    report = _validate(doc)
    if report.valid:
        return True
    result = {
        "valid": False,
        "findings": [_finding_json(f) for f in report.findings],
    }
    _emit(_report(doc, command, args, result, started))
    return False


def cmd_bisim(args) -> int:
    started = time.perf_counter()
    doc = _load(args.path)
    cmd_args = {"path": args.path, "kind": args.kind}
    if not _require_valid_doc(doc, "bisim", cmd_args, started):
        return EXIT_INVALID_MODEL
    m = doc.nlmp
    if args.kind == "all":
        comparison = compare_bisims(m)
        result = {
            "traditional": _bisim_json(doc, comparison.traditional),
            "state": _bisim_json(doc, comparison.state),
            "event": _bisim_json(doc, comparison.event),
            "chain_holds": comparison.chain_holds,
            "traditional_eq_state": comparison.traditional_eq_state,
            "state_eq_event": comparison.state_eq_event,
            "all_equal": comparison.all_equal,
            "sigma_is_powerset": comparison.sigma_is_powerset,
        }
    else:
        rep = {
            "traditional": largest_traditional,
            "state": largest_state,
            "event": smallest_stable_sigma,
        }[args.kind](m)
        result = _bisim_json(doc, rep)
    _emit(_report(doc, "bisim", cmd_args, result, started))
    return EXIT_OK


def cmd_check(args) -> int:
    started = time.perf_counter()
    doc = _load(args.path)
    cmd_args = {"path": args.path, "formula": args.formula}
    if args.state is not None:
        cmd_args["state"] = args.state
    if not _require_valid_doc(doc, "check", cmd_args, started):
        return EXIT_INVALID_MODEL
    phi = parse_state_formula(args.formula)
    unknown = formula_labels(phi) - set(doc.nlmp.labels)
    if unknown:
        raise DomainError(f"formula uses undeclared labels: {sorted(unknown)}")
    if args.state is not None and args.state not in doc.nlmp.universe:
        raise DomainError(f"unknown state {args.state!r}")
    extension = eval_state(doc.nlmp, phi)
    result = {
        "formula": formula_to_text(phi),
        "states": doc.nlmp.universe.sort(extension),
    }
    code = EXIT_OK
    if args.state is not None:
        satisfied = args.state in extension
        result["state"] = args.state
        result["satisfied"] = satisfied
        code = EXIT_OK if satisfied else EXIT_UNSATISFIED
    _emit(_report(doc, "check", cmd_args, result, started))
    return code


def cmd_distinguish(args) -> int:
    started = time.perf_counter()
    doc = _load(args.path)
    cmd_args = {"path": args.path, "s": args.s, "t": args.t}
    if not _require_valid_doc(doc, "distinguish", cmd_args, started):
        return EXIT_INVALID_MODEL
    try:
        phi = distinguish(doc.nlmp, args.s, args.t)
    except UnsupportedModelError as exc:
        result = {"supported": False, "reason": str(exc)}
        _emit(_report(doc, "distinguish", cmd_args, result, started))
        return EXIT_UNSUPPORTED
    if phi is None:
        result = {"equivalent": True}
        _emit(_report(doc, "distinguish", cmd_args, result, started))
        return EXIT_EQUIVALENT
    # distinguish re-verifies the formula before returning it.
    result = {
        "equivalent": False,
        "formula": formula_to_text(phi),
        "satisfied_by": sorted(
            x for x in (args.s, args.t) if x in eval_state(doc.nlmp, phi)
        ),
    }
    _emit(_report(doc, "distinguish", cmd_args, result, started))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nlmp",
        description="Exact workbench for finite nondeterministic labeled Markov processes",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check model well-formedness and measurability")
    p.add_argument("path")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("bisim", help="compute bisimilarity partitions")
    p.add_argument("path")
    p.add_argument(
        "--kind",
        choices=["traditional", "state", "event", "all"],
        default="all",
    )
    p.set_defaults(func=cmd_bisim)

    p = sub.add_parser("check", help="evaluate a state formula")
    p.add_argument("path")
    p.add_argument("formula")
    p.add_argument("--state", default=None)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("distinguish", help="synthesize a formula separating two states")
    p.add_argument("path")
    p.add_argument("s")
    p.add_argument("t")
    p.set_defaults(func=cmd_distinguish)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (ModelSyntaxError, DomainError, FileNotFoundError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InternalCheckError as exc:
        print(f"internal invariant violation: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
