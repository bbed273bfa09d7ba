"""Command line entry point: ``pd-deposit <command> [options]``.

Exit status is 0 on success, 1 on a domain error (invalid matrix, no
decomposition, ...) and 2 on a usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional, Sequence

from .deposit import (
    DecompositionError,
    Policy,
    composite_deposit,
    decompose,
    decomposition_report,
    parse_composition,
    refund_schedule,
)
from .escrow import BestResponse, Compliant, DefectAt, IllegalMoveError, RandomSeeded, run_match
from .explorer import (
    DEFAULT_MAX_AC,
    DEFAULT_THRESHOLDS,
    Threshold,
    discrepancies,
    enumerate_census,
    rows_to_csv,
    summary_rows,
)
from .fragment import (
    DepositPair,
    DominanceMode,
    Fragment,
    UnsupportedFragmentError,
    classify,
    fragment_payoff_vs_nash,
    fragment_deposit,
)
from .game import (
    REFERENCE_MATRIX,
    Agreement,
    InvalidMatrixError,
    PayoffMatrix,
    _jsonable,
    agreement_payoff,
    check_matrix,
    is_effective,
    nash_baseline,
    render,
    validate_matrix,
)
from .verifier import one_shot_gains, verify


class UsageError(Exception):
    pass


def _load_matrix(source: Optional[str]) -> PayoffMatrix:
    if source is None:
        return REFERENCE_MATRIX
    text = source
    if not source.lstrip().startswith("{"):
        if not os.path.exists(source):
            raise UsageError(f"matrix file not found: {source}")
        with open(source, encoding="utf-8") as fh:
            text = fh.read()
    try:
        return PayoffMatrix.from_json(text)
    except (ValueError, TypeError) as exc:
        raise UsageError(f"bad matrix: {exc}") from None


def _agreement(args) -> Agreement:
    if getattr(args, "agreement", None):
        try:
            return Agreement.parse(args.agreement)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    if getattr(args, "composition", None):
        return decompose(_composition(args), args.m, args.policy).agreement
    raise UsageError("give --agreement or --composition")


def _composition(args) -> tuple[int, int, int]:
    try:
        return parse_composition(args.composition)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _deposits(text: str) -> DepositPair:
    try:
        return DepositPair.parse(text)
    except ValueError as exc:
        raise UsageError(f"bad --deposits: {exc}") from None


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=2) + "\n")


def cmd_matrix_validate(args) -> int:
    violations = validate_matrix(args.m)
    _emit({"valid": not violations, "violations": violations, "matrix": args.m.to_dict()})
    if violations:
        print("invalid matrix: " + ", ".join(violations), file=sys.stderr)
        return 1
    return 0


def cmd_eval(args) -> int:
    ag = _agreement(args)
    s = agreement_payoff(ag, args.m)
    tom_base, jack_base = nash_baseline(len(ag), args.m)
    _emit(
        {
            "agreement": str(ag),
            "summary": s.to_dict(),
            "rendered": {"tom": render(s.tom_expectation), "jack": render(s.jack_expectation)},
            "nash_baseline": [_jsonable(tom_base), _jsonable(jack_base)],
            "effective": is_effective(ag, args.m),
        }
    )
    return 0


def cmd_fragment(args) -> int:
    try:
        frag = Fragment.parse(args.fragment)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    dom = fragment_payoff_vs_nash(frag, args.m, args.dominance)
    try:
        dep = fragment_deposit(frag, args.m).to_dict()
    except UnsupportedFragmentError:
        dep = None
    _emit(
        {
            "fragment": str(frag),
            "kind": classify(frag.counts).value,
            "dominant": dom.dominant,
            "tom_delta": _jsonable(dom.tom_delta),
            "jack_delta": _jsonable(dom.jack_delta),
            "deposit": dep,
        }
    )
    return 0


def cmd_deposit(args) -> int:
    d = decompose(_composition(args), args.m, args.policy, args.dominance)
    _emit({"agreement": str(d.agreement), **decomposition_report(d, args.m)})
    return 0


def cmd_schedule(args) -> int:
    d = decompose(_composition(args), args.m, args.policy, args.dominance)
    _emit(refund_schedule(d, args.m).to_dict())
    return 0


def cmd_verify(args) -> int:
    ag = _agreement(args)
    if args.deposits:
        dep = _deposits(args.deposits)
    else:
        dep = composite_deposit(decompose(_composition(args), args.m, args.policy), args.m)
    report = verify(ag, dep, args.m)
    out = {"agreement": str(ag), "deposits": dep.to_dict(), **report.to_dict()}
    if args.gains:
        out["gains"] = [g.to_dict() for g in one_shot_gains(ag, args.m)]
    _emit(out)
    return 0


def cmd_enumerate(args) -> int:
    thresholds = DEFAULT_THRESHOLDS
    if args.threshold:
        try:
            thresholds = tuple(Threshold.parse(t) for t in args.threshold)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    census = enumerate_census(args.n, args.m, args.max_ac, thresholds, args.policy)
    extra = {"discrepancies": discrepancies(args.m, args.n, args.max_ac)} if args.report else {}
    if args.format == "json":
        _emit({**census.to_dict(), **extra})
        return 0
    summary = {
        "total": census.total_enumerated,
        "effective": census.effective,
        **{f"both {k}": v for k, v in census.threshold_counts.items()},
    }
    rows = summary_rows([r.composition for r in census.rows], args.m, args.policy)
    sys.stdout.write(rows_to_csv(rows, summary))
    for item in extra.get("discrepancies", ()):
        sys.stdout.write(
            f"# discrepancy: {item['item']}: reference {item['reference']} "
            f"computed {item['computed']} ({item['note']})\n"
        )
    return 0


def _strategy(text: str, seed: int, ag: Agreement, m: PayoffMatrix):
    name, _, arg = text.partition(":")
    try:
        if name == "compliant":
            return Compliant()
        if name == "defect":
            return DefectAt(int(arg))
        if name == "best":
            return BestResponse(ag, m)
        if name == "random":
            return RandomSeeded(seed, float(arg or 0.1))
    except ValueError:
        pass
    raise UsageError(f"bad strategy {text!r}; use compliant, defect:K, best, random:P")


def cmd_simulate(args) -> int:
    ag = _agreement(args)
    schedule = None
    if args.composition and not args.agreement:
        d = decompose(_composition(args), args.m, args.policy)
        dep = composite_deposit(d, args.m)
        if args.refunds:
            schedule = refund_schedule(d, args.m)
    elif args.refunds:
        raise UsageError("--refunds needs --composition")
    else:
        dep = DepositPair(0, 0)
    if args.deposits:
        dep = _deposits(args.deposits)
    strategies = (
        _strategy(args.tom, args.seed, ag, args.m),
        _strategy(args.jack, args.seed + 1, ag, args.m),
    )
    result = run_match(ag, dep, strategies, args.m, schedule)
    sys.stdout.write(result.to_jsonl())
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pd-deposit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, policy=False, dominance=False):
        p.add_argument("--matrix", help="JSON object with keys a..h, or a path to one")
        if policy:
            p.add_argument("--policy", type=Policy, default=Policy.BALANCED,
                           choices=list(Policy), metavar="{balanced,minimize-max,exhaustive}")
        if dominance:
            p.add_argument("--dominance", type=DominanceMode, default=DominanceMode.WEAK,
                           choices=list(DominanceMode), metavar="{weak,strict}")
        return p

    common(sub.add_parser("matrix-validate", help="check the Prisoner's Dilemma orderings"))

    p = common(sub.add_parser("eval", help="payoffs of an agreement"), policy=True)
    p.add_argument("--agreement")
    p.add_argument("--composition", help="n_bc,n_ad,n_ac")

    p = common(sub.add_parser("fragment", help="classify a fragment"), dominance=True)
    p.add_argument("fragment", help='e.g. "1*AD+2*BC"')

    for name, help_ in (("deposit", "composite deposit"), ("schedule", "refund schedule")):
        p = common(sub.add_parser(name, help=help_), policy=True, dominance=True)
        p.add_argument("--composition", required=True, help="n_bc,n_ad,n_ac")

    p = common(sub.add_parser("verify", help="check deposits against all deviations"), policy=True)
    p.add_argument("--agreement")
    p.add_argument("--composition", help="n_bc,n_ad,n_ac")
    p.add_argument("--deposits", help="tom,jack")
    p.add_argument("--gains", action="store_true", help="include per-stage deviation gains")

    p = common(sub.add_parser("enumerate", help="census over compositions"), policy=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--max-ac", type=int, default=DEFAULT_MAX_AC)
    p.add_argument("--threshold", action="append", help='e.g. ">=8" or ">17/2"; repeatable')
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--report", choices=("discrepancies",))

    p = common(sub.add_parser("simulate", help="run the escrow protocol"), policy=True)
    p.add_argument("--agreement")
    p.add_argument("--composition", help="n_bc,n_ad,n_ac")
    p.add_argument("--deposits", help="tom,jack")
    p.add_argument("--tom", default="compliant")
    p.add_argument("--jack", default="compliant")
    p.add_argument("--refunds", action="store_true", help="release tranches at fragment ends")
    p.add_argument("--seed", type=int, default=0)
    return parser


COMMANDS = {
    "matrix-validate": cmd_matrix_validate,
    "eval": cmd_eval,
    "fragment": cmd_fragment,
    "deposit": cmd_deposit,
    "schedule": cmd_schedule,
    "verify": cmd_verify,
    "enumerate": cmd_enumerate,
    "simulate": cmd_simulate,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.m = _load_matrix(args.matrix)
        if args.command != "matrix-validate":
            check_matrix(args.m)
        if getattr(args, "n", 1) is not None and getattr(args, "n", 1) < 1:
            raise UsageError("--n must be at least 1")
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"pd-deposit: error: {exc}", file=sys.stderr)
        return 2
    except (InvalidMatrixError, DecompositionError, UnsupportedFragmentError,
            IllegalMoveError, ValueError) as exc:
        print(f"pd-deposit: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
