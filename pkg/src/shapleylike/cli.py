"""Command-line interface.

Every command prints one JSON result document on stdout. Exit status is 0
when the command computed its result (or the verification passed), 1 when a
verification found violations, and 2 for bad input.
"""

from __future__ import annotations

import argparse
import sys
from typing import Any, Callable, Optional, Sequence

import numpy as np

from .allocations import (
    DEFAULT_TOL,
    SAMPLERS,
    apply_allocation,
    check_abs_sums,
    check_efficiency,
    check_level_abs_sums,
    check_reasonable_structural,
    check_row_sums_zero,
    sample_reasonableness_violation,
    shapley_matrix,
    shapley_value,
    special_allocation,
)
from .decomposition import DecompositionError, peel_decompose, random_allocation, verify_decomposition
from .documents import (
    DocumentError,
    allocation_to_doc,
    certificate_to_doc,
    dumps,
    game_to_doc,
    load_allocation,
    load_certificate,
    load_game,
    report_to_doc,
)
from .games import SetChain, is_monotone, is_superadditive, minimal_sets, span_decompose_monotone_binary

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_INPUT = 2


class InputError(Exception):
    pass


def _parse_perm(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(tok) for tok in text.split(","))
    except ValueError:
        raise InputError(f"--perm must be comma-separated players, got {text!r}") from None


def _result(args: argparse.Namespace, ok: bool, body: dict) -> dict:
    doc: dict[str, Any] = {"command": args.command, "args": _echo(args), "ok": ok}
    doc.update(body)
    doc["tol"] = args.tol
    doc["seed"] = getattr(args, "seed", None)
    return doc


def _echo(args: argparse.Namespace) -> dict:
    skip = {"command", "func", "tol", "seed"}
    return {k: v for k, v in vars(args).items() if k not in skip}


def cmd_shapley(args) -> tuple[int, dict]:
    v = load_game(args.game)
    if args.matrix:
        body = {"allocation": allocation_to_doc(shapley_matrix(v.n))}
    else:
        body = {"payoffs": shapley_value(v).tolist()}
    return EXIT_OK, _result(args, True, body)


def cmd_check_game(args) -> tuple[int, dict]:
    v = load_game(args.game)
    body = {
        "binary": v.is_binary,
        "monotone": is_monotone(v, args.tol),
        "superadditive": is_superadditive(v, args.tol),
        "minimal_sets": [c.label() for c in minimal_sets(v)],
    }
    return EXIT_OK, _result(args, True, body)


def cmd_special(args) -> tuple[int, dict]:
    perm = _parse_perm(args.perm)
    if len(perm) != args.n:
        raise InputError(f"--perm has {len(perm)} players but --n is {args.n}")
    A = special_allocation(SetChain(perm))
    return EXIT_OK, _result(args, True, {"allocation": allocation_to_doc(A)})


def cmd_verify(args) -> tuple[int, dict]:
    A = load_allocation(args.allocation)
    reports = [
        check_efficiency(A, args.tol),
        check_reasonable_structural(A, args.tol),
        check_level_abs_sums(A, args.tol),
        check_row_sums_zero(A, args.tol),
        check_abs_sums(A, args.tol),
    ]
    # per-column abs sums of 2 fail on off-chain columns of any special
    # allocation, so that report is shown but does not decide the verdict
    ok = all(r.passed for r in reports[:4])
    body = {"checks": [report_to_doc(r) for r in reports], "verdict_from": [r.name for r in reports[:4]]}
    return (EXIT_OK if ok else EXIT_VIOLATION), _result(args, ok, body)


def cmd_falsify(args) -> tuple[int, dict]:
    A = load_allocation(args.allocation)
    hit = sample_reasonableness_violation(A, args.sampler, args.trials, args.seed, args.tol)
    if hit is None:
        return EXIT_OK, _result(args, True, {"violation": None})
    body = {
        "violation": {
            "label": hit.label,
            "index": hit.index,
            "player": hit.player,
            "payoff": hit.payoff,
            "lower": hit.lower,
            "upper": hit.upper,
            "bound": hit.bound,
            "game": game_to_doc(hit.game, labels=False),
        }
    }
    return EXIT_VIOLATION, _result(args, False, body)


def cmd_decompose(args) -> tuple[int, dict]:
    A = load_allocation(args.allocation)
    try:
        d, trace = peel_decompose(A, args.tol)
    except DecompositionError as exc:
        body = {"error": str(exc), "checks": [report_to_doc(r) for r in exc.reports]}
        return EXIT_VIOLATION, _result(args, False, body)
    residual = A.max_abs_diff(d.matrix())
    body = {
        "certificate": certificate_to_doc(d),
        "trace": {
            "steps": len(trace),
            "total_weight": float(d.weights.sum()),
            "reconstruction_max_abs": residual,
            "peeled": [
                {"permutation": list(s.permutation), "epsilon": s.epsilon, "residual_max_abs": s.residual_max_abs}
                for s in trace.steps
            ],
        },
    }
    return EXIT_OK, _result(args, True, body)


def cmd_verify_cert(args) -> tuple[int, dict]:
    A = load_allocation(args.allocation)
    d = load_certificate(args.cert)
    if d.n != A.n:
        raise InputError(f"certificate is on {d.n} players but the allocation on {A.n}")
    report = verify_decomposition(A, d, args.tol)
    return (EXIT_OK if report.passed else EXIT_VIOLATION), _result(
        args, report.passed, {"checks": [report_to_doc(report)]}
    )


def cmd_generate(args) -> tuple[int, dict]:
    A, d = random_allocation(args.n, args.support, args.seed)
    body = {"allocation": allocation_to_doc(A), "certificate": certificate_to_doc(d)}
    return EXIT_OK, _result(args, True, body)


def cmd_payoff(args) -> tuple[int, dict]:
    A = load_allocation(args.allocation)
    v = load_game(args.game)
    if A.n != v.n:
        raise InputError(f"allocation is on {A.n} players but the game on {v.n}")
    return EXIT_OK, _result(args, True, {"payoffs": apply_allocation(A, v).tolist()})


def cmd_span(args) -> tuple[int, dict]:
    v = load_game(args.game)
    terms = span_decompose_monotone_binary(v)
    body = {
        "terms": [{"coefficient": c, "game": game_to_doc(g, labels=False)} for c, g in terms],
    }
    return EXIT_OK, _result(args, True, body)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="shapleylike", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name: str, func: Callable, help: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help)
        p.set_defaults(func=func)
        p.add_argument("--tol", type=float, default=DEFAULT_TOL, help="comparison tolerance (default 1e-9)")
        return p

    p = add("shapley", cmd_shapley, "Shapley payoffs of a game, or the Shapley matrix")
    p.add_argument("--game", required=True)
    p.add_argument("--matrix", action="store_true")

    p = add("check-game", cmd_check_game, "monotone / superadditive flags and minimal sets")
    p.add_argument("--game", required=True)

    p = add("special", cmd_special, "special allocation of a permutation")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--perm", required=True, help='players in order of arrival, e.g. "2,1,3"')

    p = add("verify", cmd_verify, "efficiency and reasonableness structure of an allocation")
    p.add_argument("--allocation", required=True)

    p = add("falsify", cmd_falsify, "search games for a reasonableness violation")
    p.add_argument("--allocation", required=True)
    p.add_argument("--sampler", required=True, choices=SAMPLERS)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)

    p = add("decompose", cmd_decompose, "convex combination of special allocations")
    p.add_argument("--allocation", required=True)

    p = add("verify-cert", cmd_verify_cert, "check a decomposition certificate")
    p.add_argument("--allocation", required=True)
    p.add_argument("--cert", required=True)

    p = add("generate", cmd_generate, "random reasonable, efficient allocation with its certificate")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--support", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)

    p = add("payoff", cmd_payoff, "apply an allocation to a game")
    p.add_argument("--allocation", required=True)
    p.add_argument("--game", required=True)

    p = add("span", cmd_span, "write a monotone binary game with superadditive binary games")
    p.add_argument("--game", required=True)
    return parser


def run(argv: Optional[Sequence[str]] = None) -> tuple[int, Optional[dict]]:
    """Parse ``argv`` and run the command; returns the exit code and result document."""
    args = build_parser().parse_args(argv)
    if not np.isfinite(args.tol) or args.tol < 0:
        raise InputError("--tol must be a finite nonnegative number")
    return args.func(args)


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        code, doc = run(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    except (DocumentError, InputError, ValueError) as exc:
        print(f"shapleylike: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    sys.stdout.write(dumps(doc) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
