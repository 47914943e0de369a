"""Command-line front end: point evaluation, sweeps, validation, baseline.

Exit codes: 0 success, 1 validation-check failure, 2 missing or malformed
scenario file, 3 invalid flag combination or violated precondition.

All rates print in bits/s/Hz to four decimals; CSV output keeps full
precision (shortest round-trip float representation), uses '.' decimals and
LF newlines regardless of locale.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .analytic import (
    MODE_COLLUDING,
    MODE_NONCOLLUDING,
    EsrResult,
    baseline_no_ris,
    esr_asymptotic,
    esr_colluding,
    esr_largek_colluding,
    esr_noncolluding,
)
from .channel import Scenario, load_scenario
from .monte_carlo import McConfig, estimate_esr
from .validation import run_validation_suite

__all__ = ["main"]

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_BAD_SCENARIO = 2
EXIT_BAD_FLAGS = 3

CSV_HEADER = "variable,value,mode,method,rate_d,rate_e,rate_s,stderr"

_MODE_ALIASES = {
    "nc": MODE_NONCOLLUDING,
    "non-colluding": MODE_NONCOLLUDING,
    "c": MODE_COLLUDING,
    "colluding": MODE_COLLUDING,
}
_METHOD_ALIASES = {
    "a": "analytic",
    "analytic": "analytic",
    "mc": "monte-carlo",
    "monte-carlo": "monte-carlo",
    "asym": "asymptotic",
    "asymptotic": "asymptotic",
    "largek": "large-K",
    "large-k": "large-K",
    "baseline": "baseline",
}
# Canonical emission order for sweep rows.
_METHOD_ORDER = ("analytic", "monte-carlo", "asymptotic", "large-K", "baseline")
_MODE_ORDER = (MODE_NONCOLLUDING, MODE_COLLUDING)

# Which modes each method can produce.
_METHOD_MODES = {
    "analytic": _MODE_ORDER,
    "monte-carlo": _MODE_ORDER,
    "asymptotic": _MODE_ORDER,
    "large-K": (MODE_COLLUDING,),
    "baseline": (MODE_NONCOLLUDING,),
}


class _FlagError(Exception):
    """Invalid flag combination; maps to exit code 3."""


def _fail(message: str, code: int) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _load(path: str) -> Scenario:
    return load_scenario(path)


def _parse_mode(text: str) -> str:
    try:
        return _MODE_ALIASES[text]
    except KeyError:
        raise _FlagError(f"unknown mode '{text}' (expected nc or c)") from None


def _parse_method(text: str) -> str:
    try:
        return _METHOD_ALIASES[text]
    except KeyError:
        raise _FlagError(
            f"unknown method '{text}' (expected a, mc, asym, largek or baseline)"
        ) from None


def _evaluate(
    scenario: Scenario,
    n: int,
    mode: str,
    method: str,
    trials: int,
    seed: int,
    workers: int,
) -> EsrResult:
    if mode not in _METHOD_MODES[method]:
        raise _FlagError(f"method '{method}' has no {mode} form")
    if method == "analytic":
        fn = esr_noncolluding if mode == MODE_NONCOLLUDING else esr_colluding
        return fn(scenario, n)
    if method == "monte-carlo":
        return estimate_esr(
            scenario, n, McConfig(trials=trials, seed=seed, mode=mode), workers=workers
        )
    if method == "asymptotic":
        return esr_asymptotic(scenario, n, mode)
    if method == "large-K":
        return esr_largek_colluding(scenario, n)
    return baseline_no_ris(scenario)


def _format_result(result: EsrResult) -> str:
    parts = [
        f"rate_d={result.rate_d:.4f}",
        f"rate_e={result.rate_e:.4f}",
        f"rate_s={result.rate_s:.4f}",
        "bits/s/Hz",
        f"mode={result.mode}",
        f"method={result.method}",
    ]
    if result.stderr is not None:
        parts.append(f"stderr={result.stderr:.4f}")
    if result.degenerate_lambdas:
        parts.append("(near-equal eavesdropper means were jittered apart)")
    return " ".join(parts)


def _csv_row(variable: str, value: int, result: EsrResult) -> str:
    stderr = "" if result.stderr is None else repr(result.stderr)
    return ",".join(
        [
            variable,
            str(value),
            result.mode,
            result.method,
            repr(result.rate_d),
            repr(result.rate_e),
            repr(result.rate_s),
            stderr,
        ]
    )


def _write_csv(path: str, rows: list[str]) -> None:
    Path(path).write_text(CSV_HEADER + "\n" + "".join(r + "\n" for r in rows), encoding="utf-8")


def _parse_values(args) -> list[int]:
    if args.values:
        try:
            values = [int(v) for v in args.values.split(",") if v.strip()]
        except ValueError:
            raise _FlagError(f"--values must be comma-separated integers, got '{args.values}'")
    elif args.log_range:
        parts = args.log_range.split(":")
        if len(parts) != 3:
            raise _FlagError("--log-range must be START:STOP:POINTS")
        try:
            start, stop, points = int(parts[0]), int(parts[1]), int(parts[2])
        except ValueError:
            raise _FlagError("--log-range must be START:STOP:POINTS with integers")
        if start < 1 or stop < start or points < 1:
            raise _FlagError("--log-range needs 1 <= START <= STOP and POINTS >= 1")
        import math

        if points == 1:
            values = [start]
        else:
            ratio = (stop / start) ** (1.0 / (points - 1))
            values = sorted({int(round(start * ratio**i)) for i in range(points)})
    else:
        raise _FlagError("provide --values or --log-range")
    if not values or any(v < 1 for v in values):
        raise _FlagError("sweep values must be positive integers")
    if sorted(set(values)) != values:
        raise _FlagError("sweep values must be strictly increasing")
    return values


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def _cmd_eval(args) -> int:
    try:
        scenario = _load(args.scenario)
    except ValueError as exc:
        return _fail(str(exc), EXIT_BAD_SCENARIO)
    try:
        mode = _parse_mode(args.mode)
        method = _parse_method(args.method)
        mc_flags_given = (
            args.trials is not None or args.seed is not None or args.workers is not None
        )
        if method != "monte-carlo" and mc_flags_given:
            raise _FlagError("--trials/--seed/--workers apply to the monte-carlo method only")
        n = args.n if args.n is not None else scenario.n_elements
        result = _evaluate(
            scenario,
            n,
            mode,
            method,
            trials=args.trials if args.trials is not None else 100_000,
            seed=args.seed if args.seed is not None else 0,
            workers=args.workers if args.workers is not None else 1,
        )
    except _FlagError as exc:
        return _fail(str(exc), EXIT_BAD_FLAGS)
    except ValueError as exc:
        return _fail(str(exc), EXIT_BAD_FLAGS)
    print(_format_result(result))
    if args.out:
        _write_csv(args.out, [_csv_row("N", n, result)])
    return EXIT_OK


def _cmd_sweep(args) -> int:
    try:
        scenario = _load(args.scenario)
    except ValueError as exc:
        return _fail(str(exc), EXIT_BAD_SCENARIO)
    try:
        values = _parse_values(args)
        modes = [_parse_mode(m) for m in args.modes.split(",") if m.strip()]
        methods = [_parse_method(m) for m in args.methods.split(",") if m.strip()]
        if not modes or not methods:
            raise _FlagError("need at least one mode and one method")
        modes = [m for m in _MODE_ORDER if m in modes]
        methods = [m for m in _METHOD_ORDER if m in methods]
        variable = args.variable.upper()
        if variable not in ("N", "K"):
            raise _FlagError("--variable must be N or K")
        if variable == "K" and args.n is None:
            raise _FlagError("a K sweep needs --n for the fixed element count")
        combos = [
            (mode, method)
            for mode in modes
            for method in methods
            if mode in _METHOD_MODES[method]
        ]
        if not combos:
            raise _FlagError("no valid (mode, method) combination for this sweep")

        rows = []
        for value in values:
            if variable == "N":
                scn, n = scenario, value
            else:
                scn, n = scenario.with_eve_count(value), args.n
            for mode in modes:
                for method in methods:
                    if mode not in _METHOD_MODES[method]:
                        continue
                    result = _evaluate(
                        scn,
                        n,
                        mode,
                        method,
                        trials=args.trials,
                        seed=args.seed,
                        workers=args.workers,
                    )
                    rows.append(_csv_row(variable, value, result))
    except _FlagError as exc:
        return _fail(str(exc), EXIT_BAD_FLAGS)
    except ValueError as exc:
        return _fail(str(exc), EXIT_BAD_FLAGS)
    _write_csv(args.out, rows)
    print(f"wrote {len(rows)} rows to {args.out}")
    return EXIT_OK


def _cmd_validate(args) -> int:
    try:
        scenario = _load(args.scenario)
    except ValueError as exc:
        return _fail(str(exc), EXIT_BAD_SCENARIO)
    if args.trials < 1000:
        return _fail("validation needs --trials >= 1000", EXIT_BAD_FLAGS)
    report = run_validation_suite(scenario, args.n, args.trials, args.seed)
    text = report.to_text()
    prefix = Path(args.out)
    prefix.with_suffix(".txt").write_text(text, encoding="utf-8")
    prefix.with_suffix(".json").write_text(report.to_json(), encoding="utf-8")
    print(text, end="")
    print(f"reports written to {prefix.with_suffix('.txt')} and {prefix.with_suffix('.json')}")
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


def _cmd_baseline(args) -> int:
    try:
        scenario = _load(args.scenario)
    except ValueError as exc:
        return _fail(str(exc), EXIT_BAD_SCENARIO)
    print(_format_result(baseline_no_ris(scenario)))
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="esr",
        description="Ergodic secrecy rate of a RIS-assisted wiretap link "
        "with discrete phase shifts and multiple eavesdroppers.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("eval", help="evaluate one (scenario, N) point")
    p_eval.add_argument("--scenario", required=True, help="scenario JSON file")
    p_eval.add_argument("--n", type=int, default=None, help="element count (default: scenario)")
    p_eval.add_argument("--mode", default="nc", help="nc or c")
    p_eval.add_argument("--method", default="a", help="a, mc, asym, largek or baseline")
    p_eval.add_argument("--trials", type=int, default=None, help="MC trials")
    p_eval.add_argument("--seed", type=int, default=None, help="MC seed")
    p_eval.add_argument("--workers", type=int, default=None, help="MC worker processes")
    p_eval.add_argument("--out", default=None, help="also write a one-row CSV")

    p_sweep = sub.add_parser("sweep", help="sweep N or K and write a CSV")
    p_sweep.add_argument("--scenario", required=True)
    p_sweep.add_argument("--variable", default="N", help="N or K")
    p_sweep.add_argument("--values", default=None, help="comma-separated values")
    p_sweep.add_argument("--log-range", default=None, help="START:STOP:POINTS (log-spaced)")
    p_sweep.add_argument("--modes", default="nc,c")
    p_sweep.add_argument("--methods", default="a")
    p_sweep.add_argument("--n", type=int, default=None, help="fixed N for a K sweep")
    p_sweep.add_argument("--trials", type=int, default=100_000)
    p_sweep.add_argument("--seed", type=int, default=0)
    p_sweep.add_argument("--workers", type=int, default=1)
    p_sweep.add_argument("--out", required=True, help="output CSV path")

    p_val = sub.add_parser("validate", help="run the statistical validation suite")
    p_val.add_argument("--scenario", required=True)
    p_val.add_argument("--n", type=int, default=256)
    p_val.add_argument("--trials", type=int, default=10_000)
    p_val.add_argument("--seed", type=int, default=0)
    p_val.add_argument("--out", default="validation_report", help="report path prefix")

    p_base = sub.add_parser("baseline", help="secrecy rate without the surface")
    p_base.add_argument("--scenario", required=True)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handlers = {
        "eval": _cmd_eval,
        "sweep": _cmd_sweep,
        "validate": _cmd_validate,
        "baseline": _cmd_baseline,
    }
    return handlers[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
