"""Command line experiment runner.

Subcommands: ``average``, ``measure``, ``bell``, ``chsh``, ``postulates``.

Every JSON document printed carries ``"schema": "binary-qm/1"``. CSV output
uses ``.`` as decimal separator regardless of locale.

Random streams. One master ``--seed`` seeds a Philox generator ``G``:

* ``average``, ``measure``: all events are drawn from ``G`` in order.
* ``bell``: grid point ``k`` uses ``G.spawn(len(grid))[k]``.
* ``chsh``: setting pair ``k`` (order ab, ab', a'b, a'b') uses ``G.spawn(4)[k]``.
* ``postulates``: dimension ``k`` uses ``G.spawn(len(dims))[k]``.

Exit codes: 0 success, 1 statistical acceptance failure, 2 input or
validation error, 3 internal numerical failure.
"""

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from ._config import Tolerances, config_context
from .bell import (
    SETTING_PAIRS,
    SpinDirection,
    chsh_contextual,
    chsh_exact,
    correlation_contextual,
    correlation_exact,
    enumerate_lhv_strategies,
    max_chsh_lhv,
    max_chsh_unshared,
    singlet_state,
)
from .algebra import joint_diagonalize
from .checks import run_postulate_suite
from .exceptions import NumericalFailure, ValidationError
from .measurement import Analyzer, branch_probabilities, detect, negative_measurement, sample_branches
from .random import make_rng
from .specs import OBSERVABLE_PRESETS, STATE_PRESETS, parse_observable, parse_state
from .states import monte_carlo_average, quantum_average

SCHEMA = "binary-qm/1"

EXIT_OK = 0
EXIT_STATISTICAL = 1
EXIT_INPUT = 2
EXIT_NUMERICAL = 3


class _Output:
    def __init__(self):
        self.buffer = io.StringIO()

    def json(self, obj):
        self.buffer.write(json.dumps({"schema": SCHEMA, **obj}) + "\n")

    def csv(self, header, rows):
        writer = csv.writer(self.buffer, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _within(observed, expected, sigma):
    if sigma == 0:
        return bool(abs(observed - expected) <= 1e-12)
    return bool(abs(observed - expected) <= 4 * sigma)


def _state_arg(args, default=None):
    spec = args.preset or args.state or default
    if spec is None:
        raise ValidationError("a state is required (--state SPEC or --preset NAME)")
    return parse_state(spec)


def cmd_average(args, out):
    state = _state_arg(args)
    A = parse_observable(args.observable)
    members = [parse_observable(s) for s in args.context] if args.context else [A]
    ctx = joint_diagonalize(members)
    exact = quantum_average(state, A)
    est = monte_carlo_average(state, ctx, A, args.samples, make_rng(args.seed))
    ok = bool(abs(est.mean - exact) <= (5 * est.std_error if est.std_error > 0 else 1e-9))
    if args.format == "csv":
        out.csv(["exact", "mc_mean", "std_error", "n"], [[exact, est.mean, est.std_error, est.n_samples]])
    else:
        out.json({
            "command": "average",
            "seed": args.seed,
            "exact": exact,
            "mc_mean": est.mean,
            "std_error": est.std_error,
            "n": est.n_samples,
            "within_5_std_error": ok,
        })
    return EXIT_OK if ok else EXIT_STATISTICAL


def cmd_measure(args, out):
    state = _state_arg(args)
    analyzer = Analyzer.for_observable(parse_observable(args.observable))
    rng = make_rng(args.seed)
    n = args.samples
    weights = branch_probabilities(state, analyzer)
    negative = args.scenario == "negative"
    detector = args.detector_branch
    if negative and detector is None:
        detector = analyzer.n_branches - 1
    if detector is not None and not 0 <= detector < analyzer.n_branches:
        raise ValidationError(f"detector branch {detector} outside [0, {analyzer.n_branches})")

    counts = np.zeros(analyzer.n_branches, dtype=int)
    detected = 0
    reproduced = 0
    emit_records = args.format == "json" and not args.summary_only
    if args.repeat:
        # Post-measurement states are needed, so run event by event.
        for _ in range(n):
            if negative:
                rec = negative_measurement(state, analyzer, detector, rng)
            else:
                rec = detect(state, analyzer, rng)
            counts[rec.branch_index] += 1
            detected += rec.detected
            again = detect(rec.post_state, analyzer, rng)
            reproduced += again.branch_index == rec.branch_index
            if emit_records:
                out.json({"type": "record", **rec.to_dict(seed=args.seed)})
    else:
        branches, ids = sample_branches(state, analyzer, n, rng)
        counts = np.bincount(branches, minlength=analyzer.n_branches)
        fired = branches == detector if negative else np.ones(n, dtype=bool)
        detected = int(fired.sum())
        if emit_records:
            values = analyzer.eigenvalues
            for i, event_id, hit in zip(branches.tolist(), ids.tolist(), fired.tolist()):
                out.json({
                    "type": "record",
                    "branch_index": i,
                    "outcome_value": float(values[i]),
                    "detected": hit,
                    "phi_event_id": event_id,
                    "seed": args.seed,
                })

    ok = True
    branches = []
    for i, (w, c) in enumerate(zip(weights, counts)):
        freq = c / n
        sigma = math.sqrt(w * (1 - w) / n)
        good = _within(freq, w, sigma)
        ok &= good
        branches.append({
            "branch_index": i,
            "eigenvalue": float(analyzer.eigenvalues[i]),
            "probability": float(w),
            "count": int(c),
            "frequency": freq,
            "sigma": sigma,
            "within_4_sigma": good,
        })
    summary = {"type": "summary", "command": "measure", "seed": args.seed, "scenario": args.scenario, "n": n, "branches": branches}
    if negative:
        w_det = float(weights[detector])
        rate = detected / n
        good = _within(rate, w_det, math.sqrt(w_det * (1 - w_det) / n))
        ok &= good
        summary.update({"detector_branch": detector, "detected_rate": rate, "expected_detected_rate": w_det, "detected_within_4_sigma": good})
    if args.repeat:
        summary["reproduced_rate"] = reproduced / n
        ok &= reproduced == n

    if args.format == "csv":
        out.csv(
            ["branch_index", "eigenvalue", "probability", "count", "frequency", "sigma"],
            [[b["branch_index"], b["eigenvalue"], b["probability"], b["count"], b["frequency"], b["sigma"]] for b in branches],
        )
    else:
        out.json(summary)
    return EXIT_OK if ok else EXIT_STATISTICAL


def _angle_grid(args):
    if args.angles:
        return list(args.angles)
    if args.step <= 0:
        raise ValidationError("--step must be positive")
    count = int(math.floor((args.stop - args.start) / args.step + 1e-9)) + 1
    return [args.start + k * args.step for k in range(count)]


def cmd_bell(args, out):
    state = _state_arg(args, default="singlet")
    grid = _angle_grid(args)
    a = SpinDirection.from_angle(0.0, args.plane)
    rows = []
    ok = True
    for theta, child in zip(grid, make_rng(args.seed).spawn(len(grid))):
        b = SpinDirection.from_angle(theta, args.plane)
        exact = correlation_exact(state, a, b)
        est = correlation_contextual(state, a, b, args.samples, child)
        ok &= bool(abs(est.mean - exact) <= max(0.02, 4 * est.std_error))
        rows.append([theta, exact, est.mean, est.std_error, est.n_samples])
    header = ["theta_degrees", "E_exact", "E_mc", "std_error", "n"]
    if args.format == "csv":
        out.csv(header, rows)
    else:
        out.json({"command": "bell", "seed": args.seed, "rows": [dict(zip(header, r)) for r in rows]})
    return EXIT_OK if ok else EXIT_STATISTICAL


def cmd_chsh(args, out):
    a, a_p, b, b_p = (SpinDirection.from_angle(t, args.plane) for t in args.angles)
    ok = True
    if args.mode == "lhv":
        result = max_chsh_lhv()
        extra = {"strategies_enumerated": len(enumerate_lhv_strategies()), "S_max_without_shared_variable": max_chsh_unshared()}
        ok = bool(result.S <= 2)
    else:
        state = _state_arg(args, default="singlet")
        exact = chsh_exact(state, a, a_p, b, b_p)
        if args.mode == "exact":
            result, extra = exact, {}
        else:
            result = chsh_contextual(state, a, a_p, b, b_p, args.samples, make_rng(args.seed))
            se = result.std_error
            ok = bool(abs(result.S - exact.S) <= max(0.05, 5 * se))
            extra = {"S_exact": exact.S, "sigmas_above_2": (result.S - 2) / se if se > 0 else None}
    if args.format == "csv":
        errors = result.std_errors or (0.0,) * 4
        out.csv(["pair", "E", "std_error"], [[f"{x},{y}", e, s] for (x, y), e, s in zip(SETTING_PAIRS, result.terms, errors)] + [["S", result.S, result.std_error]])
    else:
        out.json({"command": "chsh", "seed": args.seed, "angles": list(args.angles), **result.to_dict(), **extra})
    return EXIT_OK if ok else EXIT_STATISTICAL


def cmd_postulates(args, out):
    results = run_postulate_suite(args.dims, args.events, args.samples, make_rng(args.seed))
    ok = all(r.passed for r in results)
    if args.format == "csv":
        out.csv(["name", "passed", "worst", "tolerance", "count"], [[r.name, r.passed, r.worst, r.tolerance, r.count] for r in results])
    else:
        out.json({"command": "postulates", "seed": args.seed, "dims": list(args.dims), "passed": ok, "checks": [r.to_dict() for r in results]})
    return EXIT_OK if ok else EXIT_STATISTICAL


def _parse_tolerances(items):
    types = {name: type(getattr(Tolerances(), name)) for name in Tolerances.field_names()}
    changes = {}
    for item in items or ():
        key, sep, value = item.partition("=")
        if not sep or key not in types:
            raise ValidationError(f"bad --tolerance {item!r}; keys: {', '.join(types)}")
        try:
            changes[key] = types[key](value)
        except ValueError:
            raise ValidationError(f"bad value in --tolerance {item!r}") from None
    return changes


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def _seed(text):
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=_seed, default=0, help="master seed (default 0)")
    common.add_argument("--samples", type=_positive_int, default=100_000, help="events per estimate")
    common.add_argument("--format", choices=("json", "csv"), help="default: csv for bell, json otherwise")
    common.add_argument("--out", metavar="PATH", help="write output here instead of stdout")
    common.add_argument("--tolerance", action="append", metavar="KEY=VAL", help="override a numerical tolerance")

    state = argparse.ArgumentParser(add_help=False)
    state.add_argument("--state", metavar="SPEC", help="preset name, inline JSON matrix or JSON file")
    state.add_argument("--preset", choices=sorted(STATE_PRESETS), help="named state")

    parser = argparse.ArgumentParser(prog="binary-qm", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("average", parents=[common, state], help="exact vs Monte Carlo average")
    p.add_argument("--observable", required=True, metavar="SPEC", help=f"presets: {', '.join(OBSERVABLE_PRESETS)}")
    p.add_argument("--context", action="append", metavar="SPEC", help="member of the measurement context (repeatable)")
    p.set_defaults(func=cmd_average)

    p = sub.add_parser("measure", parents=[common, state], help="analyzer/detector runs")
    p.add_argument("--observable", required=True, metavar="SPEC")
    p.add_argument("--scenario", choices=("positive", "negative"), default="positive")
    p.add_argument("--detector-branch", type=int, help="branch holding the detector (negative scenario)")
    p.add_argument("--repeat", action="store_true", help="measure again after each collapse and report reproducibility")
    p.add_argument("--summary-only", action="store_true", help="omit per-event records")
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("bell", parents=[common, state], help="correlation scan E(theta), CSV by default")
    p.add_argument("--start", type=float, default=0.0)
    p.add_argument("--stop", type=float, default=180.0)
    p.add_argument("--step", type=float, default=30.0)
    p.add_argument("--angles", type=float, nargs="+", help="explicit angle list in degrees")
    p.add_argument("--plane", choices=("xz", "xy", "yz"), default="xz")
    p.set_defaults(func=cmd_bell, format_default="csv")

    p = sub.add_parser("chsh", parents=[common, state], help="CHSH value")
    p.add_argument("--angles", type=float, nargs=4, default=[0.0, 90.0, 45.0, 135.0], metavar=("A", "A_PRIME", "B", "B_PRIME"))
    p.add_argument("--mode", choices=("contextual", "lhv", "exact"), default="contextual")
    p.add_argument("--plane", choices=("xz", "xy", "yz"), default="xz")
    p.set_defaults(func=cmd_chsh)

    p = sub.add_parser("postulates", parents=[common], help="randomized checks of the valuation rules")
    p.add_argument("--dims", type=_positive_int, nargs="+", default=[2, 3, 4, 5, 6, 7, 8])
    p.add_argument("--events", type=_positive_int, default=1000, help="physical states to test")
    p.set_defaults(func=cmd_postulates)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.format is None:
        args.format = getattr(args, "format_default", "json")
    out = _Output()
    try:
        with config_context(**_parse_tolerances(args.tolerance)):
            code = args.func(args, out)
    except ValidationError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalFailure as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    text = out.buffer.getvalue()
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
