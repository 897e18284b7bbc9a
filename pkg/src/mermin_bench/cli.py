"""Command-line harness: ``mermin-bench <subcommand> [options]``.

Exit codes: 0 when every check passes (or a classification was made),
1 when a statistical or numerical check fails, 2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from fractions import Fraction
from typing import Any, Callable, Optional, Sequence

import numpy as np

from mermin_bench import lhv, loophole, montecarlo, params, regress
from mermin_bench.linalg import principal_angles
from mermin_bench.quantum import ALL_PAIRS, OUTCOMES, quantum_joint_probs

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2
SIG_DIGITS = 10
DEFAULT_TRIALS = 1_000_000


class UsageError(Exception):
    pass


def fmt_number(x: Any) -> Any:
    """Round floats to 10 significant digits; non-finite values become strings."""
    if isinstance(x, bool) or isinstance(x, int):
        return x
    if isinstance(x, (float, Fraction, np.floating)):
        x = float(x)
        if not math.isfinite(x):
            return "inf" if x > 0 else ("-inf" if x < 0 else "nan")
        return float(f"{x:.{SIG_DIGITS}g}")
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.ndarray):
        return fmt_number(x.tolist())
    if isinstance(x, dict):
        return {str(k): fmt_number(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [fmt_number(v) for v in x]
    return x


class Report:
    def __init__(self, subcommand: str, argv: Sequence[str], parameters: dict[str, Any]):
        self.subcommand = subcommand
        self.argv = list(argv)
        self.parameters = parameters
        self.analytic: dict[str, Any] = {}
        self.results: dict[str, Any] = {}
        self.checks: list[dict[str, Any]] = []
        self._start = time.perf_counter()

    def check(self, name: str, comparison: montecarlo.Comparison) -> None:
        self.checks.append(
            {
                "name": name,
                "analytic": comparison.analytic,
                "empirical": comparison.empirical,
                "stderr": comparison.stderr,
                "z": comparison.z,
                "n": comparison.n,
                "passed": comparison.passed,
            }
        )

    def bound_check(self, name: str, value: float, limit: float) -> None:
        """A deterministic check: ``value <= limit``."""
        self.checks.append({"name": name, "value": value, "limit": limit, "passed": value <= limit})

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.checks)

    def as_dict(self) -> dict[str, Any]:
        return fmt_number(
            {
                "command": " ".join(self.argv),
                "subcommand": self.subcommand,
                "parameters": self.parameters,
                "analytic": self.analytic,
                "results": self.results,
                "checks": self.checks,
                "passed": self.passed,
                "wall_time_s": time.perf_counter() - self._start,
            }
        )


def render_json(d: dict[str, Any]) -> str:
    return json.dumps(d, indent=2, sort_keys=True) + "\n"


def _flatten(prefix: str, value: Any, rows: list[tuple[str, Any]]) -> None:
    if isinstance(value, dict):
        for k, v in value.items():
            _flatten(f"{prefix}.{k}" if prefix else str(k), v, rows)
    elif isinstance(value, list) and value and isinstance(value[0], (dict, list)):
        for i, v in enumerate(value):
            _flatten(f"{prefix}[{i}]", v, rows)
    else:
        rows.append((prefix, value))


def render_csv(d: dict[str, Any]) -> str:
    """Two-column ``key,value`` listing of the flattened report."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["key", "value"])
    rows: list[tuple[str, Any]] = []
    _flatten("", d, rows)
    for key, value in rows:
        if isinstance(value, list):
            value = " ".join(str(v) for v in value)
        writer.writerow([key, value])
    return buf.getvalue()


def render_human(d: dict[str, Any]) -> str:
    lines = [f"$ {d['command']}"]
    if d["parameters"]:
        lines.append("parameters:")
        lines += [f"  {k} = {v}" for k, v in d["parameters"].items()]
    if d["analytic"]:
        lines.append("analytic:")
        for k, v in d["analytic"].items():
            lines.append(f"  {k} = {v}")
    if d["results"]:
        lines.append("results:")
        for k, v in d["results"].items():
            if isinstance(v, list) and v and isinstance(v[0], list):
                lines.append(f"  {k} =")
                lines += ["    " + "  ".join(f"{x:>17}" for x in row) for row in v]
            else:
                lines.append(f"  {k} = {v}")
    if d["checks"]:
        lines.append("checks:")
        for c in d["checks"]:
            flag = "PASS" if c["passed"] else "FAIL"
            if "z" in c:
                lines.append(
                    f"  [{flag}] {c['name']}: empirical {c['empirical']} vs analytic "
                    f"{c['analytic']} (z = {c['z']}, n = {c['n']})"
                )
            else:
                lines.append(f"  [{flag}] {c['name']}: {c['value']} <= {c['limit']}")
    lines.append(f"overall: {'PASS' if d['passed'] else 'FAIL'}  ({d['wall_time_s']} s)")
    return "\n".join(lines) + "\n"


RENDERERS: dict[str, Callable[[dict[str, Any]], str]] = {
    "json": render_json,
    "csv": render_csv,
    "human": render_human,
}


# argument types


def positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {value}")
    return value


def seed_int(text: str) -> int:
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return value


def probability(text: str) -> float:
    """A float in [0, 1]; ``sqrt3/2`` means the double nearest sqrt(3)/2."""
    if text.replace(" ", "").lower() in ("sqrt3/2", "sqrt(3)/2"):
        return loophole.SQRT3_OVER_2
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"must lie in [0, 1], got {value}")
    return value


def parse_distribution(text: str) -> lhv.StateDistribution:
    key = text.strip().lower()
    if key == "uniform":
        return lhv.StateDistribution.uniform()
    if key == "uniform-two-equal":
        return lhv.StateDistribution.uniform_two_equal()
    if len(key) == 3 and set(key) <= {"r", "g"}:
        return lhv.StateDistribution.point_mass(key.upper())
    try:
        weights = [float(w) for w in text.split(",")]
    except ValueError:
        raise UsageError(f"cannot parse distribution {text!r}") from None
    try:
        return lhv.StateDistribution.from_weights(weights)
    except ValueError as exc:
        raise UsageError(f"bad distribution weights: {exc}") from None


# subcommands


def _run_common(args) -> dict[str, Any]:
    return {"trials": args.trials, "seed": args.seed}


def cmd_quantum(args, argv) -> Report:
    report = Report("quantum", argv, _run_common(args))
    report.analytic = {
        str(pair): {k: float(v) for k, v in quantum_joint_probs(pair).as_dict().items()}
        for pair in ALL_PAIRS
    }
    report.analytic["same_color_different_settings"] = Fraction(1, 4)
    report.analytic["same_color_equal_settings"] = Fraction(1)
    stats = montecarlo.run_quantum(args.trials, args.seed, args.workers)
    report.results["counts"] = stats.table()
    for pair in ALL_PAIRS:
        table = quantum_joint_probs(pair)
        for key in OUTCOMES:
            name = key[0].letter + key[1].letter
            report.check(
                f"P({name} | {pair})",
                montecarlo.compare(
                    stats, table.entries[key], montecarlo.outcome_is(key), montecarlo.setting_is(pair)
                ),
            )
    report.check(
        "P(same color | different settings)",
        montecarlo.compare(stats, 0.25, montecarlo.same_color, montecarlo.different_settings),
    )
    report.check(
        "P(same color | equal settings)",
        montecarlo.compare(stats, 1.0, montecarlo.same_color, montecarlo.equal_settings),
    )
    _settings_check(report, stats)
    return report


def _settings_check(report: Report, stats: montecarlo.RunStats) -> None:
    chi2, z = montecarlo.setting_chi_square(stats)
    report.results["setting_chi_square"] = chi2
    report.checks.append(
        {
            "name": "setting pairs uniform (chi-square)",
            "analytic": 8,
            "empirical": chi2,
            "z": z,
            "n": stats.n_trials,
            "stderr": None,
            "passed": abs(z) <= montecarlo.Z_THRESHOLD,
        }
    )


def cmd_lhv(args, argv) -> Report:
    d = parse_distribution(args.dist)
    report = Report("lhv", argv, {**_run_common(args), "dist": args.dist, "weights": d.vector()})
    expected = lhv.equal_color_prob_diff_settings(d)
    bound = lhv.mermin_lower_bound()
    report.analytic = {
        "same_color_different_settings": expected,
        "same_color_equal_settings": 1.0,
        "mermin_lower_bound": bound.minimum,
        "bound_achieving_states": sorted(str(s) for s in bound.achieving_states),
        "quantum_same_color": Fraction(1, 4),
        "quantum_value_achievable": bound.minimum <= Fraction(1, 4),
        "equal_settings_consistent": lhv.equal_settings_consistency(d),
    }
    stats = montecarlo.run_lhv(d, None, args.trials, args.seed, args.workers)
    report.results["counts"] = stats.table()
    report.check(
        "P(same color | different settings)",
        montecarlo.compare(stats, expected, montecarlo.same_color, montecarlo.different_settings),
    )
    report.check(
        "P(same color | equal settings)",
        montecarlo.compare(stats, 1.0, montecarlo.same_color, montecarlo.equal_settings),
    )
    _settings_check(report, stats)
    return report


def cmd_loophole(args, argv) -> Report:
    m = loophole.DetectionModel(args.p, args.q)
    report = Report("loophole", argv, {**_run_common(args), "p": m.p, "q": m.q})
    equal = loophole.equal_color_and_detected_prob(m)
    detected = loophole.both_detected_prob(m)
    report.analytic = {
        "equal_color_and_detected": equal,
        "equal_color_and_detected_brute_force": loophole.brute_force_equal_color(m),
        "two_equal_class": loophole.per_class_equal_color_prob(loophole.StateClass.TWO_EQUAL, m),
        "three_equal_class": loophole.per_class_equal_color_prob(loophole.StateClass.THREE_EQUAL, m),
        "both_detected": detected,
        "conditional_equal_color": equal / detected if detected > 0 else None,
        "quantum_target": Fraction(1, 4),
    }
    stats = montecarlo.run_lhv(lhv.StateDistribution.uniform(), m, args.trials, args.seed, args.workers)
    report.results["counts"] = stats.table()
    report.check(
        "P(equal color and both detected | different settings)",
        montecarlo.compare(
            stats, equal,
            montecarlo.both(montecarlo.same_color, montecarlo.both_detected),
            montecarlo.different_settings,
        ),
    )
    report.check(
        "P(both detected | different settings)",
        montecarlo.compare(stats, detected, montecarlo.both_detected, montecarlo.different_settings),
    )
    given = montecarlo.both(montecarlo.different_settings, montecarlo.both_detected)
    if stats.count(given)[0] > 0:
        report.check(
            "P(equal color | both detected, different settings)",
            montecarlo.compare(stats, equal / detected, montecarlo.same_color, given),
        )
    return report


def cmd_regress(args, argv) -> Report:
    if args.z or args.t:
        return _regress_files(args, argv)
    for flag in ("n", "p", "k"):
        if getattr(args, flag) is None:
            raise UsageError(f"--{flag} is required without --z/--t")
    q = 1 if args.q is None else args.q
    try:
        inst = regress.generate_instance(args.n, args.p, q, args.k, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    report = Report("regress", argv, {"n": args.n, "p": args.p, "q": q, "k": args.k, "seed": args.seed})
    report.results["model_residual"] = float(np.abs(inst.residual()).max())
    report.results["eq6_residual"] = float(
        np.abs(regress.residual_product(inst.z, inst.t) - regress.residual_product(inst.u, inst.t) @ inst.b).max()
    )
    report.bound_check("residual identity (I-P_T)Z = VB", report.results["eq6_residual"], 1e-9)
    m = regress.recover_gram(inst.z, inst.t)
    if q == 1:
        err = regress.gram_proportionality_error(m, inst.b)
        report.results["gram_proportionality_error"] = err
        v = regress.residual_product(inst.u, inst.t)
        report.results["gram_scale"] = float(np.trace(m) / np.trace(inst.b.T @ inst.b))
        report.results["gram_scale_expected"] = float((v.T @ v)[0, 0])
        report.bound_check("gram proportionality", err, 1e-8)
    basis = regress.recover_row_space(inst.z, inst.t, q)
    angles = principal_angles(basis.basis, inst.b.T)
    report.results["row_space_B_angles"] = angles
    report.bound_check("row space of B", float(angles.max()), 1e-6)
    if args.k >= args.p + q:
        cbasis = regress.complementary_recover(inst.z, inst.a, q)
        cangles = principal_angles(cbasis.basis, inst.u)
        report.results["column_space_U_angles"] = cangles
        report.bound_check("column space of U", float(cangles.max()), 1e-6)
    else:
        report.results["column_space_U_angles"] = None
    return report


def _regress_files(args, argv) -> Report:
    if not (args.z and args.t):
        raise UsageError("--z and --t must be given together")
    try:
        z = regress.read_matrix_csv(args.z)
        t = regress.read_matrix_csv(args.t)
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read matrix: {exc}") from None
    if z.shape[0] != t.shape[0]:
        raise UsageError(f"Z has {z.shape[0]} rows but T has {t.shape[0]}")
    q = 1 if args.q is None else args.q
    report = Report("regress", argv, {"z": args.z, "t": args.t, "q": q, "shape_z": list(z.shape), "shape_t": list(t.shape)})
    m = regress.recover_gram(z, t)
    basis = regress.recover_row_space(z, t, q)
    report.results["gram"] = m
    report.results["basis"] = basis.basis
    report.results["eigenvalues"] = basis.eigenvalues
    if args.basis_out:
        regress.write_matrix_csv(args.basis_out, basis.basis)
    return report


def cmd_params(args, argv) -> Report:
    try:
        registry = params.load_registry(args.registry)
    except OSError as exc:
        raise UsageError(f"cannot read registry: {exc}") from None
    result = params.classify(registry, args.labels)
    report = Report("params", argv, {"registry": args.registry, "query": sorted(set(args.labels))})
    report.results["classification"] = str(result)
    report.results["kind"] = type(result).__name__
    report.results["experiments"] = list(result.experiments) if isinstance(result, params.Realizable) else []
    report.results["realism_assumption_holds"] = isinstance(result, params.Realizable)
    return report


def cmd_bound(args, argv) -> Report:
    bound = lhv.mermin_lower_bound()
    report = Report("bound", argv, {})
    report.analytic = {
        "mermin_lower_bound": bound.minimum,
        "achieving_states": sorted(str(s) for s in bound.achieving_states),
        "uniform_same_color": lhv.equal_color_prob_diff_settings(lhv.StateDistribution.uniform()),
        "quantum_same_color": Fraction(1, 4),
        "quantum_value_achievable": bound.minimum <= Fraction(1, 4),
        "per_state": {
            str(s): lhv.equal_color_prob_diff_settings(lhv.StateDistribution.point_mass(s))
            for s in lhv.ALL_STATES
        },
    }
    return report


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mermin-bench", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, trials=True):
        p.add_argument("--format", choices=sorted(RENDERERS), default="human")
        if trials:
            p.add_argument("--trials", type=positive_int, default=DEFAULT_TRIALS)
            p.add_argument("--seed", type=seed_int, default=0)
            p.add_argument("--workers", type=positive_int, default=os.cpu_count() or 1)

    p = sub.add_parser("quantum", help="sample the quantum outcome table")
    common(p)
    p.set_defaults(func=cmd_quantum)

    p = sub.add_parser("lhv", help="sample an instruction-set model")
    common(p)
    p.add_argument(
        "--dist", default="uniform",
        help="uniform, uniform-two-equal, a state like RRG, or 8 comma-separated weights",
    )
    p.set_defaults(func=cmd_lhv)

    p = sub.add_parser("loophole", help="instruction sets with lossy detection")
    common(p)
    p.add_argument("--p", type=probability, default=loophole.SQRT3_OVER_2)
    p.add_argument("--q", type=probability, default=0.5)
    p.set_defaults(func=cmd_loophole)

    p = sub.add_parser("regress", help="latent-block regression recovery")
    p.add_argument("--format", choices=sorted(RENDERERS), default="human")
    p.add_argument("--n", type=positive_int)
    p.add_argument("--p", type=int)
    p.add_argument("--q", type=positive_int)
    p.add_argument("--k", type=positive_int)
    p.add_argument("--seed", type=seed_int, default=0)
    p.add_argument("--z", help="CSV file with Z")
    p.add_argument("--t", help="CSV file with T")
    p.add_argument("--basis-out", help="write the recovered basis to this CSV file")
    p.set_defaults(func=cmd_regress)

    p = sub.add_parser("params", help="classify a parameter query")
    p.add_argument("--format", choices=sorted(RENDERERS), default="human")
    p.add_argument("--registry", required=True, help="registry file, lines 'id: label, ...'")
    p.add_argument("labels", nargs="+")
    p.set_defaults(func=cmd_params)

    p = sub.add_parser("bound", help="the instruction-set lower bound")
    common(p, trials=False)
    p.set_defaults(func=cmd_bound)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report = args.func(args, argv)
    except (UsageError, params.RegistryError, ValueError, np.linalg.LinAlgError) as exc:
        print(f"mermin-bench {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    sys.stdout.write(RENDERERS[args.format](report.as_dict()))
    return EXIT_OK if report.passed else EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
