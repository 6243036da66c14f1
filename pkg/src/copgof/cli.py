"""Command-line interface.

Subcommands: test (one-family goodness-of-fit), select (rank candidate
families), fit (parameter estimate only), km (marginal Kaplan-Meier
curve), simulate (Monte Carlo study). JSON goes to stdout with floats at
12 significant digits; CSV schemas are fixed.

Exit codes: 0 success, 1 input or parse failure, 2 statistical failure,
64 usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

import numpy as np

from . import bootstrap, copulas, inference, numerics, simulation, survival
from .bootstrap import BootstrapConfig, BootstrapError
from .copulas import Family, LikelihoodError
from .inference import InferenceError
from .survival import CensoredPair, SurvivalError

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_STATISTICAL = 2
EXIT_USAGE = 64

DATA_HEADER = ["x1", "x2", "d1", "d2"]
KM_CSV_HEADER = ["time", "survival", "n_at_risk"]

_STAT_ERRORS = (InferenceError, LikelihoodError, BootstrapError,
                numerics.NumericsError, SurvivalError,
                simulation.SimulationError)


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _fmt(x: float) -> float:
    return float(f"{float(x):.12g}")


def read_data_csv(path) -> list[CensoredPair]:
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise InputError(f"{path}: empty file") from None
        if [h.strip().lower() for h in header] != DATA_HEADER:
            raise InputError(
                f"{path}: line 1: expected header {','.join(DATA_HEADER)}, "
                f"got {','.join(header)}")
        pairs = []
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != 4:
                raise InputError(f"{path}: line {lineno}: expected 4 fields, got {len(row)}")
            try:
                x1, x2 = float(row[0]), float(row[1])
                d1, d2 = int(row[2]), int(row[3])
                pairs.append(CensoredPair(x1, x2, d1, d2))
            except ValueError as exc:
                raise InputError(f"{path}: line {lineno}: {exc}") from None
    if not pairs:
        raise InputError(f"{path}: no data rows")
    return pairs


def _parse_family(name: str) -> Family:
    try:
        return Family.parse(name)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _parse_families(raw: str) -> list[Family]:
    fams = [_parse_family(tok) for tok in raw.split(",") if tok.strip()]
    if not fams:
        raise UsageError("no families given")
    deduped = []
    for f in fams:
        if f in deduped:
            print(f"warning: duplicate family {f.value} ignored", file=sys.stderr)
        else:
            deduped.append(f)
    return deduped


_CONFIG_KEYS = {"censoring_model": ("common", "per-margin"),
                "initial_theta": None}


def _parse_config(items) -> dict:
    out = {}
    for item in items or []:
        if "=" not in item:
            raise UsageError(f"config entries take the form key=value, got {item!r}")
        key, _, value = item.partition("=")
        key = key.strip()
        if key not in _CONFIG_KEYS:
            valid = ", ".join(sorted(_CONFIG_KEYS))
            raise UsageError(f"unknown config key {key!r}; valid keys: {valid}")
        allowed = _CONFIG_KEYS[key]
        value = value.strip()
        if allowed is not None:
            if value not in allowed:
                raise UsageError(
                    f"config key {key} accepts {'|'.join(allowed)}, got {value!r}")
            out[key] = value
        else:
            try:
                out[key] = float(value)
            except ValueError:
                raise UsageError(f"config key {key} needs a number, got {value!r}") from None
    return out


def _bootstrap_config(args, cfgmap) -> BootstrapConfig:
    if args.b < 2:
        raise UsageError(f"--b must be at least 2, got {args.b}")
    return BootstrapConfig(
        b=args.b, seed=args.seed, statistic=args.statistic,
        common_censoring=cfgmap.get("censoring_model", "common") == "common",
        alpha=args.alpha)


def _report_json(report: bootstrap.GofReport, alpha: float) -> dict:
    return {
        "family": report.family.value,
        "theta_hat": _fmt(report.theta_hat),
        "statistic": {
            "kind": report.statistic.kind,
            "value": _fmt(report.statistic.value),
            "null_mean": _fmt(report.statistic.null_value),
        },
        "sigma_b": _fmt(report.sigma_b),
        "p_value": _fmt(report.p_value),
        "b": report.b_used,
        "seed": report.seed,
        "n": report.n,
        "censoring_rates": [_fmt(r) for r in report.censoring_rates],
        "degenerate": report.degenerate,
        "decision_at": {"alpha": _fmt(alpha),
                        "reject": bool(report.p_value < alpha)},
    }


def _emit_json(obj, path=None) -> None:
    text = json.dumps(obj, indent=2) + "\n"
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_test(args) -> int:
    pairs = read_data_csv(args.input)
    family = _parse_family(args.family)
    cfgmap = _parse_config(args.config)
    config = _bootstrap_config(args, cfgmap)
    report = bootstrap.bootstrap_pvalue(pairs, family, config)
    _emit_json(_report_json(report, args.alpha), args.output)
    return EXIT_OK


def cmd_select(args) -> int:
    pairs = read_data_csv(args.input)
    families = _parse_families(args.families)
    cfgmap = _parse_config(args.config)
    config = _bootstrap_config(args, cfgmap)
    result = bootstrap.select_copula(pairs, families, config)
    ranking = []
    for entry in result.entries:
        if entry.report is not None:
            item = _report_json(entry.report, args.alpha)
            item["error"] = None
        else:
            item = {"family": entry.family.value, "error": entry.error}
        ranking.append(item)
    best = result.best
    _emit_json({
        "selected": best.family.value if best.report is not None else None,
        "ranking": ranking,
    }, args.output)
    if best.report is None:
        print("error: every candidate family failed", file=sys.stderr)
        return EXIT_STATISTICAL
    return EXIT_OK


def cmd_fit(args) -> int:
    pairs = read_data_csv(args.input)
    family = _parse_family(args.family)
    cfgmap = _parse_config(args.config)
    u1, u2, d1, d2 = survival.pseudo_observations(pairs)
    fit = inference.fit_pmle(family, u1, u2, d1, d2,
                             initial_theta=cfgmap.get("initial_theta"))
    _emit_json({
        "family": family.value,
        "theta_hat": _fmt(fit.theta_hat),
        "tau_hat": _fmt(copulas.theta_to_tau(family, fit.theta_hat)),
        "loglik": _fmt(fit.loglik),
        "n": fit.n,
        "converged": fit.converged,
    }, args.output)
    return EXIT_OK


def cmd_km(args) -> int:
    pairs = read_data_csv(args.input)
    if args.margin == 1:
        times = [p.x1 for p in pairs]
        events = [p.d1 for p in pairs]
    else:
        times = [p.x2 for p in pairs]
        events = [p.d2 for p in pairs]
    curve = survival.kaplan_meier(times, events)
    rows = [KM_CSV_HEADER]
    for t, s, r in zip(curve.jump_times, curve.values, curve.n_at_risk):
        rows.append([f"{t:.12g}", f"{s:.12g}", str(int(r))])
    text = "\n".join(",".join(map(str, row)) for row in rows) + "\n"
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_simulate(args) -> int:
    true_family = _parse_family(args.true_family)
    try:
        scenario = simulation.Scenario(true_family, args.tau, args.n, args.censoring)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    kinds = tuple(k.strip().lower() for k in args.tests.split(",") if k.strip())
    try:
        cfg = simulation.StudyConfig(replications=args.replications, b=args.b,
                                     alpha=args.alpha, seed=args.seed, kinds=kinds)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.mode == "rejection":
        null_families = (_parse_families(args.null_families)
                         if args.null_families else [true_family])
        rows = run = simulation.run_rejection_study(scenario, null_families, cfg)
        if args.output:
            simulation.write_rejection_csv(rows, args.output)
        else:
            writer = csv.writer(sys.stdout, lineterminator="\n")
            writer.writerow(simulation.REJECTION_CSV_HEADER)
            for row in rows:
                writer.writerow([row.true_family.value, row.null_family.value,
                                 row.test, f"{row.tau:.12g}", row.n, row.censoring,
                                 f"{row.rejection_rate:.12g}",
                                 f"{row.selection_rate:.12g}", row.replications])
    else:
        dists = simulation.run_null_distribution(scenario, cfg)
        dist = dists[kinds[0]]
        if args.output:
            simulation.write_qq_csv(dist, args.output)
        else:
            writer = csv.writer(sys.stdout, lineterminator="\n")
            writer.writerow(simulation.QQ_CSV_HEADER)
            for s, q in zip(dist.statistics, dist.normal_quantiles):
                writer.writerow([f"{s:.12g}", f"{q:.12g}"])
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="copgof",
                     description="Goodness-of-fit tests for bivariate survival "
                                 "copulas under right censoring.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, with_stat=True):
        p.add_argument("--input", required=True, help="CSV with header x1,x2,d1,d2")
        p.add_argument("--output", default=None, help="write result here instead of stdout")
        p.add_argument("--config", action="append", default=[],
                       metavar="KEY=VALUE", help="extra options "
                       "(censoring_model=common|per-margin, initial_theta=FLOAT)")
        if with_stat:
            p.add_argument("--statistic", default="ir",
                           choices=inference.STATISTIC_KINDS)
            p.add_argument("--b", type=int, default=200,
                           help="bootstrap replicates (default 200)")
            p.add_argument("--seed", type=int, default=0)
            p.add_argument("--alpha", type=float, default=0.05)

    p_test = sub.add_parser("test", help="test one null copula family")
    add_common(p_test)
    p_test.add_argument("--family", required=True)
    p_test.set_defaults(fn=cmd_test)

    p_sel = sub.add_parser("select", help="rank candidate families by p-value")
    add_common(p_sel)
    p_sel.add_argument("--families", required=True,
                       help="comma-separated candidate families")
    p_sel.set_defaults(fn=cmd_select)

    p_fit = sub.add_parser("fit", help="pseudo-maximum-likelihood estimate only")
    add_common(p_fit, with_stat=False)
    p_fit.add_argument("--family", required=True)
    p_fit.set_defaults(fn=cmd_fit)

    p_km = sub.add_parser("km", help="marginal Kaplan-Meier curve as CSV")
    p_km.add_argument("--input", required=True)
    p_km.add_argument("--output", default=None)
    p_km.add_argument("--margin", type=int, choices=(1, 2), default=1)
    p_km.set_defaults(fn=cmd_km)

    p_sim = sub.add_parser("simulate", help="Monte Carlo size/power study")
    p_sim.add_argument("--mode", choices=("rejection", "null"), default="rejection")
    p_sim.add_argument("--true-family", required=True)
    p_sim.add_argument("--tau", type=float, default=0.5)
    p_sim.add_argument("--n", type=int, default=100)
    p_sim.add_argument("--censoring", default="none",
                       choices=tuple(simulation.CENSORING_LEVELS))
    p_sim.add_argument("--null-families", default=None)
    p_sim.add_argument("--tests", default="ir,white,logim",
                       help="comma-separated statistic kinds")
    p_sim.add_argument("--replications", type=int, default=100)
    p_sim.add_argument("--b", type=int, default=200)
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--alpha", type=float, default=0.05)
    p_sim.add_argument("--output", default=None)
    p_sim.set_defaults(fn=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "b", None) is not None and args.b < 2:
            raise UsageError(f"--b must be at least 2, got {args.b}")
        return args.fn(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except _STAT_ERRORS as exc:
        print(f"statistical failure: {exc}", file=sys.stderr)
        return EXIT_STATISTICAL


if __name__ == "__main__":
    sys.exit(main())
