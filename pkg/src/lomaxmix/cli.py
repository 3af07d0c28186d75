"""Command-line interface.

Subcommands: replies, scan, fit, gof, ccdf, rank, simulate.  Every
command is deterministic given its flags and seed; all machine-readable
output is UTF-8 JSON or TSV.  Exit codes: 0 success, 1 empty or
degenerate result, 2 input or validation error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .distributions import MixtureModel, mixture_ccdf, rank_frequency, RankModel
from .errors import (
    DegenerateDataError,
    DomainError,
    FitError,
    InputFormatError,
    InsufficientResolutionError,
    ValidationError,
)
from .fitting import FitConfig, fit_lognormal, fit_power_law, scan_orders
from .gof import chi_square_test, empirical_ccdf
from .ingest import (
    DEFAULT_DISCRETIZATION,
    REPLY_RULES,
    discretize,
    extract_reply_delays,
    load_counts,
    parse_message_log,
    save_counts,
    write_delays,
)
from .report import (
    SCHEMA_VERSION,
    build_report,
    load_report,
    model_from_dict,
    model_to_dict,
    sample_digest,
    write_report,
)
from .simulate import sample_mixture

EXIT_OK = 0
EXIT_EMPTY = 1
EXIT_INPUT = 2

_INPUT_ERRORS = (InputFormatError, ValidationError, DomainError)
_EMPTY_ERRORS = (DegenerateDataError, FitError, InsufficientResolutionError)


def _err(msg: str) -> None:
    print(f"error: {msg}", file=sys.stderr)


def _load_sample(path):
    result = load_counts(path)
    if result.dropped:
        _err(f"{result.dropped} of {result.rows_read} count rows skipped")
    return result.sample


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_replies(args) -> int:
    log = parse_message_log(args.log, delimiter=args.delimiter, header=args.header)
    sample = extract_reply_delays(log.events, rule=args.rule, discretization=args.dt)
    counts = discretize(sample)
    out_delays = args.out_delays or f"{args.log}.delays"
    out_counts = args.out_counts or f"{args.log}.counts"
    write_delays(out_delays, sample)
    save_counts(out_counts, counts)
    print(f"rows read        {log.rows_read}")
    print(f"rows dropped     {log.dropped}")
    print(f"self messages    {sample.self_messages_dropped}")
    print(f"delays extracted {sample.delays.size}")
    print(f"reply rule       {sample.rule}")
    print(f"delays -> {out_delays}")
    print(f"counts -> {out_counts}")
    return EXIT_OK


def _fit_config(args) -> FitConfig:
    return FitConfig(
        starts=args.starts,
        seed=args.seed,
        max_evals=args.max_evals,
        tol=args.tol,
    )


def _print_scan_table(scan) -> None:
    best_aic = scan.best.aic
    print(f"{'M':>3} {'n':>3} {'logL':>16} {'AIC':>16} {'dAIC':>12} conv")
    for fit in scan.fits:
        print(
            f"{fit.order:>3} {fit.n_params:>3} {fit.log_likelihood:>16.4f} "
            f"{fit.aic:>16.4f} {fit.aic - best_aic:>12.4f} {fit.converged}"
        )
    for order, msg in sorted(scan.failures.items()):
        print(f"{order:>3} failed: {msg}")


def cmd_scan(args, max_order: int | None = None) -> int:
    sample = _load_sample(args.counts)
    config = _fit_config(args)
    scan = scan_orders(sample, max_order if max_order is not None else args.m_max, config)
    best = scan.best

    gof_report, gof_error = None, None
    try:
        gof_report = chi_square_test(best.model, sample, best.n_params, args.alpha)
    except (InsufficientResolutionError, ValidationError) as exc:
        gof_error = str(exc)

    baselines = {}
    baseline_errors = {}
    for name, fitter in (("power_law", fit_power_law), ("lognormal", fit_lognormal)):
        try:
            baselines[name] = fitter(sample)
        except DegenerateDataError as exc:
            baseline_errors[name] = str(exc)
            _err(f"baseline {name} failed: {exc}")

    config_echo = {
        "seed": args.seed,
        "starts": args.starts,
        "max_evals": args.max_evals,
        "m_max": max_order if max_order is not None else args.m_max,
        "alpha": args.alpha,
        "dt": getattr(args, "dt", None),
        "reply_rule": getattr(args, "rule", None),
    }
    report = build_report(
        scan,
        sample,
        gof=gof_report,
        gof_error=gof_error,
        baselines=baselines,
        config_echo=config_echo,
    )
    for name, msg in baseline_errors.items():
        report["baselines"][name] = {"error": msg}

    out = args.out or f"{args.counts}.report.json"
    write_report(out, report)
    _print_scan_table(scan)
    if gof_report is not None:
        verdict = "rejected" if gof_report.rejected else "not rejected"
        print(
            f"chi2 {gof_report.chi2:.4f}  dof {gof_report.dof}  "
            f"p {gof_report.p_value:.6g}  {verdict} at alpha={gof_report.alpha}"
        )
    else:
        print(f"gof unavailable: {gof_error}")
    print(f"report -> {out}")
    return EXIT_OK


def cmd_fit(args) -> int:
    return cmd_scan(args, max_order=args.m)


def cmd_gof(args) -> int:
    sample = _load_sample(args.counts)
    report = load_report(args.report)
    model = model_from_dict(report["components"])
    n_params = args.n_params if args.n_params is not None else report["n_params"]
    gof_report = chi_square_test(model, sample, n_params, args.alpha)
    payload = {
        "schema_version": SCHEMA_VERSION,
        "input_digest": sample_digest(sample),
        "gof": {
            "chi2": gof_report.chi2,
            "dof": gof_report.dof,
            "p_value": gof_report.p_value,
            "alpha": gof_report.alpha,
            "rejected": gof_report.rejected,
        },
    }
    text = json.dumps(payload, sort_keys=True, indent=2)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
        print(f"gof -> {args.out}")
    verdict = "rejected" if gof_report.rejected else "not rejected"
    print(
        f"chi2 {gof_report.chi2:.4f}  dof {gof_report.dof}  "
        f"p {gof_report.p_value:.6g}  {verdict} at alpha={gof_report.alpha}"
    )
    return EXIT_OK


def _check_digest(report: dict, sample, strict: bool) -> int | None:
    digest = sample_digest(sample)
    if report.get("input_digest") != digest:
        msg = "report digest does not match the count file"
        if strict:
            _err(msg)
            return EXIT_EMPTY
        print(f"warning: {msg}", file=sys.stderr)
    return None


def cmd_ccdf(args) -> int:
    sample = _load_sample(args.counts)
    report = load_report(args.report)
    bad = _check_digest(report, sample, args.strict)
    if bad is not None:
        return bad
    model = model_from_dict(report["components"])
    emp = empirical_ccdf(sample)
    ks = emp.ks()
    model_col = mixture_ccdf(model, ks)
    comp_cols = [
        comp.weight * np.exp(-comp.shape * np.log1p((ks - 1.0) / comp.scale))
        for comp in model.components
    ]
    header = ["k", "empirical", "model"] + [
        f"component_{i + 1}" for i in range(model.order)
    ]
    lines = ["\t".join(header)]
    fracs = emp.fractions()
    for j, k in enumerate(ks):
        row = [str(int(k)), repr(float(fracs[j])), repr(float(model_col[j]))]
        row += [repr(float(col[j])) for col in comp_cols]
        lines.append("\t".join(row))
    _write_tsv(args.out, lines)
    return EXIT_OK


def cmd_rank(args) -> int:
    report = load_report(args.report)
    model = model_from_dict(report["components"])
    idx = args.component
    if not 0 <= idx < model.order:
        raise DomainError(f"component index {idx} out of range for M={model.order}")
    comp = model.components[idx]
    rm = RankModel(shape=comp.shape, scale=comp.scale, population=args.population)
    ranks = np.arange(1, args.population + 1)
    freqs = rank_frequency(rm, ranks)
    lines = [
        f"# schema: {SCHEMA_VERSION} rank table",
        f"# component_index: {idx}",
        f"# c: {comp.weight!r}  b: {comp.scale!r}  v: {comp.shape!r}",
        "r\tf_r",
    ]
    for r, f in zip(ranks, freqs):
        lines.append(f"{int(r)}\t{float(f)!r}")
    _write_tsv(args.out, lines)
    return EXIT_OK


def _write_tsv(out, lines) -> None:
    text = "\n".join(lines) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"table -> {out}")
    else:
        sys.stdout.write(text)


def _parse_model_spec(spec: str) -> MixtureModel:
    try:
        triples = []
        for part in spec.split(","):
            c, b, v = (float(tok) for tok in part.split(":"))
            triples.append((c, b, v))
    except ValueError as exc:
        raise InputFormatError(
            f"model spec must be 'c:b:v[,c:b:v...]', got {spec!r}"
        ) from exc
    return MixtureModel.from_parameters(
        [t[0] for t in triples], [t[1] for t in triples], [t[2] for t in triples]
    )


def cmd_simulate(args) -> int:
    if (args.model is None) == (args.from_report is None):
        raise InputFormatError("supply exactly one of --model or --from-report")
    if args.model is not None:
        model = _parse_model_spec(args.model)
    else:
        model = model_from_dict(load_report(args.from_report)["components"])
    sample = sample_mixture(model, args.n, args.seed)
    save_counts(args.out, sample)
    meta = {
        "schema_version": SCHEMA_VERSION,
        "components": model_to_dict(model),
        "n": args.n,
        "seed": args.seed,
        "output_digest": sample_digest(sample),
    }
    with open(f"{args.out}.meta.json", "w", encoding="utf-8") as fh:
        fh.write(json.dumps(meta, sort_keys=True, indent=2) + "\n")
    print(f"{args.n} draws -> {args.out}")
    print(f"metadata -> {args.out}.meta.json")
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _add_fit_flags(p) -> None:
    p.add_argument("--starts", type=int, default=20, help="multi-start count")
    p.add_argument("--seed", type=int, default=0, help="random seed")
    p.add_argument("--max-evals", type=int, default=50_000, help="evaluation cap per start")
    p.add_argument("--tol", type=float, default=1e-9, help="relative convergence tolerance")
    p.add_argument("--alpha", type=float, default=0.001, help="gof significance level")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lomaxmix",
        description="Fit mixtures of discrete Lomax components to heavy-tailed count data.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("replies", help="extract reply delays from a message log")
    p.add_argument("log", help="message log (timestamp,sender,receiver)")
    p.add_argument("--dt", type=float, default=DEFAULT_DISCRETIZATION, help="discretization step, seconds")
    p.add_argument("--rule", choices=REPLY_RULES, default="first-response")
    p.add_argument("--delimiter", default=",")
    p.add_argument("--header", action="store_true", help="skip the first row")
    p.add_argument("--out-delays", default=None)
    p.add_argument("--out-counts", default=None)
    p.set_defaults(func=cmd_replies)

    p = sub.add_parser("scan", help="fit orders 1..M and select by AIC")
    p.add_argument("counts", help="count file")
    p.add_argument("--m-max", type=int, default=4)
    _add_fit_flags(p)
    p.add_argument("--out", default=None, help="report path (default <counts>.report.json)")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("fit", help="fit a single model order")
    p.add_argument("counts", help="count file")
    p.add_argument("--m", type=int, required=True, help="number of components")
    _add_fit_flags(p)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("gof", help="chi-square test of a fitted report against counts")
    p.add_argument("counts")
    p.add_argument("report")
    p.add_argument("--alpha", type=float, default=0.001)
    p.add_argument("--n-params", type=int, default=None, help="override fitted-parameter count")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_gof)

    p = sub.add_parser("ccdf", help="empirical / model / per-component survival table")
    p.add_argument("counts")
    p.add_argument("report")
    p.add_argument("--strict", action="store_true", help="fail on digest mismatch")
    p.add_argument("--out", default=None, help="TSV path (default stdout)")
    p.set_defaults(func=cmd_ccdf)

    p = sub.add_parser("rank", help="rank-frequency table from a fitted component")
    p.add_argument("report")
    p.add_argument("--population", "-l", type=int, required=True, help="number of ranked units")
    p.add_argument("--component", type=int, default=0, help="component index (default: dominant)")
    p.add_argument("--out", default=None, help="TSV path (default stdout)")
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("simulate", help="draw synthetic counts from a mixture")
    p.add_argument("--model", default=None, help="inline spec c:b:v[,c:b:v...]")
    p.add_argument("--from-report", default=None, help="take the model from a fit report")
    p.add_argument("-n", type=int, required=True, help="number of draws")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="simulated.counts")
    p.set_defaults(func=cmd_simulate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _INPUT_ERRORS as exc:
        _err(str(exc))
        return EXIT_INPUT
    except _EMPTY_ERRORS as exc:
        _err(str(exc))
        return EXIT_EMPTY


if __name__ == "__main__":
    sys.exit(main())
