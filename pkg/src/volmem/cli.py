"""Command-line surface: simulate, analyze, fit, ingest, run experiments.

Exit codes: 0 success, 2 configuration/usage error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import distributions, experiments, ingest, memory, processes, stattools
from .errors import ConfigError, SchemaError, VolmemError
from .noise import NoiseSource

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


def _print_json(doc) -> None:
    json.dump(doc, sys.stdout, sort_keys=True, indent=1, default=float)
    sys.stdout.write("\n")


def _load_series(args) -> np.ndarray:
    """Column of numbers from a CSV (with or without header)."""
    import csv

    with open(args.input, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise SchemaError(f"{args.input}: empty file")
    col = args.column
    header = rows[0]
    start = 0
    idx = None
    try:
        float(header[0 if col is None else 0])
    except ValueError:
        start = 1
        if col is not None and col in header:
            idx = header.index(col)
    if idx is None:
        idx = int(col) if col is not None and str(col).isdigit() else 0
    try:
        return np.array([float(r[idx]) for r in rows[start:] if r])
    except (ValueError, IndexError) as exc:
        raise SchemaError(f"{args.input}: cannot parse column {col!r}: {exc}")


def cmd_simulate(args) -> int:
    noise = NoiseSource(args.seed)
    if args.model == "memory":
        spec = memory.MemoryModelSpec(
            a=args.a, b=args.b[0], W=args.window, phi_units=args.phi,
            tau=args.tau, warmup=args.warmup, recall_cap=args.recall_cap,
            kernel_mode=args.kernel_mode,
        )
        res = memory.simulate_memory_model(spec, args.n, noise)
    elif args.model == "arch":
        res = processes.simulate_arch(processes.ArchSpec(a=args.a, b=tuple(args.b)),
                                      args.n, warmup=args.warmup, noise=noise)
    else:
        res = processes.simulate_garch(
            processes.GarchSpec(a=args.a, b=tuple(args.b), c=tuple(args.c)),
            args.n, warmup=args.warmup, noise=noise)
    res.to_csv(args.out + ".csv")
    res.to_json(args.out + ".json", include_series=False)
    print(f"wrote {args.out}.csv and {args.out}.json ({len(res)} steps)")
    return EXIT_OK


def cmd_dfa(args) -> int:
    x = _load_series(args)
    if args.abs:
        x = np.abs(x)
    fit_range = (args.lmin, args.lmax) if args.lmin or args.lmax else None
    if fit_range:
        fit_range = (args.lmin or 10, args.lmax or len(x) // 10)
    r = stattools.dfa(x, detrend_order=args.order, fit_range=fit_range,
                      grid_points=args.points)
    doc = {"H": r.H, "h_stderr": r.h_stderr, "fit_r": r.fit_r,
           "fit_range": list(r.fit_range)}
    if args.curve:
        with open(args.curve, "w") as fh:
            fh.write("log10_ell,log10_F\n")
            for ell, F in zip(r.ells, r.F):
                fh.write(f"{np.log10(float(ell))!r},{np.log10(F)!r}\n")
        doc["curve"] = args.curve
    _print_json(doc)
    return EXIT_OK


def cmd_hill(args) -> int:
    r = stattools.hill(_load_series(args), k=args.k)
    doc = {"k": r.k, "alpha_hat": r.alpha_hat}
    if args.trace:
        with open(args.trace, "w") as fh:
            fh.write("k,alpha\n")
            for k, a in zip(r.trace_k, r.trace_alpha):
                fh.write(f"{k},{a!r}\n")
        doc["trace"] = args.trace
    _print_json(doc)
    return EXIT_OK


def cmd_fit(args) -> int:
    x = _load_series(args)
    if args.standardize:
        x = stattools.standardize_sample(x)
    if args.family == "gumbel2":
        g = distributions.fit_gumbel2(x)
        _print_json({"beta": g.beta, "zeta": g.zeta,
                     "beta_stderr": g.beta_stderr, "zeta_stderr": g.zeta_stderr,
                     "predicted_tail_exponent": distributions.predict_tail_from_sigma(g)})
        return EXIT_OK
    fix_nu = None if args.free_nu else 1.0
    fix_qp = 1.0 if args.stretched else None
    if args.family == "gq":
        fit = distributions.fit_gq_mle(x, fix_nu=fix_nu, fix_qprime=fix_qp)
    else:
        fit = distributions.fit_gq_binned(distributions.bin_density(x),
                                          fix_nu=fix_nu, fix_qprime=fix_qp)
    _print_json({"q_prime": fit.params.q_prime, "nu": fit.params.nu,
                 "B": fit.params.B, "q": fit.q_tail, "loglik": fit.loglik,
                 "chi2_per_bin": fit.chi2_per_bin, "r2": fit.r2,
                 "hill_crosscheck": fit.hill_crosscheck})
    return EXIT_OK


def cmd_ks(args) -> int:
    x = _load_series(args)
    if args.against:
        y = _load_series(argparse.Namespace(input=args.against, column=args.column))
        r = stattools.ks_two_sample(x, y)
    elif args.fit_json:
        with open(args.fit_json) as fh:
            fd = json.load(fh)
        params = distributions.GqParams(fd["q_prime"], fd["nu"], fd["B"])
        r = stattools.ks_one_sample(x, lambda t: distributions.gq_cdf(params, t))
    else:
        from scipy.stats import norm
        r = stattools.ks_one_sample(x, norm.cdf)
    _print_json({"D": r.D, "p_value": r.p_value, "p_star": r.p_star})
    return EXIT_OK


def cmd_ingest(args) -> int:
    prices = ingest.load_price_csv(args.csv, args.date_column, args.price_column)
    if args.start or args.end:
        prices = prices.restrict(args.start, args.end)
    returns = ingest.log_returns(prices)
    if args.standardize:
        returns = ingest.standardize(returns)
    with open(args.out, "w") as fh:
        fh.write("t,r\n")
        for t, r in enumerate(returns.values):
            fh.write(f"{t},{r!r}\n")
    print(f"wrote {args.out}: {len(returns)} returns from {len(prices)} prices")
    return EXIT_OK


def cmd_experiment(args) -> int:
    seeds = tuple(int(s) for s in args.seeds.split(",")) if args.seeds \
        else experiments.DEFAULT_SEEDS
    if args.target == "sp500" and args.csv:
        doc = experiments.run_index_comparison(
            args.csv, date_column=args.date_column, price_column=args.price_column,
            start=args.start, end=args.end, seeds=seeds, n=args.n,
            workers=args.workers)
        if args.out:
            import os
            os.makedirs(args.out, exist_ok=True)
            with open(os.path.join(args.out, "sp500_comparison.json"), "w") as fh:
                json.dump(doc, fh, sort_keys=True, indent=1, default=float)
        _print_json({k: doc[k] for k in
                     ("n_prices", "n_returns", "data_fit", "data_H",
                      "two_sample_D_median")})
        return EXIT_OK
    if args.target in experiments.PRESETS:
        reports = experiments.run_preset(args.target, seeds=seeds, n=args.n,
                                         output_dir=args.out, workers=args.workers)
    else:
        config = experiments.parse_config(args.target)
        if args.out:
            config = experiments.ExperimentConfig(
                **{**config.to_dict(), "output_dir": args.out})
        reports = [experiments.run_experiment(config, workers=args.workers)]
    if args.target == "fig2_grid" and args.out:
        table = experiments.emit_table1(reports)
        import os
        with open(os.path.join(args.out, "table1.csv"), "w") as fh:
            fh.write(table["csv"])
        with open(os.path.join(args.out, "table1.txt"), "w") as fh:
            fh.write(table["text"])
    for rep in reports:
        _print_json({"label": rep.label, "aggregate": rep.aggregate})
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="volmem",
                                description="volatility-recall process toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("simulate", help="run a generator and write CSV/JSON")
    ps.add_argument("--model", choices=("arch", "garch", "memory"), required=True)
    ps.add_argument("--a", type=float, default=1.0)
    ps.add_argument("--b", type=float, nargs="+", default=[0.5])
    ps.add_argument("--c", type=float, nargs="+", default=[0.0])
    ps.add_argument("--window", "-W", type=int, default=22, help="memory window W")
    ps.add_argument("--phi", type=float, default=1.0, help="threshold in a/(1-b) units")
    ps.add_argument("--tau", type=float, default=None)
    ps.add_argument("--recall-cap", type=int, default=None)
    ps.add_argument("--kernel-mode", choices=("normalized", "raw"), default="normalized")
    ps.add_argument("--n", type=int, default=100_000)
    ps.add_argument("--warmup", type=int, default=None)
    ps.add_argument("--seed", type=int, default=1)
    ps.add_argument("--out", default="run")
    ps.set_defaults(func=cmd_simulate)

    pd = sub.add_parser("dfa", help="detrended fluctuation analysis")
    pd.add_argument("--input", required=True)
    pd.add_argument("--column", default=None)
    pd.add_argument("--abs", action="store_true", help="analyze |x|")
    pd.add_argument("--order", type=int, default=1)
    pd.add_argument("--lmin", type=int, default=None)
    pd.add_argument("--lmax", type=int, default=None)
    pd.add_argument("--points", type=int, default=20)
    pd.add_argument("--curve", default=None, help="write log-log curve CSV here")
    pd.set_defaults(func=cmd_dfa)

    ph = sub.add_parser("hill", help="tail-exponent estimator")
    ph.add_argument("--input", required=True)
    ph.add_argument("--column", default=None)
    ph.add_argument("--k", type=int, default=None)
    ph.add_argument("--trace", default=None, help="write per-k trace CSV here")
    ph.set_defaults(func=cmd_hill)

    pf = sub.add_parser("fit", help="fit a density family")
    pf.add_argument("--input", required=True)
    pf.add_argument("--column", default=None)
    pf.add_argument("--family", choices=("gq", "gq-binned", "gumbel2"), default="gq")
    pf.add_argument("--free-nu", action="store_true")
    pf.add_argument("--stretched", action="store_true", help="pin the shape to 1")
    pf.add_argument("--standardize", action="store_true")
    pf.set_defaults(func=cmd_fit)

    pk = sub.add_parser("ks", help="Kolmogorov-Smirnov tests")
    pk.add_argument("--input", required=True)
    pk.add_argument("--column", default=None)
    pk.add_argument("--against", default=None, help="second sample (two-sample test)")
    pk.add_argument("--fit-json", default=None, help="gq fit JSON (one-sample test)")
    pk.set_defaults(func=cmd_ks)

    pi = sub.add_parser("ingest", help="prices CSV -> returns CSV")
    pi.add_argument("--csv", required=True)
    pi.add_argument("--date-column", default="Date")
    pi.add_argument("--price-column", default="Adj Close")
    pi.add_argument("--start", default=None)
    pi.add_argument("--end", default=None)
    pi.add_argument("--standardize", action="store_true")
    pi.add_argument("--out", default="returns.csv")
    pi.set_defaults(func=cmd_ingest)

    pe = sub.add_parser("experiment", help="run a preset or a config file")
    pe.add_argument("target", help=f"preset ({', '.join(experiments.PRESETS)}) "
                                   "or a config-file path")
    pe.add_argument("--seeds", default=None, help="comma-separated seed list")
    pe.add_argument("--n", type=int, default=experiments.DEFAULT_N)
    pe.add_argument("--out", default=None, help="report/plot output directory")
    pe.add_argument("--workers", type=int, default=None,
                    help="parallel seed jobs (default $VOLMEM_WORKERS or 1)")
    pe.add_argument("--csv", default=None, help="price CSV for the sp500 preset")
    pe.add_argument("--date-column", default="Date")
    pe.add_argument("--price-column", default="Adj Close")
    pe.add_argument("--start", default=None)
    pe.add_argument("--end", default=None)
    pe.set_defaults(func=cmd_experiment)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, SchemaError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except VolmemError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except FileNotFoundError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
