"""Command-line front end.

Exit codes: 0 all checks pass, 1 a check failed, 2 usage error, 3 numerical failure.
The default thread count comes from ``SUBORDINATION_THREADS`` (else 1).
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, acceptance, density, sampling, semigroup, solver
from .errors import AccuracyError, EvaluationError, ParameterError, RangeError, SubordinationError
from .report import ReportEnvelope, RunConfig, to_native, write_csv, write_json

THREADS_ENV = "SUBORDINATION_THREADS"

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_NUMERICAL = 0, 1, 2, 3

SAMPLE_KINDS = (
    "gaussian",
    "symmetric-stable",
    "subordinator",
    "inverse-subordinator",
    "brownian-time",
    "inverse-stable-time",
    "alpha-time",
    "iterated-bm",
)
PATH_KINDS = ("brownian", "two-sided-brownian", "subordinator", "symmetric-stable")
VERIFY_CHECKS = (
    "ibm-pde",
    "fractional-pde",
    "n-order",
    "alpha-time-pde",
    "kernel-pde",
    "corollary-ks",
    "noneq-ks",
    "tails",
)


class UsageError(SubordinationError):
    pass


def _floats(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _seed(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got {text!r}")
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _positive_int(text):
    try:
        v = int(float(text))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    if v < 1 or v != float(text):
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return v


def _global_flags(parser, suppress):
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--seed", type=_seed, default=d(0), help="64-bit unsigned seed (default 0)")
    parser.add_argument("--out", default=d(None), help="output file ('-' for stdout); a directory for reproduce-all")
    parser.add_argument("--format", choices=("csv", "json"), default=d("csv"))
    parser.add_argument("--threads", type=_positive_int, default=d(None), help=f"worker threads (default ${THREADS_ENV} or 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="subordination", description="Subordinated processes: sampling, densities, solutions and checks.")
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, **kw):
        p = sub.add_parser(name, **kw)
        _global_flags(p, suppress=True)
        return p

    p = add("simulate", help="draw samples of a random variable or a sample path")
    p.add_argument("--kind", required=True, choices=sorted(set(SAMPLE_KINDS) | set(PATH_KINDS)))
    p.add_argument("--beta", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--n", type=_positive_int, default=1000, help="number of samples")
    p.add_argument("--steps", type=_positive_int, help="simulate a path on a uniform grid with this many steps")
    p.add_argument("--x0", type=float, default=0.0)

    p = add("density", help="evaluate a density on a list of points")
    p.add_argument("--law", required=True, choices=("subordinator", "inverse-subordinator", "symmetric-stable"))
    p.add_argument("--beta", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--at", type=_floats, required=True, help="comma-separated evaluation points")
    p.add_argument("--method", choices=("series", "closed_form_half", "laplace_inversion"))

    p = add("ml", help="Mittag-Leffler function E_beta(z)")
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--z", type=_floats, required=True)

    p = add("solve", help="evaluate a solution formula on a (t, x) lattice")
    p.add_argument("--method", required=True, choices=("fractional", "brownian-time", "alpha-time"))
    p.add_argument("--lambda", dest="lam", type=float, default=-1.0, help="eigenvalue of the cosine data")
    p.add_argument("--beta", type=float, default=0.5)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--form", choices=("subordinator", "hitting_time"), default="subordinator")
    p.add_argument("--t", type=_floats, default=[1.0])
    p.add_argument("--x", type=_floats, default=[0.0])
    p.add_argument("--rel-tol", type=float, default=1e-11)

    p = add("verify", help="run one residual or statistical check")
    p.add_argument("--check", required=True, choices=VERIFY_CHECKS)
    p.add_argument("--n", type=_positive_int, help="Monte Carlo sample size per side")
    p.add_argument("--pairs", type=_positive_int, default=10)
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float, default=0.5)
    p.add_argument("--n-order", type=int, default=3, choices=(2, 3, 4))
    p.add_argument("--lambda", dest="lam", type=float, default=-1.0)
    p.add_argument("--t", type=_floats)
    p.add_argument("--x", type=float, default=0.0)

    p = add("reproduce-all", help="run the whole acceptance suite and write reports and plot data")
    p.add_argument("--quick", action="store_true", help="Monte Carlo size 10^4 where the verdict allows it")
    return parser


# -- commands ---------------------------------------------------------------------------


def _require(args, name, cmd):
    v = getattr(args, name)
    if v is None:
        raise UsageError(f"{cmd} needs --{name}")
    return v


def cmd_simulate(args):
    stream = sampling.RngStream(args.seed, 0)
    kind = args.kind
    if args.steps is not None:
        if kind not in PATH_KINDS:
            raise UsageError(f"--steps needs a path kind, one of {PATH_KINDS}")
        grid = sampling.TimeGrid.uniform(args.t, args.steps)
        pk = kind.replace("-", "_")
        if kind == "two-sided-brownian":
            path = sampling.simulate_path(pk, grid, stream)
            rows = [[i, float(s), float(a), float(b)] for i, (s, a, b) in enumerate(zip(grid.nodes, path.plus.values, path.minus.values))]
            return {"columns": ["index", "time", "value_plus", "value_minus"], "rows": rows, "summary": {"kind": kind, "steps": args.steps}}
        path = sampling.simulate_path(pk, grid, stream, beta=args.beta, alpha=args.alpha)
        rows = [[i, float(s), float(v)] for i, (s, v) in enumerate(zip(grid.nodes, path.values))]
        return {"columns": ["index", "time", "value"], "rows": rows, "summary": {"kind": kind, "steps": args.steps}}

    n, t = args.n, args.t
    if kind == "gaussian":
        values = sampling.sample_gaussian(n, stream)
    elif kind == "symmetric-stable":
        values = sampling.sample_symmetric_stable(_require(args, "alpha", kind), t, n, stream)
    elif kind == "subordinator":
        values = sampling.sample_stable_subordinator(_require(args, "beta", kind), t, n, stream)
    elif kind == "inverse-subordinator":
        values = sampling.sample_inverse_subordinator(_require(args, "beta", kind), t, n, stream)
    elif kind == "brownian-time":
        values = sampling.sample_subordinated(sampling.BrownianTime(), t, n, stream, x0=args.x0)
    elif kind == "inverse-stable-time":
        values = sampling.sample_subordinated(sampling.InverseStable(_require(args, "beta", kind)), t, n, stream, x0=args.x0)
    elif kind == "alpha-time":
        values = sampling.sample_subordinated(sampling.AlphaTime(_require(args, "alpha", kind)), t, n, stream, x0=args.x0)
    elif kind == "iterated-bm":
        values = sampling.sample_subordinated(sampling.IteratedBM(), t, n, stream, x0=args.x0)
    else:
        raise UsageError(f"{kind} is a path kind; pass --steps")
    rows = [[i, float(v)] for i, v in enumerate(values)]
    summary = {"kind": kind, "n": n, "mean": float(np.mean(values))}
    return {"columns": ["index", "value"], "rows": rows, "summary": summary}


def cmd_density(args):
    pts = np.asarray(args.at, dtype=float)
    if args.law == "symmetric-stable":
        vals = density.symmetric_stable_density(_require(args, "alpha", args.law), args.t, pts)
    else:
        beta = _require(args, "beta", args.law)
        params = density.StableDensityParams(beta, method=args.method) if args.method else None
        if args.law == "subordinator":
            vals = density.stable_subordinator_density(beta, pts, params)
        else:
            vals = density.inverse_subordinator_density(beta, args.t, pts, params)
    vals = np.atleast_1d(vals)
    return {"columns": ["point", "density"], "rows": [[float(p), float(v)] for p, v in zip(pts, vals)], "summary": {"law": args.law}}


def cmd_ml(args):
    rows = [[float(z), float(density.mittag_leffler(args.beta, z))] for z in args.z]
    return {"columns": ["z", "value"], "rows": rows, "summary": {"beta": args.beta}}


def cmd_solve(args):
    spec = semigroup.Eigenfunction(lam=args.lam)
    q = solver.QuadratureConfig(rel_tol=args.rel_tol)
    t = np.asarray(args.t, dtype=float)
    if np.any(~(t > 0)):
        raise ParameterError("t must be positive")
    rows = []
    for x in args.x:
        if args.method == "fractional":
            sol = solver.solve_fractional_subordination(spec, args.beta, t, x, q, form=args.form)
        elif args.method == "brownian-time":
            sol = solver.solve_brownian_time(spec, t, x, q)
        else:
            sol = solver.solve_alpha_time(spec, args.alpha, t, x, q)
        for ti, ui in zip(t, np.atleast_1d(np.real(sol.value))):
            rows.append([float(ti), float(x), float(ui), float(sol.est_error)])
    return {"columns": ["t", "x", "u", "est_error"], "rows": rows, "summary": {"method": args.method, "lambda": args.lam}}


def _threads(args):
    if args.threads is not None:
        return args.threads
    env = os.environ.get(THREADS_ENV)
    if env is None:
        return 1
    try:
        v = int(env)
    except ValueError:
        raise UsageError(f"{THREADS_ENV} must be a positive integer, got {env!r}")
    if v < 1:
        raise UsageError(f"{THREADS_ENV} must be a positive integer, got {env!r}")
    return v


def _flatten(prefix, obj, out):
    if isinstance(obj, dict):
        for k, v in obj.items():
            _flatten(f"{prefix}.{k}" if prefix else str(k), v, out)
    elif isinstance(obj, (list, tuple)):
        for i, v in enumerate(obj):
            _flatten(f"{prefix}[{i}]", v, out)
    else:
        out.append([prefix, obj])
    return out


def _metric_rows(metrics):
    """Rows of (metric, value, threshold, passed); plain values get empty threshold / pass."""
    rows = []
    for name, v in metrics.items():
        if isinstance(v, dict) and set(v) == {"value", "threshold", "pass"}:
            rows.append([name, v["value"], v["threshold"], v["pass"]])
        else:
            rows.extend([k, val, "", ""] for k, val in _flatten(name, v, []))
    return rows


def cmd_verify(args):
    check = args.check
    threads = _threads(args)
    if check in ("ibm-pde", "fractional-pde", "n-order", "alpha-time-pde", "kernel-pde"):
        kw = {"lam": args.lam, "x": args.x, "beta": args.beta, "n_order": args.n_order}
        if args.alpha is not None:
            kw["alpha"] = args.alpha
        if args.t is not None:
            kw["t"] = args.t if len(args.t) > 1 else args.t[0]
        metrics = acceptance.residual_metrics(check, **kw)
        passed = all(v["pass"] for v in metrics.values())
    elif check == "corollary-ks":
        passed, metrics = acceptance.corollary_ks(args.seed, args.n or 10**5, args.pairs, threads, beta=args.beta)
    elif check == "noneq-ks":
        passed, metrics = acceptance.noneq_ks(args.seed, args.n or 10**5, args.alpha or 1.5, args.pairs, threads)
    else:
        alphas = (args.alpha,) if args.alpha is not None else (1.2, 1.5, 1.8)
        passed, metrics = acceptance.tail_study(args.seed, args.n or 10**6, alphas)
    return {
        "columns": ["metric", "value", "threshold", "passed"],
        "rows": _metric_rows(metrics),
        "summary": {"check": check, "passed": bool(passed), "details": metrics},
    }


# -- reproduce-all ------------------------------------------------------------------------------

_GNUPLOT = """\
# density and ECDF overlays; run with: gnuplot plots.gp
set terminal pngcairo size 900,600
set datafile separator ","
set key top right

set output "densities.png"
set logscale x
set xlabel "u"
set ylabel "density"
set title "Stable subordinator densities g_beta and E_1 densities"
plot for [c=2:{n_dens}] "densities.csv" using 1:c with lines title columnheader(c)
unset logscale x

set output "ecdf.png"
set xlabel "x"
set ylabel "ECDF"
set title "X(E_1) vs X(|Y_1|): equal laws (beta=1/2), distinct (beta=1/3 vs 1.5-stable)"
plot for [c=2:{n_ecdf}] "ecdf.csv" using 1:c with lines title columnheader(c)
"""


def _write_table(path, columns, table):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(columns) + "\n")
        for row in zip(*table):
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


def cmd_reproduce_all(args):
    ctx = acceptance.Context(seed=args.seed, quick=args.quick, threads=_threads(args))
    out_dir = Path(args.out or "reproduce-all-output")
    out_dir.mkdir(parents=True, exist_ok=True)
    results = []
    for check in acceptance.CHECKS:
        r = check(ctx)
        print(r.line(), flush=True)
        results.append(r)
        env = ReportEnvelope(
            RunConfig(f"check-{r.criterion}", {"quick": args.quick, "name": r.name}, args.seed, str(out_dir), "csv", __version__),
            {"columns": ["metric", "value", "threshold", "passed"], "rows": _metric_rows(r.metrics), "summary": {"passed": r.passed}},
            int(round(r.runtime_s * 1000)),
        )
        (out_dir / f"check_{r.criterion}.csv").write_text(write_csv(env), encoding="utf-8")

    plots = acceptance.plot_data(ctx)
    dens, ecdf = plots["densities"], plots["ecdf"]
    _write_table(out_dir / "densities.csv", list(dens), list(dens.values()))
    _write_table(out_dir / "ecdf.csv", list(ecdf), list(ecdf.values()))
    (out_dir / "plots.gp").write_text(_GNUPLOT.format(n_dens=len(dens), n_ecdf=len(ecdf)), encoding="utf-8")

    rows = [[r.criterion, r.name, r.passed, r.runtime_s, r.budget_s] for r in results]
    summary = {
        "all_passed": all(r.passed for r in results),
        "quick": args.quick,
        "verdicts": {str(r.criterion): r.passed for r in results},
        "checks": [{"criterion": r.criterion, "name": r.name, "passed": r.passed, "metrics": r.metrics} for r in results],
    }
    return {"columns": ["criterion", "name", "passed", "runtime_s", "budget_s"], "rows": rows, "summary": summary}


# -- entry point ------------------------------------------------------------------------------------


def _emit(env, args):
    text = write_json(env) if args.format == "json" else write_csv(env)
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(args.out).write_text(text, encoding="utf-8")


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    params = {k: v for k, v in vars(args).items() if k not in ("command", "seed", "out", "format", "threads")}
    cfg = RunConfig(args.command, to_native(params), args.seed, args.out or "-", args.format, __version__)
    t0 = time.perf_counter()
    try:
        if args.command == "reproduce-all":
            results = cmd_reproduce_all(args)
        else:
            results = {"simulate": cmd_simulate, "density": cmd_density, "ml": cmd_ml, "solve": cmd_solve, "verify": cmd_verify}[
                args.command
            ](args)
    except (EvaluationError, RangeError, AccuracyError) as exc:
        print(f"subordination {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (SubordinationError, ValueError) as exc:
        print(f"subordination {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    env = ReportEnvelope(cfg, results, int(round((time.perf_counter() - t0) * 1000)))

    if args.command == "reproduce-all":
        out_dir = Path(args.out or "reproduce-all-output")
        (out_dir / "summary.json").write_text(write_json(env), encoding="utf-8")
        print(f"wrote {out_dir}/summary.json, check_*.csv, densities.csv, ecdf.csv, plots.gp")
        return EXIT_OK if results["summary"]["all_passed"] else EXIT_FAILED

    _emit(env, args)
    if args.command == "verify":
        return EXIT_OK if results["summary"]["passed"] else EXIT_FAILED
    return EXIT_OK


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
