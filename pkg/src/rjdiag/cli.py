"""``jd`` command-line interface.

Exit codes: 0 success, 2 usage or I/O error, 3 numerical failure.  Every
subcommand is deterministic given its flags; the default seed is
:data:`DEFAULT_SEED`.
"""

import argparse
import csv
import io
import logging
import sys
import time
from importlib import resources
from pathlib import Path

import numpy as np

from . import _io, _seeding, apps, synth
from .drjd import column_residuals, drjd
from .errors import NumericalError
from .matfam import load_family
from .metrics import least_squares_measure, moreau_amari
from .rjd import rjd

DEFAULT_SEED = 20240101
BENCH_HEADER = ("n", "d", "epsilon", "algo", "trials", "mean_err", "median_err")

log = logging.getLogger("rjdiag")


class UsageError(Exception):
    pass


def _float_list(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of numbers, got {text!r}") from None


def _int_list(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of integers, got {text!r}") from None


def _seed(text):
    try:
        return _seeding.check_seed(int(text))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _write(text, out):
    if out is None or str(out) == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _solve(family, algo, trials, seed):
    if algo == "rjd":
        best, _ = rjd(family, trials, seed)
        return best.q, None
    q, trace = drjd(family, trials, seed)
    return q, trace


def cmd_run(args):
    family = load_family(args.family)
    q, trace = _solve(family, args.algo, args.trials, args.seed)
    doc = {
        "algo": args.algo,
        "trials": args.trials,
        "seed": args.seed,
        "q": q.q,
        "least_squares": least_squares_measure(family, q),
        "per_column": column_residuals(family, q),
    }
    if trace is not None:
        doc["trace"] = [
            {"dimension": lv.dimension, "threshold": lv.threshold, "accepted": lv.accepted, "trial_index": lv.trial_index}
            for lv in trace.levels
        ]
    _write(_io.dumps(doc, indent=2) + "\n", args.out)
    return 0


def bench_rows(ns, ds, epsilons, algos, trials, repeats, seed, timings=False):
    """Mean/median error of each algorithm over ``repeats`` runs on one fixed family per setting."""
    rows = []
    for n in ns:
        for d in ds:
            for ie, eps in enumerate(epsilons):
                spec = synth.FamilySpec(n, d, positive_definite=True, noise_epsilon=eps,
                                        seed=_seeding.derive_seed(seed, n, d, ie))
                family, _ = synth.generate_family(spec)
                for algo in algos:
                    errs, elapsed = [], 0.0
                    for r in range(repeats):
                        t0 = time.perf_counter()
                        q, _ = _solve(family, algo, trials, _seeding.derive_seed(seed, 7, r))
                        elapsed += time.perf_counter() - t0
                        errs.append(np.sqrt(least_squares_measure(family, q)))
                    row = {"n": n, "d": d, "epsilon": float(eps), "algo": algo, "trials": trials,
                           "mean_err": float(np.mean(errs)), "median_err": float(np.median(errs))}
                    if timings:
                        row["mean_time_ms"] = 1e3 * elapsed / repeats
                    rows.append(row)
                    log.info("bench n=%d d=%d eps=%g %s mean_err=%.3g", n, d, eps, algo, row["mean_err"])
    return rows


def cmd_bench(args):
    if args.repeats < 1:
        raise UsageError("--repeats must be >= 1")
    algos = [args.algo] if args.algo else ["rjd", "drjd"]
    rows = bench_rows(args.n, args.d, args.epsilon, algos, args.trials, args.repeats, args.seed, args.timings)
    header = BENCH_HEADER + (("mean_time_ms",) if args.timings else ())
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_io.fmt(row[h]) if isinstance(row[h], float) else row[h] for h in header])
    _write(buf.getvalue(), args.out)
    return 0


def cmd_failprob(args):
    if args.repeats < 1:
        raise UsageError("--repeats must be >= 1")
    grid = synth.ExperimentGrid(n=args.n, d=args.d, epsilon=args.epsilon, L=args.trials, repeats=args.repeats,
                                r_values=args.r_values or synth.default_r_values(), seed=args.seed)
    rows = synth.failure_probability_experiment(grid)
    _write(synth.rows_to_csv(rows), args.out)
    slope, used = synth.loglog_slope(rows)
    log.info("log-log slope over R-1 in [10, 100]: %.3f (%d points)", slope, used)
    return 0


def cmd_bss(args):
    truth = None
    if args.demo:
        x, truth, _ = apps.demo_mixture(args.samples, seed=args.seed)
    elif args.signals is None:
        raise UsageError("give a signal CSV file or --demo")
    else:
        x = apps.load_signals(args.signals)
    if args.mixing is not None:
        truth = np.loadtxt(args.mixing, delimiter=",", ndmin=2)
    b = apps.bss_separate(x, args.probes, args.algo, args.trials, args.seed)
    doc = {"B": b}
    if truth is not None:
        doc["moreau_amari"] = moreau_amari(b @ truth)
        print(f"moreau_amari {_io.fmt(doc['moreau_amari'])}")
    if args.out is not None:
        Path(args.out).write_text(_io.dumps(doc, indent=2) + "\n", encoding="utf-8")
    return 0


def cmd_topics(args):
    if args.model is None:
        with resources.as_file(resources.files("rjdiag") / "data" / "example_topics.json") as p:
            model = apps.load_topic_model(p)
    else:
        model = apps.load_topic_model(args.model)
    m2, m3 = apps.topic_moments_exact(model)
    est = apps.topic_recover(m2, m3, model.k, args.algo, args.trials, args.seed)
    w_err, mu_err = apps.topic_errors(model, est)
    doc = {"omega": est.omega, "mu": est.m.T, "omega_error": w_err, "mu_error": mu_err,
           "max_error": max(w_err, mu_err)}
    print(f"max_error {_io.fmt(max(w_err, mu_err))}")
    if args.out is not None:
        Path(args.out).write_text(_io.dumps(doc, indent=2) + "\n", encoding="utf-8")
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="jd", description="Randomized joint diagonalization of symmetric matrix families.")
    p.add_argument("-v", "--verbose", action="count", default=0, help="more logging on stderr")
    sub = p.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    def common(sp, algo_default="rjd", algo=True):
        if algo:
            sp.add_argument("--algo", choices=("rjd", "drjd"), default=algo_default, help="joint diagonalizer")
        sp.add_argument("--trials", type=int, default=3, metavar="N", help="trials L per run (default 3)")
        sp.add_argument("--seed", type=_seed, default=DEFAULT_SEED, metavar="U64",
                        help=f"unsigned 64-bit seed (default {DEFAULT_SEED})")
        sp.add_argument("-o", "--out", metavar="PATH", help="output file (default stdout)")

    sp = sub.add_parser("run", help="jointly diagonalize a family file, write JSON")
    sp.add_argument("family", help="family JSON file")
    common(sp)
    sp.set_defaults(func=cmd_run)

    sp = sub.add_parser("bench", help="synthetic RJD/DRJD accuracy table as CSV")
    common(sp, algo_default=None)
    sp.add_argument("--n", type=_int_list, default=[10], metavar="N[,N...]", help="matrix sizes")
    sp.add_argument("--d", type=_int_list, default=[10], metavar="D[,D...]", help="family sizes")
    sp.add_argument("--epsilon", type=_float_list, default=[0.0, 1e-5, 1e-1], metavar="F[,F...]", help="noise levels")
    sp.add_argument("--repeats", type=int, default=100, metavar="N", help="runs per setting (default 100)")
    sp.add_argument("--timings", action="store_true", help="add a mean_time_ms column")
    sp.set_defaults(func=cmd_bench)

    sp = sub.add_parser("failprob", help="Monte-Carlo failure frequency of RJD vs R, as CSV")
    common(sp, algo=False)
    sp.set_defaults(trials=1)
    sp.add_argument("--n", type=int, default=10)
    sp.add_argument("--d", type=int, default=5)
    sp.add_argument("--epsilon", type=float, default=1e-5)
    sp.add_argument("--repeats", type=int, default=100_000)
    sp.add_argument("--r-values", type=_float_list, default=None, metavar="R[,R...]",
                    help="magnification factors R > 1 (default 1 + 10^(j/6), j = 0..12)")
    sp.set_defaults(func=cmd_failprob)

    sp = sub.add_parser("bss", help="blind source separation by cumulant joint diagonalization")
    sp.add_argument("signals", nargs="?", help="signal CSV (rows = samples, no header)")
    common(sp)
    sp.add_argument("--mixing", metavar="PATH", help="true mixing matrix CSV; reports the Moreau-Amari index")
    sp.add_argument("--probes", type=int, default=None, metavar="N", help="number of probe matrices (default n(n+1)/2)")
    sp.add_argument("--demo", action="store_true", help="separate a synthetic 4-channel mixture")
    sp.add_argument("--samples", type=int, default=100_000, metavar="T", help="demo sample count")
    sp.set_defaults(func=cmd_bss)

    sp = sub.add_parser("topics", help="single-topic model round trip from exact moments")
    sp.add_argument("model", nargs="?", help="topic model JSON (default: bundled example)")
    common(sp)
    sp.set_defaults(func=cmd_topics)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"jd: error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"jd: numerical failure: {exc}", file=sys.stderr)
        return 3
    except (OSError, ValueError) as exc:
        print(f"jd: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
