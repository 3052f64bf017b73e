"""Command-line front end.

Every run echoes its full configuration: CSV output starts with a
``# config: {...}`` line, JSON output carries a ``config`` key.  Feeding
that configuration back through :func:`config_to_argv` reproduces the run.
Exit status is 0 on success, 2 on bad arguments, 1 when a numeric routine
fails to converge.
"""
from __future__ import annotations

import argparse
import contextlib
import csv
import io
import json
import os
import sys
import warnings
from fractions import Fraction

import numpy as np

OUTPUT_DIR_ENV = "ODB_OUTPUT_DIR"
CONFIG_PREFIX = "# config: "


class ArgumentProblem(Exception):
    pass


def _probability(text):
    """Decimal or fraction string, kept as text so exact routes can read it exactly."""
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a probability: {text!r}")
    if not 0 < value < 1:
        raise argparse.ArgumentTypeError(f"probability must lie in (0, 1), got {text}")
    return text


def _prob_list(text):
    return [_probability(v) for v in text.split(",")]


def _common():
    # accepted before or after the subcommand; SUPPRESS keeps one position from clobbering the other
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--output", "-o", help=f"output file; relative names go under ${OUTPUT_DIR_ENV}")
    common.add_argument("--threads", type=int, help="worker threads for samplers (0 = auto)")
    return common


def build_parser():
    common = _common()
    parser = argparse.ArgumentParser(prog="odbgrowth", description=__doc__.splitlines()[0], parents=[common])
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name, help):
        return sub.add_parser(name, help=help, parents=[common])

    p = command("simulate", "height trace of one growth variant")
    p.add_argument("--variant", choices=("odb", "weak", "strict", "inhomogeneous"), default="odb")
    p.add_argument("--x", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--p", type=_probability, default="1/2")
    p.add_argument("--probs", type=_prob_list, help="comma-separated site probabilities (inhomogeneous)")
    p.add_argument("--seed", type=int, default=0)

    p = command("exact", "distribution of the height for an m x n lightcone")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=_probability, required=True)
    p.add_argument("--route", choices=("brute", "partition", "toeplitz", "fredholm"), default="partition")
    p.add_argument("--mode", choices=("odb", "weak", "strict"), default="odb",
                   help="path order (brute force only)")

    p = command("f2", "Tracy-Widom F2 and its density on a grid")
    p.add_argument("--s-min", type=float, default=-5.0)
    p.add_argument("--s-max", type=float, default=3.0)
    p.add_argument("--points", type=int, default=17)
    p.add_argument("--route", choices=("nystrom", "painleve"), default="nystrom")
    p.add_argument("--moments", action="store_true", help="emit mean, sd, skewness, kurtosis instead")

    p = command("critical-table", "limit law of h - m at the critical probability")
    p.add_argument("--max-dh", type=int, default=9)

    p = command("gue", "largest-eigenvalue laws of finite GUE")
    p.add_argument("action", choices=("cdf", "moments", "table2"))
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--s-min", type=float, default=-3.0)
    p.add_argument("--s-max", type=float, default=5.0)
    p.add_argument("--points", type=int, default=41)

    p = command("constants", "saddle-point constants for alpha = n/m and r = p/(1-p)")
    p.add_argument("--alpha", type=float, required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--r", type=float)
    group.add_argument("--p", type=_probability)
    p.add_argument("--m", type=int, help="size, for the critical scale S")

    p = command("mc", "Monte Carlo comparison with a limit law")
    p.add_argument("--regime", required=True,
                   choices=("universal", "critical", "deterministic", "finite_x", "brownian", "two_letter", "gue"))
    p.add_argument("--x", type=int, default=1)
    p.add_argument("--t", type=int, default=1000)
    p.add_argument("--p", type=_probability, default="1/2")
    p.add_argument("--N", type=int, default=10000)
    p.add_argument("--steps", type=int, default=10000)
    p.add_argument("--n", type=int, default=2, help="matrix size for --regime gue")
    p.add_argument("--bridge", action="store_true", help="exact in-step maxima for --regime brownian, x <= 1")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples-out", help="also write raw samples, one per line")

    p = command("rate", "large-deviation rate above the critical probability")
    p.add_argument("--p", type=_probability, required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--epsilon", type=float)
    group.add_argument("--m", type=int)
    p.add_argument("--n", type=int, help="with --m: epsilon from n = (1+eps)(1/p - 1) m")
    return parser


def _float_p(text):
    return float(Fraction(text))


def _csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow(row)
    return buf.getvalue()


def _num(v):
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return v


def run_simulate(a):
    from .growth import simulate

    if a.variant == "inhomogeneous":
        if not a.probs:
            raise ArgumentProblem("--variant inhomogeneous needs --probs")
        probs = [_float_p(v) for v in a.probs]
    else:
        probs = _float_p(a.p)
    trace = simulate(a.variant, a.x, a.t, probs, seed=a.seed)
    if a.format == "json":
        h = [[None if v == -np.inf else v for v in (trace(x, t) for t in range(a.t + 1))] for x in range(a.x + 1)]
        return {"heights": h}
    return trace.to_csv()


def run_exact(a):
    from .combinatorics import partition_sum_table
    from .exact import numeric_table
    from .paths import brute_force_cdf
    from .tables import as_fraction

    if a.mode != "odb" and a.route != "brute":
        raise ArgumentProblem("--mode applies to the brute-force route only")
    if a.route == "brute":
        table = brute_force_cdf(a.m, a.n, as_fraction(a.p), mode=a.mode)
    elif a.route == "partition":
        table = partition_sum_table(a.m, a.n, as_fraction(a.p))
    else:
        table = numeric_table(a.m, a.n, _float_p(a.p), route=a.route)
        table.p = as_fraction(a.p)
    if a.format == "csv":
        return _csv_text(["h", "prob"], ([h, _num(v)] for h, v in sorted(table.cdf.items())))
    return table.to_dict()


def run_f2(a):
    from .asymptotics import f2_moments
    from .asymptotics.report import f2_rows

    if a.moments:
        mo = f2_moments()
        d = {"mean": mo.mean, "variance": mo.variance, "sd": mo.sd,
             "skewness": mo.skewness, "excess_kurtosis": mo.excess_kurtosis}
        if a.format == "csv":
            return _csv_text(list(d), [[_num(v) for v in d.values()]])
        return d
    grid = np.linspace(a.s_min, a.s_max, a.points)
    rows = [[_num(v) for v in row] for row in f2_rows(grid, a.route)]
    if a.format == "json":
        return {"rows": [{"s": s, "F2": c, "f2": d} for s, c, d in rows]}
    return _csv_text(["s", "F2(s)", "f2(s)"], rows)


def run_critical(a):
    from .asymptotics import critical_prob

    rows = [[dh, _num(critical_prob(dh))] for dh in range(a.max_dh + 1)]
    if a.format == "json":
        return {"rows": [{"dh": dh, "prob": v} for dh, v in rows]}
    return _csv_text(["dh", "prob"], rows)


def run_gue(a):
    from .asymptotics import gue_cdf, gue_density, gue_moment
    from .asymptotics.report import gue_table_rows

    if a.action == "cdf":
        s = np.linspace(a.s_min, a.s_max, a.points)
        rows = [[_num(x), _num(c), _num(d)] for x, c, d in zip(s, gue_cdf(a.n, s), gue_density(a.n, s))]
        header = ["s", "F(s)", "f(s)"]
    elif a.action == "moments":
        rows = [[j, _num(gue_moment(a.n, j))] for j in range(1, 5)]
        header = ["j", "moment"]
    else:
        rows = [[_num(v) for v in row] for row in gue_table_rows()]
        header = ["n", "mean", "var", "skew", "kurt", "approx_mean", "approx_var"]
    if a.format == "json":
        return {"rows": [dict(zip(header, row)) for row in rows]}
    return _csv_text(header, rows)


def run_constants(a):
    from .asymptotics import regime_constants

    r = a.r if a.r is not None else _float_p(a.p) / (1 - _float_p(a.p))
    rc = regime_constants(a.alpha, r, a.m)
    d = rc.to_dict()
    d["regime"] = "critical" if abs(a.alpha * r - 1) < 1e-12 else ("subcritical" if rc.subcritical else "deterministic")
    if a.format == "csv":
        return _csv_text(["name", "value"], ([k, _num(v)] for k, v in d.items()))
    return d


def run_mc(a):
    from . import montecarlo as mc
    from .asymptotics import gue_cdf

    p = _float_p(a.p)
    if a.regime in mc.REGIMES:
        report = mc.regime_report(a.regime, {"x": a.x, "t": a.t, "p": p}, a.N, a.seed)
        samples = None
    else:
        if a.regime == "brownian":
            samples = mc.sample_brownian_m(a.x, a.steps, a.N, a.seed, bridge=a.bridge)
            theory = (lambda s: gue_cdf(a.x + 1, s)) if a.x + 1 <= 12 else None
        elif a.regime == "two_letter":
            samples = mc.sample_two_letter(a.N, a.steps, a.seed)
            theory = mc.two_letter_cdf
        else:
            samples = mc.sample_gue_max_eig(a.n, a.N, a.seed)
            theory = lambda s: gue_cdf(a.n, s)
        report = {"regime": a.regime, "params": samples.meta, "N": a.N,
                  "mean": samples.mean(), "ks": mc.ks_distance(samples, theory) if theory else None}
    if a.samples_out:
        if samples is None:
            raise ArgumentProblem("--samples-out is available for brownian, two_letter and gue")
        with open(_output_path(a.samples_out), "w", encoding="utf-8", newline="\n") as fh:
            fh.write(samples.to_lines())
    if a.format == "csv":
        flat = {k: v for k, v in report.items() if not isinstance(v, (dict, list))}
        return _csv_text(list(flat), [[_num(v) for v in flat.values()]])
    return report


def run_rate(a):
    from .asymptotics import epsilon_for, rate_gamma

    p = _float_p(a.p)
    if a.epsilon is not None:
        eps = a.epsilon
    else:
        if a.n is None:
            raise ArgumentProblem("--m needs --n")
        eps = epsilon_for(a.m, a.n, p)
    d = {"epsilon": eps, "p": p, "gamma": rate_gamma(eps, p)}
    if a.format == "csv":
        return _csv_text(list(d), [[_num(v) for v in d.values()]])
    return d


HANDLERS = {
    "simulate": run_simulate, "exact": run_exact, "f2": run_f2, "critical-table": run_critical,
    "gue": run_gue, "constants": run_constants, "mc": run_mc, "rate": run_rate,
}
JSON_DEFAULT = {"exact", "constants", "mc", "rate"}


def _config(args):
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("output", "threads")}


def config_to_argv(config):
    """Rebuild an argument list from an echoed configuration."""
    config = dict(config)
    argv = ["--format", config.pop("format")]
    command = config.pop("command")
    argv.append(command)
    if command == "gue":
        argv.append(config.pop("action"))
    for key, value in config.items():
        flag = "--" + key.replace("_", "-") if key not in ("N",) else "--N"
        if key == "samples_out":
            flag = "--samples-out"
        if value is None or value is False:
            continue
        if value is True:
            argv.append(flag)
        elif isinstance(value, list):
            argv += [flag, ",".join(str(v) for v in value)]
        else:
            argv += [flag, str(value)]
    return argv


def read_config(text):
    """Configuration echoed at the top of a CSV or inside a JSON document."""
    if text.startswith(CONFIG_PREFIX):
        return json.loads(text.splitlines()[0][len(CONFIG_PREFIX):])
    return json.loads(text)["config"]


def render(args, result):
    config = _config(args)
    if isinstance(result, str):
        return CONFIG_PREFIX + json.dumps(config, sort_keys=True) + "\n" + result
    return json.dumps({"config": config, **result}, indent=2, default=_num) + "\n"


def _output_path(name):
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not os.path.isabs(name):
        os.makedirs(base, exist_ok=True)
        return os.path.join(base, name)
    return name


def _set_threads(threads):
    if threads > 0:
        import numba

        numba.set_num_threads(min(threads, numba.config.NUMBA_NUM_THREADS))


def dispatch(argv=None, stdout=None, stderr=None):
    from .exact import ConvergenceError
    from .montecarlo import JacobiError

    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        with contextlib.redirect_stderr(stderr), contextlib.redirect_stdout(stdout):
            args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "format", None) is None:
        args.format = "json" if args.command in JSON_DEFAULT else "csv"
    args.output = getattr(args, "output", None)
    args.threads = getattr(args, "threads", 0)
    _set_threads(args.threads)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            text = render(args, HANDLERS[args.command](args))
    except (ConvergenceError, JacobiError) as exc:
        print(f"error: {exc}", file=stderr)
        return 1
    except (ArgumentProblem, ValueError, TypeError) as exc:
        parser.print_usage(stderr)
        print(f"error: {exc}", file=stderr)
        return 2
    if args.output:
        with open(_output_path(args.output), "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return 0


def main():
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
