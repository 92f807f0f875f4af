"""``fblkit`` command line: analyze, bounds, simulate, lln, spec.

CSV goes out with a header row and 12 significant digits; JSON carries a
top-level ``"schema": 1``. Errors exit non-zero with one JSON record on stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings

import numpy as np

from ..bounds import (
    BoundInputs,
    CodeParameters,
    NegativeRateWarning,
    delta_schedule,
    evaluate_ensemble_bound,
    normal_approx_error,
    normal_approx_rate,
    normal_approx_rate_asymptotic,
)
from ..channel import InputDistribution
from ..errors import FblkitError, InfeasibleSlackError, InstanceTooLargeError, SpecParseError
from ..measures import capacity, channel_statistics
from ..montecarlo import (
    TiePolicy,
    density_tail_probability,
    enumerate_ensemble,
    exact_ensemble_error,
    lln_experiment,
    simulate,
    union_bound_average,
)
from .specfile import format_spec, load_spec

SCHEMA = 1
BOUNDS_COLUMNS = ["n", "R", "eps", "delta", "eq6", "eq7", "eq8", "eq9", "exponent", "clipped"]
LLN_COLUMNS = ["n", "prob", "trials"]


class UsageError(FblkitError):
    pass


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.12g}"


def _grid(text, kind=float):
    try:
        a, b, step = (kind(t) for t in text.split(":"))
    except ValueError:
        raise UsageError(f"grid must look like a:b:step, got {text!r}") from None
    if step <= 0 or b < a:
        raise UsageError(f"grid {text!r} needs step > 0 and b >= a")
    count = int(math.floor((b - a) / step + 1e-9)) + 1
    return [a + k * step for k in range(count)]


def _input_dist(spec, text):
    ch = spec.channel
    if text in (None, "uniform"):
        return InputDistribution.uniform(ch.input_size)
    if text == "optimal":
        return capacity(ch).optimal_input
    try:
        probs = [float(t) for t in text.split(",")]
    except ValueError:
        raise UsageError(f"--input-dist must be uniform, optimal or p0,p1,...; got {text!r}") from None
    return InputDistribution(probs)


def _delta(text, n):
    if text in (None, "auto"):
        return delta_schedule(n)
    try:
        d = float(text)
    except ValueError:
        raise UsageError(f"--delta must be a number or 'auto', got {text!r}") from None
    if not d > 0:
        raise UsageError("--delta must be positive")
    return d


def _open_out(path):
    if path in (None, "-"):
        return sys.stdout, False
    return open(path, "w", newline=""), True


def _write(path, text):
    fh, close = _open_out(path)
    try:
        fh.write(text)
    finally:
        if close:
            fh.close()


def _write_csv(path, header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    _write(path, buf.getvalue())


def _dump_json(path, record):
    _write(path, json.dumps(record, indent=2) + "\n")


def _channel_record(spec, px):
    return {
        "name": spec.name,
        "matrix": spec.channel.transition.tolist(),
        "input_distribution": px.probs.tolist(),
    }


def _note(record):
    print(json.dumps(record), file=sys.stderr)


# subcommands

def cmd_analyze(args):
    spec = load_spec(args.channel)
    px = _input_dist(spec, args.input_dist)
    st = channel_statistics(spec.channel, px)
    cap = capacity(spec.channel)
    rows = [
        ("channel", spec.name),
        ("input distribution", " ".join(f"{p:.6g}" for p in px.probs)),
        ("I (bits/use)", f"{st.mutual_information:.12g}"),
        ("V (bits^2/use)", f"{st.dispersion:.12g}"),
        ("H(Y) (bits)", f"{st.entropy_output:.12g}"),
        ("C (bits/use)", f"{cap.capacity:.12g}"),
        ("optimal input", " ".join(f"{p:.6g}" for p in cap.optimal_input.probs)),
    ]
    width = max(len(k) for k, _ in rows)
    if args.json != "-":
        for k, v in rows:
            print(f"{k:<{width}}  {v}")
    if args.json:
        _dump_json(args.json, {
            "schema": SCHEMA,
            "command": "analyze",
            "channel": _channel_record(spec, px),
            "mutual_information": st.mutual_information,
            "dispersion": st.dispersion,
            "entropy_output": st.entropy_output,
            "capacity": cap.capacity,
            "capacity_gap": cap.final_gap,
            "capacity_iterations": cap.iterations,
            "optimal_input": cap.optimal_input.probs.tolist(),
        })
    return 0


def bounds_rows(spec, px, eps, points, delta_text, fixed_rate=None):
    """One row per (n, R) grid point; ``R=None`` means "use the normal-approximation rate"."""
    st = channel_statistics(spec.channel, px)
    for row_index, (n, rate) in enumerate(points):
        delta = _delta(delta_text, n)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", NegativeRateWarning)
            try:
                na_rate = normal_approx_rate(n, eps, st, delta)
            except InfeasibleSlackError as exc:
                na_rate = None
                _note({"warning": "InfeasibleSlackError", "row": row_index, "n": n,
                       "message": str(exc)})
        na_asym = normal_approx_rate_asymptotic(n, eps, st)
        if rate is None:
            rate = fixed_rate if fixed_rate is not None else (na_rate if na_rate is not None else na_asym)
        ens = na_error = exponent = clipped = None
        try:
            params = CodeParameters(n, rate)
        except FblkitError as exc:
            _note({"warning": type(exc).__name__, "row": row_index, "n": n, "message": str(exc)})
        else:
            inputs = BoundInputs(st, delta, eps)
            b = evaluate_ensemble_bound(params, inputs)
            ens, exponent, clipped = b.value, b.exponent, b.clipped
            na_error = normal_approx_error(params, inputs)
        yield [n, rate, eps, delta, ens, na_error, na_rate, na_asym, exponent, clipped]


def cmd_bounds(args):
    spec = load_spec(args.channel)
    px = _input_dist(spec, args.input_dist)
    if not 0 < args.eps < 1:
        raise UsageError("--eps must lie in (0, 1)")
    if args.n_grid:
        ns = [int(round(v)) for v in _grid(args.n_grid, int)]
        if ns[0] < 1:
            raise UsageError("blocklengths must be >= 1")
        points = [(n, None) for n in ns]
    else:
        if args.n is None:
            raise UsageError("--rate-grid needs --n")
        points = [(args.n, r) for r in _grid(args.rate_grid)]
    rows = list(bounds_rows(spec, px, args.eps, points, args.delta, args.rate))
    _write_csv(args.csv, BOUNDS_COLUMNS, rows)
    return 0


def simulate_record(spec, px, n, rate, trials, seed, tie_policy, delta_text, exact, threads=None,
                    fixed_codebook=False):
    ch = spec.channel
    params = CodeParameters(n, rate)
    policy = TiePolicy(tie_policy)
    run = simulate(ch, px, params, trials, seed, threads=threads, fixed_codebook=fixed_codebook)
    reports = {p.value: run.report(p).to_dict() for p in TiePolicy}
    primary = reports[policy.value]

    st = channel_statistics(ch, px)
    delta = _delta(delta_text, n)
    threshold = st.mutual_information - delta
    try:
        lln_eps = density_tail_probability(ch, px, n, threshold, strict=True)
        eps_source = "exact"
    except InstanceTooLargeError:
        lln_eps = float(np.mean(run.densities / n < threshold))
        eps_source = "empirical"
    exponent = -n * (st.mutual_information - delta - rate)
    if 0 < lln_eps < 1:
        b = evaluate_ensemble_bound(params, BoundInputs(st, delta, lln_eps))
        ens, clipped = b.value, b.clipped
    else:
        # epsilon -> 0+ limit of the same expression
        raw = lln_eps + (2.0 ** exponent if exponent < 1024 else math.inf)
        ens, clipped = min(raw, 1.0), raw >= 1.0
    M = params.num_codewords
    table = None
    if exact:
        table = enumerate_ensemble(ch, px, n)
        union_rate = union_bound_average(table, 2.0 ** (n * rate))
        union_comp = union_bound_average(table, M - 1)
        union_source = "exact"
    else:
        dens = run.densities
        with np.errstate(over="ignore"):
            union_rate = float(np.mean(np.minimum(1.0, np.exp2(n * rate - dens))))
            union_comp = float(np.mean(np.minimum(1.0, (M - 1) * np.exp2(-dens))))
        union_source = "empirical"

    half = 0.5 * (primary["ci_high"] - primary["ci_low"])
    record = {
        "schema": SCHEMA,
        "command": "simulate",
        "channel": _channel_record(spec, px),
        "n": n,
        "rate": rate,
        "num_codewords": M,
        "trials": run.trials,
        "seed": int(seed),
        "tie_policy": policy.value,
        "fixed_codebook": bool(fixed_codebook),
        "report": primary,
        "reports": reports,
        "bounds": {
            "mutual_information": st.mutual_information,
            "dispersion": st.dispersion,
            "delta": delta,
            "lln_epsilon": lln_eps,
            "lln_epsilon_source": eps_source,
            "union_bound_rate": union_rate,
            "union_bound_competitors": union_comp,
            "union_bound_source": union_source,
            "ensemble_bound": ens,
            "ensemble_bound_exponent": exponent,
            "ensemble_bound_clipped": bool(clipped),
            # the normal-approximation error does not depend on epsilon
            "normal_approx_error": normal_approx_error(params, BoundInputs(st, delta, 0.5)),
        },
        "checks": {
            "ensemble_bound_applicable": rate < st.mutual_information - delta,
            "p_hat_le_ensemble_bound_plus_half_width": primary["p_hat"] <= ens + half,
            "p_hat_le_union_bound_plus_half_width": primary["p_hat"] <= union_comp + half,
        },
    }
    if exact:
        ex = {}
        for p in TiePolicy:
            value = exact_ensemble_error(ch, px, n, M, p, table=table)
            r = reports[p.value]
            ex[p.value] = {
                "value": value,
                "within_half_width": abs(r["p_hat"] - value) <= 0.5 * (r["ci_high"] - r["ci_low"]),
            }
        record["exact"] = ex
    return record


def cmd_simulate(args):
    spec = load_spec(args.channel)
    px = _input_dist(spec, args.input_dist)
    record = simulate_record(spec, px, args.n, args.rate, args.trials, args.seed, args.tie_policy,
                             args.delta, args.exact, threads=args.threads,
                             fixed_codebook=args.fixed_codebook)
    _dump_json(args.json, record)
    return 0


def cmd_lln(args):
    spec = load_spec(args.channel)
    px = _input_dist(spec, args.input_dist)
    try:
        ns = [int(t) for t in args.n_list.split(",")]
    except ValueError:
        raise UsageError(f"--n-list must be comma-separated integers, got {args.n_list!r}") from None
    report = lln_experiment(spec.channel, px, ns, args.delta, args.trials, args.seed,
                            threads=args.threads)
    _write_csv(args.csv, LLN_COLUMNS, [[r.n, r.prob, r.trials] for r in report.rows])
    return 0


def cmd_spec(args):
    _write(args.output, format_spec(load_spec(args.channel)))
    return 0


def build_parser():
    p = argparse.ArgumentParser(
        prog="fblkit",
        description="Finite-blocklength achievability bounds for discrete memoryless channels "
        "(all quantities in bits).",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("channel", help="spec file or named channel: bsc:p, bec:e, zchannel:p, identity:k")
        sp.add_argument("--input-dist", default="uniform",
                        help="uniform (default), optimal, or comma-separated probabilities")
        return sp

    a = common(sub.add_parser("analyze", help="I, V, H(Y) and capacity"))
    a.add_argument("--json", help="also write a JSON record ('-' for stdout only)")
    a.set_defaults(func=cmd_analyze)

    b = common(sub.add_parser("bounds", help="CSV of the closed-form bounds over a grid"))
    b.add_argument("--eps", type=float, required=True)
    g = b.add_mutually_exclusive_group(required=True)
    g.add_argument("--n-grid", help="a:b:step over blocklengths")
    g.add_argument("--rate-grid", help="a:b:step over rates (needs --n)")
    b.add_argument("--n", type=int)
    b.add_argument("--rate", type=float,
                   help="fixed rate for --n-grid (default: the normal-approximation rate at each n)")
    b.add_argument("--delta", default="auto", help="slack in bits or 'auto' (n^-3/4)")
    b.add_argument("--csv", default="-")
    b.set_defaults(func=cmd_bounds)

    s = common(sub.add_parser("simulate", help="random-coding Monte Carlo with ML decoding"))
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--rate", type=float, required=True)
    s.add_argument("--trials", type=int, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--tie-policy", choices=[t.value for t in TiePolicy], default="ties-error")
    s.add_argument("--delta", default="auto", help="slack for the ensemble-bound comparison")
    s.add_argument("--exact", action="store_true", help="add the exact ensemble oracle")
    s.add_argument("--fixed-codebook", action="store_true",
                   help="reuse one codebook (not the ensemble quantity the bounds cover)")
    s.add_argument("--threads", type=int, help="worker threads (capped by FBLKIT_THREADS)")
    s.add_argument("--json", default="-")
    s.set_defaults(func=cmd_simulate)

    l = common(sub.add_parser("lln", help="empirical Pr{i/n <= I - delta} over blocklengths"))
    l.add_argument("--n-list", required=True)
    l.add_argument("--delta", type=float, required=True)
    l.add_argument("--trials", type=int, required=True)
    l.add_argument("--seed", type=int, required=True)
    l.add_argument("--threads", type=int)
    l.add_argument("--csv", default="-")
    l.set_defaults(func=cmd_lln)

    sp = sub.add_parser("spec", help="print the spec file for a channel")
    sp.add_argument("channel")
    sp.add_argument("-o", "--output", default="-")
    sp.set_defaults(func=cmd_spec)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FblkitError as exc:
        record = {"error": type(exc).__name__, "message": str(exc)}
        if isinstance(exc, SpecParseError):
            record.update(line=exc.line, column=exc.column)
        _note(record)
        return 1
    except OSError as exc:
        _note({"error": type(exc).__name__, "message": str(exc)})
        return 1
