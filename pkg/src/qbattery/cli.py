"""Command-line entry point: ``qbattery {evolve,sweep,fit,analytic,compare}``.

Tables are CSV with a ``#``-prefixed JSON header line holding the full
configuration, or JSON objects with ``config`` and ``rows`` keys.  Exit codes:
0 success, 1 validation or domain error, 2 I/O error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys

import numpy as np

from . import __version__, analytic, dynamics, scaling
from .dicke import InitialState, ModelParams, optimal_bath_occupations
from .errors import ConvergenceError, DomainError

EXIT_OK, EXIT_INVALID, EXIT_IO = 0, 1, 2

PARAM_FLAGS = {"A": "A", "B": "B", "h": "h", "delta": "delta", "NB": "N_B", "N": "N"}


class ValidationError(Exception):
    def __init__(self, field, message):
        self.field = field
        self.message = message
        super().__init__(f"{field}: {message}")


def fmt(x):
    """17 significant digits; bit-faithful for doubles."""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def parse_int_list(text):
    """``"1:40"`` (inclusive), ``"1,2,5"`` or a mix such as ``"1:3,10"``."""
    out = []
    for part in str(text).split(","):
        part = part.strip()
        if not part:
            continue
        if ":" in part:
            lo, hi = part.split(":", 1)
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    if not out:
        raise ValueError("empty list")
    return out


def parse_range(text):
    lo, hi = str(text).split(":", 1)
    return int(lo), int(hi)


def read_config_file(path):
    """``key=value`` lines; ``#`` starts a comment."""
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValidationError("config", f"line {lineno}: expected key=value")
            key, value = (s.strip() for s in line.split("=", 1))
            values[key.lstrip("-").replace("-", "_")] = value
    return values


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("model")
    g.add_argument("--A", type=float, default=1.0, help="flip-flop coupling")
    g.add_argument("--B", type=float, default=1.0, help="battery field")
    g.add_argument("--h", type=float, default=1.0, help="charger field")
    g.add_argument("--delta", type=float, default=0.0, help="Ising anisotropy")
    g.add_argument("--NB", default="1", help="battery spins (list/range for sweep)")
    g.add_argument("--N", default=None, help="bath spins (list/range for sweep)")
    g.add_argument("--m0", type=int, default=0, help="initial battery excitations")
    g.add_argument("--n0", type=int, default=None, help="initial bath excitations")
    g.add_argument("--rule", choices=scaling.RULES, default=None,
                   help="initial bath occupation rule")
    r = common.add_argument_group("run")
    r.add_argument("--horizon", type=float, default=None)
    r.add_argument("--samples", type=int, default=dynamics.DEFAULT_SAMPLES)
    r.add_argument("--refine", type=float, default=None)
    r.add_argument("--range", default=None, help="N_B fit window LO:HI")
    r.add_argument("--format", choices=("csv", "json"), default="csv")
    r.add_argument("--out", default=None, help="output path (stdout if omitted)")
    r.add_argument("--jobs", type=int, default=None,
                   help="worker processes for sweep (default: all CPUs)")
    r.add_argument("--config", default=None, help="key=value config file")

    parser = argparse.ArgumentParser(
        prog="qbattery", description=__doc__.splitlines()[0]
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    subs = {}
    subs["evolve"] = sub.add_parser("evolve", parents=[common],
                                    help="time series of one charging run")
    subs["sweep"] = sub.add_parser("sweep", parents=[common],
                                   help="E_max/P_max table over (N_B, N)")
    p = subs["fit"] = sub.add_parser("fit", parents=[common],
                                     help="power-law fit of a sweep table")
    p.add_argument("table", help="table written by 'sweep'")
    p.add_argument("--post-kink", dest="post_kink", action="store_true", default=None,
                   help="keep only N_B > N (default for rule n=N tables)")
    p.add_argument("--no-post-kink", dest="post_kink", action="store_false")
    for name, oracles in (("analytic", ("constants", "single-spin", "tc", "single-bath")),
                          ("compare", ("single-spin", "tc", "single-bath"))):
        p = subs[name] = sub.add_parser(name, parents=[common],
                           help="closed-form report" if name == "analytic"
                           else "numeric vs closed-form deviation")
        p.add_argument("--oracle", choices=oracles, default=oracles[0])
    return parser, subs


def parse_args(argv):
    """Parse ``argv``; ``--config`` values become defaults so flags override them."""
    parser, subs = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        try:
            values = read_config_file(args.config)
        except OSError as exc:
            raise IOError(f"cannot read config {args.config}: {exc}") from exc
        defaults = {}
        for key, text in values.items():
            if key in ("config", "command") or not hasattr(args, key):
                raise ValidationError(key, "unknown config key")
            defaults[key] = _coerce(key, text)
        subs[args.command].set_defaults(**defaults)
        args = parser.parse_args(argv)
    return args


_TYPES = {"A": float, "B": float, "h": float, "delta": float, "m0": int, "n0": int,
          "horizon": float, "samples": int, "refine": float, "jobs": int}


def _coerce(key, text):
    conv = _TYPES.get(key)
    if conv is None:
        if key == "post_kink":
            return text.lower() in ("1", "true", "yes")
        return text
    try:
        return conv(text)
    except ValueError:
        raise ValidationError(key, f"cannot parse {text!r}") from None


def _single_int(args, flag):
    if getattr(args, flag) is None:
        raise ValidationError(flag, "required")
    try:
        values = parse_int_list(getattr(args, flag))
    except ValueError:
        raise ValidationError(flag, f"not an integer: {getattr(args, flag)!r}") from None
    if len(values) != 1:
        raise ValidationError(flag, "this command takes a single value")
    return values[0]


def model_params(args, N_B=None, N=None):
    kw = dict(A=args.A, B=args.B, h=args.h, delta=args.delta,
              N_B=N_B if N_B is not None else _single_int(args, "NB"),
              N=N if N is not None else _single_int(args, "N"))
    try:
        return ModelParams(**kw)
    except DomainError as exc:
        field = str(exc).split(" ", 1)[0]
        flag = {v: k for k, v in PARAM_FLAGS.items()}.get(field, field)
        raise ValidationError(flag, str(exc)) from None


def initial_for(args, params):
    rule = args.rule or ("explicit" if args.n0 is not None else "n=N")
    try:
        init = scaling.initial_state(rule, params.N_B, params.N, args.m0, args.n0)
        return init.validate(params), rule
    except DomainError as exc:
        field = "m0" if str(exc).startswith("m=") else "n0"
        raise ValidationError(field, str(exc)) from None


def config_record(args, **extra):
    keys = ["A", "B", "h", "delta", "NB", "N", "m0", "n0", "rule", "horizon",
            "samples", "refine", "range", "format", "jobs"]
    rec = {"command": args.command}
    rec.update({k: getattr(args, k, None) for k in keys})
    for k in ("oracle", "table", "post_kink"):
        if hasattr(args, k):
            rec[k] = getattr(args, k)
    rec.update(extra)
    return rec


def _json_value(x):
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else None
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, dict):
        return {k: _json_value(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_json_value(v) for v in x]
    return x


def render_table(header, columns, rows, fmt_name):
    if fmt_name == "json":
        doc = {"config": _json_value(header),
               "rows": [dict(zip(columns, _json_value(list(r)))) for r in rows]}
        return json.dumps(doc, indent=1) + "\n"
    buf = io.StringIO()
    buf.write("# " + json.dumps(_json_value(header), sort_keys=True) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([fmt(v) for v in r])
    return buf.getvalue()


def render_report(header, report, fmt_name):
    if fmt_name == "json":
        return json.dumps({"config": _json_value(header),
                           "report": _json_value(report)}, indent=1) + "\n"
    lines = ["# " + json.dumps(_json_value(header), sort_keys=True)]
    lines += [f"{k} = {fmt(v)}" for k, v in report.items()]
    return "\n".join(lines) + "\n"


def emit(text, out):
    if out is None:
        sys.stdout.write(text)
        return
    with open(out, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def read_table(path):
    """Parse a sweep table (CSV or JSON) into ``(config, rows)``."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    stripped = text.lstrip()
    if stripped.startswith("{"):
        doc = json.loads(text)
        config, records = doc.get("config", {}), doc["rows"]
    else:
        lines = text.splitlines()
        config = {}
        if lines and lines[0].startswith("#"):
            config = json.loads(lines[0][1:])
            lines = lines[1:]
        records = list(csv.DictReader(lines))

    def num(v):
        return float("nan") if v in (None, "", "nan") else float(v)

    rows = []
    for rec in records:
        rows.append(scaling.SweepRow(
            N_B=int(rec["N_B"]), N=int(rec["N"]), n0=int(rec["n0"]), m0=int(rec["m0"]),
            E_max=num(rec["E_max"]), P_max=num(rec["P_max"]),
            t_at_Pmax=num(rec["t_at_Pmax"]), rule=rec.get("rule") or "explicit",
            error=rec.get("error") or "",
        ))
    return config, rows


SWEEP_COLUMNS = ["N", "N_B", "rule", "m0", "n0", "E_max", "P_max", "t_at_Pmax", "error"]


def cmd_evolve(args):
    params = model_params(args)
    init, rule = initial_for(args, params)
    defaults = []
    horizon = args.horizon
    if horizon is None:
        horizon = dynamics.default_horizon(params)
        defaults.append("horizon")
    refine = args.refine
    if refine is None:
        refine = dynamics.default_refine(params)
        defaults.append("refine")
    series = dynamics.run(params, init, horizon=horizon, samples=args.samples)
    summary = dynamics.summarize(series, refine)
    columns = ["t", "dE_B", "E_C_minus_E_C0", "E_I", "P_B"]
    cols = [series.times, series.dE_B, series.E_C - series.E_C0, series.E_I, series.power]
    if params.N_B == 1 and init.m == 0 and init.n >= 1:
        omega = analytic.single_spin_rabi(params, init.n).omega_n
        columns.append("omega_half_t")
        cols.append(omega * series.times / 2)
    header = config_record(args, rule=rule, n0=init.n, horizon=horizon, refine=refine,
                           defaults_applied=defaults, summary=vars(summary).copy())
    emit(render_table(header, columns, zip(*cols), args.format), args.out)
    return EXIT_OK


def cmd_sweep(args):
    try:
        NB_list = parse_int_list(args.NB)
    except ValueError:
        raise ValidationError("NB", f"bad list {args.NB!r}") from None
    try:
        N_list = parse_int_list(args.N)
    except ValueError:
        raise ValidationError("N", f"bad list {args.N!r}") from None
    template = model_params(args, N_B=max(1, min(NB_list)), N=max(1, min(N_list)))
    for flag, values in (("NB", NB_list), ("N", N_list)):
        if min(values) < 1:
            raise ValidationError(flag, "sizes must be >= 1")
    rule = args.rule or ("explicit" if args.n0 is not None else "n=N")
    if rule == "explicit" and args.n0 is None:
        raise ValidationError("n0", "rule 'explicit' needs --n0")
    if args.samples < 2:
        raise ValidationError("samples", "must be >= 2")
    jobs = args.jobs if args.jobs is not None else (os.cpu_count() or 1)
    rows = scaling.sweep(template, NB_list, N_list, rule=rule, m0=args.m0, n0=args.n0,
                         horizon=args.horizon, samples=args.samples, refine=args.refine,
                         jobs=jobs)
    header = config_record(args, rule=rule)
    header["jobs"] = None  # parallelism does not affect results
    table = [(r.N, r.N_B, r.rule, r.m0, r.n0, r.E_max, r.P_max, r.t_at_Pmax, r.error)
             for r in rows]
    emit(render_table(header, SWEEP_COLUMNS, table, args.format), args.out)
    return EXIT_OK


def cmd_fit(args):
    try:
        config, rows = read_table(args.table)
    except OSError as exc:
        raise IOError(f"cannot read table {args.table}: {exc}") from exc
    except (ValueError, KeyError) as exc:
        raise ValidationError("table", f"unusable table: {exc}") from None
    fit_range = None
    if args.range:
        try:
            fit_range = parse_range(args.range)
        except ValueError:
            raise ValidationError("range", f"expected LO:HI, got {args.range!r}") from None
    N = _single_int(args, "N") if args.N is not None else None
    post_kink = args.post_kink
    if post_kink is None:
        post_kink = bool(rows) and all(r.rule == "n=N" for r in rows)
    try:
        fit = scaling.fit_power_law(rows, fit_range, N=N, post_kink=post_kink)
    except DomainError as exc:
        raise ValidationError("table", str(exc)) from None
    report = {"alpha": fit.alpha, "beta": fit.beta, "residual": fit.residual,
              "rows_used": fit.rows_used, "excluded": fit.excluded, "N": fit.N,
              "range_lo": fit.fit_range[0], "range_hi": fit.fit_range[1],
              "post_kink": post_kink}
    header = config_record(args, source_config=config)
    text = render_report(header, report, args.format)
    if args.out:
        emit(text, args.out)
        sys.stdout.write(render_report(header, report, "csv"))
    else:
        emit(text, None)
    return EXIT_OK


def _analytic_report(args):
    oracle = args.oracle
    x_star, c_star = analytic.sinc_sq_max()
    rep = {"x_star": x_star, "c_star": c_star}
    if oracle == "constants":
        rep["c_star_rounded"] = analytic.rounded_peak_coefficient()
        return rep
    params = model_params(args)
    if oracle == "single-spin":
        n = args.n0 if args.n0 is not None else params.N
        try:
            r = analytic.single_spin_rabi(params, n)
            s = analytic.single_spin_summary(params, n)
        except DomainError as exc:
            raise ValidationError("NB" if params.N_B != 1 else "n0", str(exc)) from None
        rep.update(n0=n, delta_n=r.delta_n, omega_n=r.omega_n, b=r.b,
                   E_max=s.E_max, t_at_Emax=s.t_at_Emax,
                   P_max=s.P_max, t_at_Pmax=s.t_at_Pmax)
        if params.B == params.h and params.delta == 0.0:
            rep["tau_min"] = analytic.tau_min(params, n)
        rep["fastest_n"] = ",".join(str(k) for k in optimal_bath_occupations(params.N))
        return rep
    if oracle == "tc":
        init, _ = initial_for(args, params)
        P, t_star = analytic.tc_pmax(params, init)
        g = abs(params.A) * math.sqrt(params.N_B * params.N)
        rep.update(m0=init.m, n0=init.n, P_max=P, t_at_Pmax=t_star,
                   E_max=params.B * (init.n - init.m),
                   t_at_Emax=math.pi / (2 * g) if g else 0.0,
                   exponent=1.5, beta=analytic.tc_beta(params.N),
                   beta_rounded_coefficient=analytic.tc_beta(
                       params.N, analytic.rounded_peak_coefficient()))
        return rep
    m = args.m0
    try:
        P, t_star = analytic.single_bath_summary(params, m)
    except DomainError as exc:
        raise ValidationError("N" if params.N != 1 else "m0", str(exc)) from None
    rep.update(m0=m, P_max=P, t_at_Pmax=t_star)
    return rep


def cmd_analytic(args):
    rep = _analytic_report(args)
    emit(render_report(config_record(args), rep, args.format), args.out)
    return EXIT_OK


def _deviation(numeric, exact):
    numeric = np.atleast_1d(np.asarray(numeric, dtype=float))
    exact = np.atleast_1d(np.asarray(exact, dtype=float))
    diff = np.abs(numeric - exact)
    scale = np.abs(exact)
    rel = np.where(diff == 0.0, 0.0, diff / np.where(scale > 0, scale, np.inf))
    return float(diff.max()), float(rel.max())


def compare_report(params, init, oracle, horizon=None, samples=dynamics.DEFAULT_SAMPLES,
                   refine=None):
    series = dynamics.run(params, init, horizon=horizon, samples=samples)
    summary = dynamics.summarize(series, refine)
    rep = {"E_max_numeric": summary.E_max, "P_max_numeric": summary.P_max,
           "t_at_Pmax_numeric": summary.t_at_Pmax,
           "norm_error": series.norm_error(), "energy_drift": series.energy_drift()}
    t = series.times
    if oracle == "single-spin":
        if init.m != 0:
            raise ValidationError("m0", "single-spin oracle starts from m0=0")
        ref = np.array([analytic.single_spin_energies(params, init.n, x) for x in t])
        dE_ref = ref[:, 0] - ref[0, 0]
        rep["dE_B_max_abs"], rep["dE_B_max_rel"] = _deviation(series.dE_B, dE_ref)
        rep["E_C_max_abs"], rep["E_C_max_rel"] = _deviation(series.E_C, ref[:, 1])
        rep["E_I_max_abs"], rep["E_I_max_rel"] = _deviation(series.E_I, ref[:, 2])
        s = analytic.single_spin_summary(params, init.n)
        rep["E_max_exact"], rep["P_max_exact"] = s.E_max, s.P_max
        rep["max_abs"] = max(rep["dE_B_max_abs"], rep["E_C_max_abs"], rep["E_I_max_abs"])
    elif oracle == "tc":
        dE_ref = np.array([analytic.tc_energy(params, init, x) for x in t])
        rep["dE_B_max_abs"], rep["dE_B_max_rel"] = _deviation(series.dE_B, dE_ref)
        P, _ = analytic.tc_pmax(params, init)
        rep["P_max_exact"] = P
        rep["max_abs"] = rep["dE_B_max_abs"]
    else:
        P, _ = analytic.single_bath_summary(params, init.m)
        rep["P_max_exact"] = P
        rep["max_abs"] = abs(summary.P_max - P)
    rep["P_max_abs"], rep["P_max_rel"] = _deviation(summary.P_max, rep["P_max_exact"])
    return rep


def cmd_compare(args):
    params = model_params(args)
    if args.oracle == "single-bath":
        if params.N != 1:
            raise ValidationError("N", "single-bath oracle needs N=1")
        init = InitialState(args.m0, 1)
        try:
            init.validate(params)
        except DomainError as exc:
            raise ValidationError("m0", str(exc)) from None
    else:
        init, _ = initial_for(args, params)
    if args.oracle == "single-spin" and params.N_B != 1:
        raise ValidationError("NB", "single-spin oracle needs NB=1")
    rep = compare_report(params, init, args.oracle, args.horizon, args.samples,
                         args.refine)
    emit(render_report(config_record(args, n0=init.n), rep, args.format), args.out)
    return EXIT_OK


COMMANDS = {"evolve": cmd_evolve, "sweep": cmd_sweep, "fit": cmd_fit,
            "analytic": cmd_analytic, "compare": cmd_compare}


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = parse_args(argv)
        return COMMANDS[args.command](args)
    except ValidationError as exc:
        print(f"error: invalid {exc.field}: {exc.message}", file=sys.stderr)
        return EXIT_INVALID
    except (DomainError, ConvergenceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
