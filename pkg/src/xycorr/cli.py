"""Command-line front end.

Every subcommand accepts ``--config FILE`` holding a JSON object whose keys
mirror the long flag names (``gamma``, ``kT``, ``lambda``, ``measure``, ...);
flags given on the command line override the file.

Exit status: 0 on success, 1 on usage errors (including parameters outside
their domain), 2 on numerical failures (and on failed validation checks for
``ed-validate`` and ``selftest``).
"""
from __future__ import annotations

import argparse
import io
import json
import math
import sys

import numpy as np

from . import analysis as A
from .errors import CapacityError, DomainError, UsageError, XYCorrError
from .xy import MAX_SEPARATION, XYParams

SERIES_HEADER = ["lambda", "gamma", "kT", "r", "measure", "value"]
FEATURE_HEADER = ["measure", "kind", "lambda", "magnitude", "uncertainty", "gamma", "kT", "r"]

DEFAULTS = {
    "gamma": 1.0,
    "kT": 0.0,
    "r": 1,
    "lambda": "0:2:201",
    "measure": [],
    "out": "-",
    "format": "csv",
    "order": 1,
    "r_max": 15,
    "threshold": A.DEFAULT_JUMP_THRESHOLD,
    "n_spins": 12,
    "n_states": 500,
}
COMMAND_DEFAULTS = {
    "estimate-cp": {"lambda": "0.8:1.3:501"},
    "detect-factorization": {"lambda": "0.8:1.3:501", "gamma": 0.5},
    "long-range": {"lambda": "1.5"},
    "lqu-track": {"lambda": "0:2.5:2501", "gamma": 0.5},
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def fmt(x):
    """12 significant digits; integers and zero print without exponent noise."""
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.12g}"


def _write_csv(header, rows, out):
    text = io.StringIO()
    text.write(",".join(header) + "\n")
    for row in rows:
        text.write(",".join(fmt(v) for v in row) + "\n")
    if out == "-":
        sys.stdout.write(text.getvalue())
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text.getvalue())


def _plot_script(csv_path, measures, xcol, xlabel, ycol):
    lines = [
        "# gnuplot script; reads the CSV next to it, embeds no data",
        "set datafile separator ','",
        f"set xlabel '{xlabel}'",
        "set key outside",
    ]
    curves = [
        f"'{csv_path}' using {xcol}:(strcol(5) eq '{m}' ? ${ycol} : 1/0) skip 1 with linespoints title '{m}'"
        for m in measures
    ]
    lines.append("plot " + ", \\\n     ".join(curves))
    return "\n".join(lines) + "\n"


def _emit_plotscript(cfg, measures, xcol, xlabel, ycol=6):
    if cfg["format"] != "csv+plotscript":
        return
    if cfg["out"] == "-":
        raise UsageError("--format csv+plotscript needs --out FILE")
    with open(cfg["out"] + ".gp", "w") as fh:
        fh.write(_plot_script(cfg["out"], measures, xcol, xlabel, ycol))


def _measures(cfg):
    names = []
    for item in cfg["measure"] if isinstance(cfg["measure"], list) else [cfg["measure"]]:
        names += [n for n in str(item).split(",") if n.strip()]
    if not names:
        raise UsageError(f"no measure given; valid: {', '.join(A.measure_names())}")
    return [A.resolve_measure(n).name for n in names]


def _base(cfg, lam=1.0, r_max=0):
    rmax = max(int(cfg["r"]), r_max)
    if rmax > MAX_SEPARATION:
        raise UsageError(f"separation {rmax} exceeds the cap of {MAX_SEPARATION}")
    return XYParams.from_kT(lam, float(cfg["gamma"]), float(cfg["kT"]), int(cfg["r"]))


def _series_rows(series, cfg, extra=()):
    rows = []
    for s in series:
        for x, v in zip(s.grid, s.values):
            lam, r = (s.base.lam, int(x)) if s.parameter == "r" else (x, s.base.r)
            rows.append([lam, s.base.gamma, float(cfg["kT"]), r, s.measure, v, *extra])
    rows.sort(key=lambda row: (row[4], row[0], row[3]))
    return rows


def _feature_rows(reports, cfg):
    rows = [[f.meta.get("measure", "LQU"), f.kind, f.location, f.magnitude, f.uncertainty,
             float(cfg["gamma"]), float(cfg["kT"]), int(cfg["r"])] for f in reports]
    rows.sort(key=lambda row: (row[0], row[2] if not math.isnan(row[2]) else math.inf, row[1]))
    return rows


def cmd_sweep(cfg):
    names = _measures(cfg)
    series = A.sweep_many(names, _base(cfg), A.parse_grid(cfg["lambda"]))
    _write_csv(SERIES_HEADER, _series_rows(series.values(), cfg), cfg["out"])
    _emit_plotscript(cfg, names, 1, "lambda")


def cmd_derivative(cfg):
    names = _measures(cfg)
    order = int(cfg["order"])
    series = A.sweep_many(names, _base(cfg), A.parse_grid(cfg["lambda"]))
    ders = [A.numeric_derivative(s, order) for s in series.values()]
    _write_csv(SERIES_HEADER + ["derivative_order"], _series_rows(ders, cfg, (order,)), cfg["out"])
    _emit_plotscript(cfg, names, 1, "lambda")


def cmd_estimate_cp(cfg):
    names = _measures(cfg)
    series = A.sweep_many(names, _base(cfg), A.parse_grid(cfg["lambda"]))
    reports = [A.estimate_cp(s) for s in series.values()]
    _write_csv(FEATURE_HEADER, _feature_rows(reports, cfg), cfg["out"])


def cmd_detect_factorization(cfg):
    reports, _ = A.detect_factorization(float(cfg["gamma"]), _base(cfg),
                                        A.parse_grid(cfg["lambda"]), float(cfg["threshold"]))
    _write_csv(FEATURE_HEADER, _feature_rows(reports, cfg), cfg["out"])


def cmd_long_range(cfg):
    names = _measures(cfg)
    try:
        lam = float(cfg["lambda"])
    except ValueError:
        raise UsageError(f"long-range takes a single lambda value, got {cfg['lambda']!r}") from None
    r_max = int(cfg["r_max"])
    series = A.long_range_scan(_base(cfg, lam, r_max), r_max, names)
    _write_csv(SERIES_HEADER, _series_rows(series.values(), cfg), cfg["out"])
    _emit_plotscript(cfg, names, 4, "r")


def cmd_lqu_track(cfg):
    track = A.track_lqu_optimizer(_base(cfg), A.parse_grid(cfg["lambda"]), float(cfg["threshold"]))
    for j in track.jumps:
        j.meta["measure"] = "LQU"
    _write_csv(FEATURE_HEADER, _feature_rows(list(track.switches) + track.jumps, cfg), cfg["out"])


def cmd_ed_validate(cfg):
    from .validation import CORRELATOR_ATOL, MEASURE_ATOL, cross_validate

    rows = cross_validate(n_spins=int(cfg["n_spins"]))
    print(f"ED (N={cfg['n_spins']}) vs closed form; tolerances: correlators {CORRELATOR_ATOL}, "
          f"measures {MEASURE_ATOL}")
    print(f"{'lambda':>7} {'gamma':>6} {'kT':>5} {'corr diff':>10} {'worst measure':>24}  result")
    for c in rows:
        name, diff = c.worst_measure
        print(f"{c.params.lam:7.3f} {c.params.gamma:6.3f} {c.params.kT:5.2f} {c.correlator_diff:10.2e} "
              f"{name:>14} {diff:9.2e}  {'PASS' if c.passed else 'FAIL'}")
    return 0 if all(c.passed for c in rows) else 2


def cmd_selftest(cfg):
    from .validation import selftest

    checks = selftest(int(cfg["n_states"]))
    for c in checks:
        print(c.line())
    return 0 if all(c.passed for c in checks) else 2


COMMANDS = {
    "sweep": (cmd_sweep, "measure values along a lambda grid"),
    "derivative": (cmd_derivative, "finite-difference derivative of measures along lambda"),
    "estimate-cp": (cmd_estimate_cp, "finite-temperature critical point from derivative extrema"),
    "detect-factorization": (cmd_detect_factorization, "concurrence zeros and derivative jumps"),
    "long-range": (cmd_long_range, "measures versus spin separation r"),
    "lqu-track": (cmd_lqu_track, "LQU optimizing-observable switches and derivative jumps"),
    "ed-validate": (cmd_ed_validate, "closed form versus exact diagonalisation table"),
    "selftest": (cmd_selftest, "measure and linear-algebra property battery"),
}


def build_parser():
    parser = _Parser(prog="xycorr", description="Correlations in the XY chain in a transverse field.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser, metavar="COMMAND")
    sub.required = True
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text, argument_default=argparse.SUPPRESS)
        p.add_argument("--config", help="JSON file with default values for the flags below")
        p.add_argument("--gamma", type=float, help="anisotropy in [0, 1]")
        p.add_argument("--kT", type=float, help="temperature; 0 selects the ground state")
        p.add_argument("--r", type=int, help="spin separation")
        p.add_argument("--lambda", dest="lambda", help="grid min:max:count (long-range: a single value)")
        p.add_argument("--measure", action="append", help="measure name; repeat or comma-separate")
        p.add_argument("--out", help="output CSV path ('-' for stdout)")
        p.add_argument("--format", choices=["csv", "csv+plotscript"])
        if name == "derivative":
            p.add_argument("--order", type=int, choices=[1, 2])
        if name == "long-range":
            p.add_argument("--r-max", dest="r_max", type=int)
        if name in ("detect-factorization", "lqu-track"):
            p.add_argument("--threshold", type=float)
        if name == "ed-validate":
            p.add_argument("--n-spins", dest="n_spins", type=int)
        if name == "selftest":
            p.add_argument("--n-states", dest="n_states", type=int)
    return parser


def resolve_config(args):
    """Merge built-in defaults, the optional JSON config and explicit flags."""
    given = {k: v for k, v in vars(args).items() if k not in ("command", "config")}
    file_cfg = {}
    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                file_cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(file_cfg, dict):
            raise UsageError("config file must hold a JSON object")
        file_cfg = {k.replace("-", "_"): v for k, v in file_cfg.items()}
        unknown = set(file_cfg) - set(DEFAULTS)
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
    return {**DEFAULTS, **COMMAND_DEFAULTS.get(args.command, {}), **file_cfg, **given}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code
    try:
        cfg = resolve_config(args)
        status = COMMANDS[args.command][0](cfg)
    except (UsageError, DomainError, CapacityError) as exc:
        print(f"xycorr: usage error: {exc}", file=sys.stderr)
        return 1
    except XYCorrError as exc:
        print(f"xycorr: numerical failure: {exc}", file=sys.stderr)
        return 2
    return status or 0


if __name__ == "__main__":
    sys.exit(main())
