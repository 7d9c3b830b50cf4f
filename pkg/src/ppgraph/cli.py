"""Command-line interface: ``ppgraph analyze|spectra|simulate|oracle-check``.

Exit codes: 0 success, 1 invalid input or parameters, 2 numerical failure.
Settings resolve as command-line flag, then ``--config`` file, then default.
"""
from __future__ import annotations

import argparse
import csv
import io
import logging
import sys
import warnings
from pathlib import Path

import numpy as np

from . import configfile
from .analysis import SMOOTH_RULES, AnalysisConfig, analyze
from .graph import export_graph
from .oracle import oracle_check
from .partial import InvariantError, NumericalError, invert_spectra, rescaled_inverse
from .pattern import ParseError, ValidationError, load_pattern, rescale_to_unit_square, write_pattern
from .sim import simulate
from .spectra import (ConfigurationError, SmoothingSpec, auto_periodogram, cross_periodogram,
                      decompose_cross, dft, smooth_field, spectral_matrix)

log = logging.getLogger("ppgraph")

# flag name -> (config attribute, parser)
SETTINGS = {
    "alpha": ("alpha", float),
    "grid-p": ("grid_p", int),
    "smooth-h": ("smooth_h", lambda s: s if s in SMOOTH_RULES else int(s)),
    "ridge": ("ridge", float),
    "square-statistic": ("square_statistic", configfile.parse_bool),
    "exclude-dc": ("exclude_dc", configfile.parse_bool),
    "allow-bivariate": ("allow_bivariate", configfile.parse_bool),
}
INPUT_KEYS = {"x-col": str, "y-col": str, "type-col": str, "window": str,
              "out-json": str, "out-dot": str}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad flags; 2 is reserved for numerical failures here
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_analysis_flags(p: argparse.ArgumentParser):
    p.add_argument("--config", type=Path, help="key = value settings file")
    p.add_argument("--alpha", type=float)
    p.add_argument("--grid-p", type=int)
    p.add_argument("--smooth-h", help="box half width: auto (default), minimal, or an integer")
    p.add_argument("--ridge", type=float)
    p.add_argument("--square-statistic", action="store_true", default=None)
    dc = p.add_mutually_exclusive_group()
    dc.add_argument("--exclude-dc", dest="exclude_dc", action="store_true", default=None)
    dc.add_argument("--include-dc", dest="exclude_dc", action="store_false")
    p.add_argument("--allow-bivariate", action="store_true", default=None)
    p.add_argument("--x-col")
    p.add_argument("--y-col")
    p.add_argument("--type-col")
    p.add_argument("--window", help="x_min,y_min,x_max,y_max; default: bounding box")


def resolve_settings(args) -> tuple[AnalysisConfig, dict]:
    """Merge flags over the config file over defaults."""
    file_values = configfile.read(args.config) if getattr(args, "config", None) else {}
    unknown = set(file_values) - set(SETTINGS) - set(INPUT_KEYS)
    if unknown:
        raise UsageError(f"unknown config keys: {sorted(unknown)}")
    kw = {}
    for flag, (attr, parse) in SETTINGS.items():
        value = getattr(args, attr, None)
        if value is None and flag in file_values:
            value = file_values[flag]
        if value is not None:
            try:
                kw[attr] = parse(value) if isinstance(value, str) else value
            except ValueError as e:
                raise UsageError(f"bad value for {flag}: {value!r} ({e})") from None
    extra = {}
    for key in INPUT_KEYS:
        attr = key.replace("-", "_")
        value = getattr(args, attr, None)
        if value is None:
            value = file_values.get(key)
        extra[key] = value
    try:
        config = AnalysisConfig(**kw)
    except ValueError as e:
        raise UsageError(str(e)) from None
    return config, extra


def _read_pattern(path, extra):
    window = extra.get("window")
    if window is not None:
        try:
            window = [float(v) for v in window.split(",")]
        except ValueError:
            raise UsageError(f"bad window {window!r}") from None
        if len(window) != 4:
            raise UsageError("window needs four comma-separated numbers")
    path = Path(path)
    if not path.is_file():
        raise UsageError(f"input file not found: {path}")
    return load_pattern(path, x=extra.get("x-col") or "x", y=extra.get("y-col") or "y",
                        type=extra.get("type-col") or "type", window=window)


def _write_bytes(path, data: bytes):
    if path == "-":
        sys.stdout.buffer.write(data)
    else:
        Path(path).write_bytes(data)


def format_summary(result) -> str:
    cfg = result.config
    G = result.inverse
    out = io.StringIO()
    stat = "sup |d|^2" if cfg.square_statistic else "sup |d|"
    pat = result.pattern
    out.write(f"types: {pat.d}   events: {pat.n}   duplicates dropped: {pat.duplicates_dropped}\n")
    for label, n in pat.count_by_label().items():
        out.write(f"  {label:<20} n = {n}\n")
    out.write(f"alpha: {cfg.alpha}   grid P: {cfg.grid_p}   smoothing half width h: "
              f"{result.half_width} ({cfg.smooth_h if cfg.smooth_h in SMOOTH_RULES else 'fixed'})\n")
    out.write(f"frequencies retained: {int(G.retained.sum())}   regularized: "
              f"{G.n_regularized}   dropped: {G.n_dropped}   ridge epsilon: {cfg.ridge}\n")
    out.write(f"\n{'pair':<32} {stat:>10} {'at (p, q)':>12}  edge\n")
    for a, b, s, p, q, edge in result.pairs():
        out.write(f"{a + ' -- ' + b:<32} {s:>10.6f} {f'({p}, {q})':>12}  {'yes' if edge else 'no'}\n")
    out.write(f"\nedges: {len(result.graph.edges)}\n")
    return out.getvalue()


def cmd_analyze(args) -> int:
    config, extra = resolve_settings(args)
    pattern = _read_pattern(args.input, extra)
    result = analyze(pattern, config)
    sys.stdout.write(format_summary(result))
    for msg in result.warnings:
        print(f"warning: {msg}", file=sys.stderr)
    if extra.get("out-json"):
        _write_bytes(extra["out-json"], export_graph(result.graph, "json"))
    if extra.get("out-dot"):
        _write_bytes(extra["out-dot"], export_graph(result.graph, "dot"))
    return 0


FIELDS = ("auto", "cross", "co", "quad", "amplitude", "phase", "dij")


def _fmt(v) -> str:
    return "" if not np.isfinite(v) else repr(float(v))


def cmd_spectra(args) -> int:
    config, extra = resolve_settings(args)
    pattern = rescale_to_unit_square(_read_pattern(args.input, extra))
    grid = config.grid
    h = config.half_width(pattern.d)
    smooth = SmoothingSpec(h if args.smooth else 0)

    def index(label):
        try:
            return pattern.type_index(label)
        except KeyError as e:
            raise UsageError(e.args[0]) from None

    if args.field == "auto":
        if not args.type:
            raise UsageError("--field auto needs --type")
        values = smooth_field(auto_periodogram(dft(pattern, index(args.type), grid)), smooth).values
        columns = {"value": values}
    else:
        if not args.pair:
            raise UsageError(f"--field {args.field} needs --pair A,B")
        parts = args.pair.split(",")
        if len(parts) != 2:
            raise UsageError("--pair takes two comma-separated labels")
        i, j = (index(s.strip()) for s in parts)
        if args.field == "dij":
            S = spectral_matrix(pattern, grid, SmoothingSpec(h))
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                D = rescaled_inverse(invert_spectra(S, config.ridge))
            columns = {"value": D.values[..., i, j]}
        else:
            fij = smooth_field(cross_periodogram(dft(pattern, i, grid), dft(pattern, j, grid)), smooth)
            if args.field == "cross":
                columns = {"re": fij.values.real, "im": fij.values.imag}
            else:
                dec = decompose_cross(fij)
                columns = {"value": getattr(dec, args.field)}

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["p", "q", *columns])
    for p, q in grid.indices():
        w.writerow([p, q, *(_fmt(c[p, q + grid.P]) for c in columns.values())])
    _write_bytes(args.output, buf.getvalue().encode("utf-8"))
    return 0


def cmd_simulate(args) -> int:
    try:
        spec = configfile.read_sim_spec(args.spec)
    except (OSError, KeyError) as e:
        raise UsageError(f"cannot read simulation spec: {e}") from None
    if args.seed is not None:
        spec = spec.with_seed(args.seed)
    pattern = simulate(spec)
    buf = io.StringIO()
    write_pattern(pattern, buf)
    _write_bytes(args.output, buf.getvalue().encode("utf-8"))
    return 0


def cmd_oracle_check(args) -> int:
    if args.dimensions < 3:
        raise UsageError("oracle check needs --dimensions >= 3")
    if args.replicates < 1:
        raise UsageError("--replicates must be positive")
    report = oracle_check(args.dimensions, args.replicates, args.seed, grid_p=args.grid_p)
    print(f"dimensions: {args.dimensions}   replicates: {args.replicates}   seed: {args.seed}")
    print(f"max relative deviation  inverse vs direct: {report.max_inverse_direct:.3e}")
    print(f"max relative deviation  direct vs recursive: {report.max_direct_recursive:.3e}")
    print(f"max relative deviation  recursive order swap: {report.max_order_swap:.3e}")
    if not report.passed:
        r, (p, q), (i, j) = report.worst
        print(f"oracle failure: replicate {r}, frequency (p, q) = ({p}, {q}), pair ({i}, {j})",
              file=sys.stderr)
        return 2
    print("ok")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ppgraph", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="estimate the dependence graph of a CSV pattern")
    p.add_argument("input")
    _add_analysis_flags(p)
    p.add_argument("--out-json")
    p.add_argument("--out-dot")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("spectra", help="dump one spectral field as CSV")
    p.add_argument("input")
    _add_analysis_flags(p)
    p.add_argument("--field", choices=FIELDS, default="auto")
    sel = p.add_mutually_exclusive_group()
    sel.add_argument("--type", help="type label for --field auto")
    sel.add_argument("--pair", help="two labels A,B for cross fields and dij")
    p.add_argument("--smooth", action="store_true",
                   help="apply the configured box smoothing to periodogram fields")
    p.add_argument("-o", "--output", default="-")
    p.set_defaults(func=cmd_spectra)

    p = sub.add_parser("simulate", help="simulate a pattern from a spec file")
    p.add_argument("spec", type=Path)
    p.add_argument("-o", "--output", default="-")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("oracle-check", help="compare the three partialisation routes")
    p.add_argument("--dimensions", type=int, default=4)
    p.add_argument("--replicates", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--grid-p", type=int, default=16)
    p.set_defaults(func=cmd_oracle_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except (UsageError, ParseError, ValidationError, ConfigurationError, KeyError, OSError) as e:
        msg = e.args[0] if isinstance(e, KeyError) and e.args else e
        print(f"error: {msg}", file=sys.stderr)
        return 1
    except (NumericalError, InvariantError) as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
