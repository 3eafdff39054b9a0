"""Command-line interface.

Subcommands::

    wavedim gen {white,brownian,digits,koch,sine,lorenz} [options] [--out FILE]
    wavedim dim FILE --method {sevcik,katz,higuchi,hurst} [options]
    wavedim window FILE --window W [--out FILE]
    wavedim spectrum FILE [--out FILE]
    wavedim mandelbrot [window options] --out FILE [--raw]
    wavedim validate [--quick | --full] [--seed S] [--digits-file PATH]

Series files hold one number per line, or ``x,y`` pairs; a single
non-numeric first row is taken as a header. Exit status is 0 on success,
1 for usage errors and 2 for data errors.
"""
from __future__ import annotations

import argparse
import csv
import math
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .analysis import power_spectrum, sliding_q, spectral_slope
from .core import Waveform, as_series
from .errors import DataFileError, WaveDimError
from .estimators import (
    HiguchiConfig,
    HurstConfig,
    LengthMode,
    higuchi_dimension,
    hurst_exponent,
    katz_dimension,
    sevcik_dimension,
)
from .generators import (
    LorenzParams,
    MandelbrotWindow,
    brownian_walk,
    gaussian_white,
    koch_curve,
    lorenz_trajectory,
    mandelbrot_grid,
    sine_wave,
    uniform_digits,
)
from .harness import DEFAULT_SEED, load_digits, run_all, write_report_csv

EXIT_USAGE = 1
EXIT_DATA = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(f"{self.prog}: error: {message}")


# ---------------------------------------------------------------------------
# File I/O
# ---------------------------------------------------------------------------


def _parse_number(text: str) -> float:
    text = text.strip()
    try:
        return float(text)
    except ValueError:
        if "0x" not in text.lower():
            raise
        return float.fromhex(text)


def read_table(path: str | Path) -> np.ndarray:
    """Read a one- or two-column numeric CSV into a 2-D float array.

    Raises
    ------
    DataFileError
        With the offending line number for unparsable rows, ragged rows or
        an empty file.
    """
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise DataFileError(f"{path}: {exc.strerror}") from None
    rows: list[list[float]] = []
    width = None
    with fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not cell.strip() for cell in row):
                continue
            try:
                values = [_parse_number(cell) for cell in row]
            except ValueError:
                if not rows and width is None:
                    width = -1  # header seen; only one allowed
                    continue
                raise DataFileError(f"{path}:{lineno}: not a number: {','.join(row)!r}") from None
            if len(values) not in (1, 2):
                raise DataFileError(f"{path}:{lineno}: expected 1 or 2 columns, got {len(values)}")
            if width in (None, -1):
                width = len(values)
            elif len(values) != width:
                raise DataFileError(f"{path}:{lineno}: expected {width} columns, got {len(values)}")
            if not all(math.isfinite(v) for v in values):
                raise DataFileError(f"{path}:{lineno}: non-finite value")
            rows.append(values)
    if not rows:
        raise DataFileError(f"{path}: no data rows")
    return np.array(rows, dtype=np.float64)


def read_waveform(path: str | Path) -> Waveform:
    """Waveform from a series file.

    One column gets the abscissa ``0 .. N-1``. Two columns are taken as a
    plane curve in file order, so the abscissa may fold back (Koch curves).
    """
    table = read_table(path)
    if table.shape[1] == 1:
        return Waveform.from_series(table[:, 0])
    try:
        return Waveform(table[:, 0], table[:, 1], parametric=True)
    except ValueError as exc:
        if isinstance(exc, WaveDimError):
            raise
        raise DataFileError(f"{path}: {exc}") from None


def read_series(path: str | Path) -> np.ndarray:
    """Ordinate column of a series file."""
    table = read_table(path)
    return as_series(table[:, -1])


class _Formatter:
    def __init__(self, hex_floats: bool = False):
        self.hex = hex_floats

    def report(self, value) -> str:
        if value is None:
            return ""
        if isinstance(value, str):
            return value
        if isinstance(value, (bool, np.bool_)):
            return str(bool(value)).lower()
        if isinstance(value, (int, np.integer)):
            return str(int(value))
        return float(value).hex() if self.hex else f"{float(value):.9g}"

    def data(self, value: float) -> str:
        return float(value).hex() if self.hex else repr(float(value))


def _open_out(path: str | None):
    if path is None or path == "-":
        return sys.stdout, False
    try:
        return open(path, "w", newline=""), True
    except OSError as exc:
        raise DataFileError(f"{path}: {exc.strerror}") from None


def _emit(pairs: list[tuple[str, object]], fmt: _Formatter, porcelain: bool, stream) -> None:
    for key, value in pairs:
        text = fmt.report(value)
        if porcelain:
            print(f"{key}={text}", file=stream)
        else:
            print(f"{key.replace('_', ' ')}: {text if text else '-'}", file=stream)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_gen(args) -> int:
    fmt = _Formatter(args.hex_floats)
    kind = args.kind
    params: list[tuple[str, object]] = [("kind", kind)]
    if kind in ("white", "brownian"):
        values = gaussian_white(args.n, args.mean, args.variance, seed=args.seed)
        if kind == "brownian":
            values = brownian_walk(values)
        params += [("n", args.n), ("mean", args.mean), ("variance", args.variance), ("seed", args.seed)]
        lines = (fmt.data(v) for v in values)
    elif kind == "digits":
        values = uniform_digits(args.n, seed=args.seed)
        params += [("n", args.n), ("seed", args.seed)]
        lines = (str(int(v)) for v in values)
    elif kind == "koch":
        w = koch_curve(args.stage)
        params += [("stage", args.stage)]
        lines = (f"{fmt.data(x)},{fmt.data(y)}" for x, y in zip(w.xs, w.ys))
    elif kind == "sine":
        w = sine_wave(args.n, args.period)
        params += [("n", args.n), ("period", args.period)]
        lines = (fmt.data(y) for y in w.ys)
    else:
        p = LorenzParams(args.sigma, args.rho, args.beta, args.x0, args.y0, args.z0, args.dt, args.steps)
        traj = lorenz_trajectory(p, args.integrator)
        params += [("sigma", p.sigma), ("rho", p.rho), ("beta", p.beta), ("x0", p.x0), ("y0", p.y0),
                   ("z0", p.z0), ("dt", p.dt), ("steps", p.steps), ("integrator", args.integrator)]
        lines = (",".join(fmt.data(v) for v in row) for row in traj)

    stream, close = _open_out(args.out)
    try:
        for line in lines:
            stream.write(line + "\n")
    finally:
        if close:
            stream.close()
    _emit(params, _Formatter(args.hex_floats), args.porcelain, sys.stderr)
    return 0


def cmd_dim(args) -> int:
    fmt = _Formatter(args.hex_floats)
    method = args.method
    fit = None
    if method == "sevcik":
        est = sevcik_dimension(read_waveform(args.file), finite_cover=args.finite_cover)
    elif method == "katz":
        est = katz_dimension(read_waveform(args.file), extent=args.extent)
    elif method == "higuchi":
        series = read_series(args.file)
        cfg = None
        if args.k_max is not None or args.length_mode != "abs":
            if series.size < 64:
                raise DataFileError(f"Higuchi dimension needs N >= 64, got {series.size}")
            cfg = HiguchiConfig.default(series.size, args.length_mode, args.k_max)
        est, fit = higuchi_dimension(series, cfg)
    else:
        est, fit = hurst_exponent(read_series(args.file), HurstConfig(args.min_segment))

    pairs: list[tuple[str, object]] = [
        ("method", est.method.value),
        ("value", est.value),
        ("variance", est.variance),
        ("std", est.std),
        ("n", est.n),
    ]
    if est.approximate:
        pairs.append(("approximate", True))
    if fit is not None:
        pairs += [("slope", fit.slope), ("intercept", fit.intercept), ("r_squared", fit.r_squared)]
    _emit(pairs, fmt, args.porcelain, sys.stdout)
    return 0


def cmd_window(args) -> int:
    fmt = _Formatter(args.hex_floats)
    profile = sliding_q(read_series(args.file), args.window)
    stream, close = _open_out(args.out)
    try:
        stream.write("center,q\n")
        for c, q in zip(profile.centers, profile.q):
            stream.write(f"{int(c)},{'' if math.isnan(q) else fmt.data(q)}\n")
    finally:
        if close:
            stream.close()
    info = sys.stdout if close else sys.stderr
    valid = profile.q[~profile.missing]
    _emit(
        [("window", profile.window), ("centers", len(profile)), ("missing", int(profile.missing.sum())),
         ("mean_q", float(valid.mean()) if valid.size else None)],
        fmt, args.porcelain, info,
    )
    return 0


def cmd_spectrum(args) -> int:
    fmt = _Formatter(args.hex_floats)
    spec = power_spectrum(read_series(args.file))
    stream, close = _open_out(args.out)
    try:
        stream.write("freq,power\n")
        for f, p in zip(spec.freqs, spec.power):
            stream.write(f"{fmt.data(f)},{fmt.data(p)}\n")
    finally:
        if close:
            stream.close()
    info = sys.stdout if close else sys.stderr
    pairs: list[tuple[str, object]] = [("samples_used", spec.n_samples), ("bins", len(spec.freqs)),
                                       ("peak_freq", float(spec.freqs[1:][np.argmax(spec.power[1:])]))]
    if spec.n_samples // 8 >= 16:
        fit = spectral_slope(spec)
        pairs += [("slope", fit.slope), ("intercept", fit.intercept), ("r_squared", fit.r_squared)]
    _emit(pairs, fmt, args.porcelain, info)
    return 0


def write_pgm(counts: np.ndarray, max_iter: int, path: str | Path) -> None:
    """Binary 8-bit PGM; points that never escape are black."""
    shade = 255 - np.rint(255.0 * counts / max_iter).astype(np.uint8)
    h, w = counts.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(shade.astype(np.uint8).tobytes())


def cmd_mandelbrot(args) -> int:
    window = MandelbrotWindow(args.x_min, args.x_max, args.y_min, args.y_max,
                              args.width, args.height, args.max_iter, args.escape_radius)
    counts = mandelbrot_grid(window)
    if args.raw:
        stream, close = _open_out(args.out)
        try:
            for row in counts:
                stream.write(",".join(str(int(v)) for v in row) + "\n")
        finally:
            if close:
                stream.close()
    else:
        if args.out is None or args.out == "-":
            raise UsageError("mandelbrot: --out FILE is required for PGM output")
        try:
            write_pgm(counts, window.max_iter, args.out)
        except OSError as exc:
            raise DataFileError(f"{args.out}: {exc.strerror}") from None
    info = sys.stdout if args.out not in (None, "-") else sys.stderr
    _emit([("width", window.width), ("height", window.height), ("max_iter", window.max_iter),
           ("in_set_pixels", int((counts == window.max_iter).sum()))],
          _Formatter(), args.porcelain, info)
    return 0


def cmd_validate(args) -> int:
    digits = load_digits(args.digits_file) if args.digits_file else None

    def progress(report):
        if not args.porcelain:
            print(report.summary(), flush=True)

    reports = run_all(seed=args.seed, quick=args.quick, full=args.full, digits=digits, progress=progress)
    if args.report:
        write_report_csv(reports, args.report)
    fmt = _Formatter(args.hex_floats)
    if args.porcelain:
        for r in reports:
            print(f"{r.name}.pass={str(r.passed).lower()}")
            for c in r.checks:
                print(f"{r.name}.{c.statistic}={fmt.report(c.value)}")
    ok = all(r.passed for r in reports)
    if not args.porcelain:
        print(f"{'all experiments passed' if ok else 'some experiments failed'}")
    return 0 if ok else EXIT_DATA


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _seed(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be in [0, 2**64)")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--porcelain", action="store_true", help="key=value output")
    common.add_argument("--hex-floats", action="store_true", help="print floats as exact hex")

    parser = _Parser(prog="wavedim", description="Fractal dimension of sampled waveforms.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", parents=[common], help="generate a reference signal")
    g.add_argument("kind", choices=["white", "brownian", "digits", "koch", "sine", "lorenz"])
    g.add_argument("--n", type=_positive_int, default=10_000)
    g.add_argument("--seed", type=_seed, default=0)
    g.add_argument("--mean", type=float, default=0.0)
    g.add_argument("--variance", type=float, default=1.0)
    g.add_argument("--stage", type=int, default=4)
    g.add_argument("--period", type=float, default=256.0)
    g.add_argument("--steps", type=_positive_int, default=40_000)
    g.add_argument("--sigma", type=float, default=3.0)
    g.add_argument("--rho", type=float, default=26.5)
    g.add_argument("--beta", type=float, default=1.0)
    g.add_argument("--x0", type=float, default=-1.0)
    g.add_argument("--y0", type=float, default=0.0)
    g.add_argument("--z0", type=float, default=1.0)
    g.add_argument("--dt", type=float, default=0.01)
    g.add_argument("--integrator", choices=["rk4", "euler"], default="rk4")
    g.add_argument("--out", help="output file (default stdout)")
    g.set_defaults(func=cmd_gen)

    d = sub.add_parser("dim", parents=[common], help="estimate a dimension or exponent")
    d.add_argument("file")
    d.add_argument("--method", choices=["sevcik", "katz", "higuchi", "hurst"], default="sevcik")
    d.add_argument("--k-max", type=_positive_int, help="largest Higuchi stride")
    d.add_argument("--length-mode", choices=[m.value for m in LengthMode], default="abs")
    d.add_argument("--min-segment", type=int, default=16, help="smallest Hurst segment (>= 8)")
    d.add_argument("--extent", choices=["exact", "first"], default="exact", help="Katz planar extent")
    d.add_argument("--finite-cover", action="store_true", help="Sevcik with the finite ball count")
    d.set_defaults(func=cmd_dim)

    w = sub.add_parser("window", parents=[common], help="sliding-window tortuosity profile")
    w.add_argument("file")
    w.add_argument("--window", type=int, required=True)
    w.add_argument("--out")
    w.set_defaults(func=cmd_window)

    s = sub.add_parser("spectrum", parents=[common], help="Hann-windowed power spectrum")
    s.add_argument("file")
    s.add_argument("--out")
    s.set_defaults(func=cmd_spectrum)

    m = sub.add_parser("mandelbrot", parents=[common], help="render escape counts")
    m.add_argument("--x-min", type=float, default=-3.0)
    m.add_argument("--x-max", type=float, default=3.0)
    m.add_argument("--y-min", type=float, default=-2.0)
    m.add_argument("--y-max", type=float, default=2.0)
    m.add_argument("--width", type=_positive_int, default=600)
    m.add_argument("--height", type=_positive_int, default=400)
    m.add_argument("--max-iter", type=_positive_int, default=1024)
    m.add_argument("--escape-radius", type=float, default=2.0)
    m.add_argument("--raw", action="store_true", help="CSV of raw counts instead of PGM")
    m.add_argument("--out")
    m.set_defaults(func=cmd_mandelbrot)

    v = sub.add_parser("validate", parents=[common], help="run the validation experiments")
    mode = v.add_mutually_exclusive_group()
    mode.add_argument("--quick", action="store_true", help="fewer trials")
    mode.add_argument("--full", action="store_true", help="add the 1e9-digit streaming run")
    v.add_argument("--seed", type=_seed, default=DEFAULT_SEED)
    v.add_argument("--digits-file", help="decimal digits to compare with uniform digits")
    v.add_argument("--report", default="validation_report.csv", help="CSV report path ('' to skip)")
    v.set_defaults(func=cmd_validate)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except WaveDimError as exc:
        print(f"wavedim: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        # Parameter validation in library constructors (e.g. a bad window).
        print(f"wavedim: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
