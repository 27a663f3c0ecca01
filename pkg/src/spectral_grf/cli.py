"""Command-line front end.

Subcommands::

    spectral-grf generate  synthesise one field and write it to a file
    spectral-grf cov       Monte-Carlo covariance against an oracle, as CSV
    spectral-grf converge  1D convergence study, as CSV
    spectral-grf bench     wall-clock medians per algorithm and grid, as CSV

Exit status is 0 on success, 1 for usage errors and 2 when a numerical
criterion (convergence slope, benchmark speedup) is not met.
"""

from __future__ import annotations

import argparse
import contextlib
import logging
import math
import re
import sys
import time

import numpy as np

from .bench import MIN_REPEAT, run_benchmark, speedups
from .dft import RealnessError
from .fieldio import FieldFormatError, to_csv, write_field
from .grid import GridError, GridSpec
from .spectral import DensityError, Test1dDensity, parse_density
from .stats import (
    closed_form_oracle,
    convergence_study,
    discrete_oracle,
    estimate_covariance,
)
from .synth import ALIASES, resolve_algorithm, synthesize

log = logging.getLogger("spectral_grf")

EXIT_OK, EXIT_USAGE, EXIT_CRITERION = 0, 1, 2
SLOPE_TARGET = -3.0
SPEEDUP_TARGET = 1.33
CLI_ALGORITHMS = ("two-fft", "one-fft", "recursive")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad flags; 2 is reserved for criterion failures here
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _count(text: str) -> int:
    """Integer that may be written in float notation, e.g. ``1e6``."""
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a count, got {text!r}")
    if not value.is_integer():
        raise argparse.ArgumentTypeError(f"count must be a whole number, got {text!r}")
    return int(value)


def _seed(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return value


def parse_levels(text: str) -> list[int]:
    """``"2..6"``, ``"2,3,5"`` or a single level."""
    m = re.fullmatch(r"\s*(\d+)\s*\.\.\s*(\d+)\s*", text)
    if m:
        lo, hi = int(m.group(1)), int(m.group(2))
        if hi < lo:
            raise argparse.ArgumentTypeError(f"empty level range {text!r}")
        return list(range(lo, hi + 1))
    try:
        return [int(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad level spec {text!r}")


def _add_grid_args(p, density_default=None):
    p.add_argument("--lengths", type=_float_list, help="edge lengths l1,..,ld (default 1 each)")
    p.add_argument("--points", type=_int_list, required=True, help="point counts N1,..,Nd")
    p.add_argument("--origin", type=_float_list, help="lower corner a1,..,ad (default 0)")
    p.add_argument("--density", default=density_default, required=density_default is None,
                   help="poly:m=..,k=..,l=..,n=.. | aniso:m=..,k1=..,n=.. | const:c=.. | test1d")
    p.add_argument("--algorithm", default="one-fft",
                   choices=CLI_ALGORITHMS + tuple(a for a in ALIASES.values()))
    p.add_argument("--seed", type=_seed, default=0)


def _grid_from(args) -> GridSpec:
    counts = args.points
    lengths = args.lengths or (1.0,) * len(counts)
    return GridSpec(lengths, counts, args.origin or ())


@contextlib.contextmanager
def _output(path):
    if path in (None, "-"):
        yield sys.stdout
        return
    try:
        fh = open(path, "w", newline="")
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror}") from None
    with fh:
        yield fh


def cmd_generate(args) -> int:
    grid = _grid_from(args)
    if args.format == "pgm" and grid.dim != 2:
        raise UsageError(f"pgm output needs a 2D grid, got d={grid.dim}")
    density = parse_density(args.density, grid.dim)
    t0 = time.perf_counter()
    fld = synthesize(grid, density, args.seed, resolve_algorithm(args.algorithm))
    elapsed = time.perf_counter() - t0
    try:
        write_field(args.out, grid, fld.values, args.format)
    except OSError as exc:
        raise UsageError(f"cannot write {args.out}: {exc.strerror}") from None
    log.info("%s field on %s in %.3f s -> %s", fld.algorithm, grid.counts, elapsed, args.out)
    return EXIT_OK


def cmd_cov(args) -> int:
    grid = _grid_from(args)
    density = parse_density(args.density, grid.dim)
    if args.samples < 1:
        raise UsageError(f"--samples must be >= 1, got {args.samples}")
    ref = args.ref_index or tuple(n // 2 for n in grid.counts)
    ref = grid.check_index(ref)
    if args.oracle == "closed-form" and not isinstance(density, Test1dDensity):
        raise UsageError("the closed-form oracle is only available for test1d")

    est = estimate_covariance(
        grid, density, args.algorithm, args.samples, ref, args.seed
    )
    lags = grid.torus_lags(ref)
    if args.oracle == "closed-form":
        oracle = closed_form_oracle(lags)
    elif args.oracle == "discrete":
        oracle = discrete_oracle(grid, density, ref)
    else:
        oracle = None

    d = grid.dim
    header = [f"i{k + 1}" for k in range(d)] + [f"lag{k + 1}" for k in range(d)]
    header += ["estimate", "oracle", "abs_diff"]
    rows = [header]
    for index in grid.indices():
        row = [*index, *(repr(float(v)) for v in lags[index])]
        e = float(est.estimates[index])
        if oracle is None:
            row += [repr(e), "", ""]
        else:
            o = float(oracle[index])
            row += [repr(e), repr(o), repr(abs(e - o))]
        rows.append(row)
    with _output(args.out) as fh:
        fh.write(to_csv(rows))
    if oracle is not None:
        worst = float(np.max(np.abs(est.estimates - oracle)))
        log.info("max |estimate - oracle| = %.3e (2/sqrt(M) = %.3e)",
                 worst, 2 / math.sqrt(args.samples))
    return EXIT_OK


def cmd_converge(args) -> int:
    if args.samples < 1:
        raise UsageError(f"--samples must be >= 1, got {args.samples}")
    if not args.levels or min(args.levels) < 2 or max(args.levels) > 12:
        raise UsageError(f"levels must lie within 2..12, got {args.levels}")
    report = convergence_study(args.levels, args.samples, resolve_algorithm(args.algorithm),
                               args.seed)
    rows = [["n", "N", "e_n", "mc_floor"]]
    rows += [[r.level, r.points, repr(r.error), repr(r.mc_floor)] for r in report.rows]
    with _output(args.out) as fh:
        fh.write(to_csv(rows))
    if report.slope is None:
        print("slope: not fitted (fewer than two levels above 3 x mc_floor)", file=sys.stderr)
        return EXIT_CRITERION
    print(f"slope: {report.slope:.4f} over levels {report.fitted_levels} "
          f"(target <= {SLOPE_TARGET:g})", file=sys.stderr)
    return EXIT_OK if report.slope <= SLOPE_TARGET else EXIT_CRITERION


def cmd_bench(args) -> int:
    if args.repeat < MIN_REPEAT:
        raise UsageError(f"--repeat must be >= {MIN_REPEAT}, got {args.repeat}")
    shapes = args.points or [(512, 512)]
    grids = []
    for counts in shapes:
        lengths = args.lengths or (1.0,) * len(counts)
        grids.append(GridSpec(lengths, counts))
    dims = {g.dim for g in grids}
    densities = {d: parse_density(args.density, d) for d in dims}
    rows = run_benchmark(grids, lambda g: densities[g.dim], repeat=args.repeat, seed=args.seed)
    out = [["algorithm", "P", "repeat", "median_seconds", "draws"]]
    out += [[r.algorithm, r.points, r.repeat, repr(r.median_seconds), r.draws] for r in rows]
    with _output(args.out) as fh:
        fh.write(to_csv(out))
    status = EXIT_OK
    for (counts, alg), s in sorted(speedups(rows).items()):
        ok = s >= args.min_speedup
        print(f"speedup {alg} over two_fft at {counts}: {s:.2f}x "
              f"({'ok' if ok else 'below'} {args.min_speedup:g})", file=sys.stderr)
        if not ok:
            status = EXIT_CRITERION
    return status


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="spectral-grf", description="Spectral synthesis of stationary Gaussian random fields."
    )
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="synthesise one field")
    _add_grid_args(p)
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=("grf1", "csv", "pgm"), default="grf1")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("cov", help="Monte-Carlo covariance estimate")
    _add_grid_args(p)
    p.add_argument("--samples", type=_count, default=10_000)
    p.add_argument("--ref-index", type=_int_list, help="reference point j1,..,jd (default N/2)")
    p.add_argument("--oracle", choices=("closed-form", "discrete", "none"), default="discrete")
    p.add_argument("--out", help="CSV path (default stdout)")
    p.set_defaults(func=cmd_cov)

    p = sub.add_parser("converge", help="1D convergence study against the closed form")
    p.add_argument("--levels", type=parse_levels, default=parse_levels("2..6"))
    p.add_argument("--samples", type=_count, default=100_000)
    p.add_argument("--algorithm", default="recursive",
                   choices=CLI_ALGORITHMS + tuple(a for a in ALIASES.values()))
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--out", help="CSV path (default stdout)")
    p.set_defaults(func=cmd_converge)

    p = sub.add_parser("bench", help="time all algorithms")
    p.add_argument("--points", type=_int_list, action="append",
                   help="point counts N1,..,Nd; repeatable (default 512,512)")
    p.add_argument("--lengths", type=_float_list)
    p.add_argument("--density", default="poly:m=1,k=1,l=1,n=2")
    p.add_argument("--repeat", type=int, default=7)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--min-speedup", type=float, default=SPEEDUP_TARGET)
    p.add_argument("--out", help="CSV path (default stdout)")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (UsageError, GridError, DensityError, FieldFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (RealnessError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_CRITERION


if __name__ == "__main__":
    sys.exit(main())
