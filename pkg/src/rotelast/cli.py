"""Command-line entry point: ``rotelast <subcommand> [--flags]``.

Exit status is 0 on success, 1 when a validation or numerical check fails
and 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import math
import re
import sys
from pathlib import Path

import numpy as np

from . import validation
from .energy import ElasticModuli, Functional
from .fieldio import FieldFormatError, read_field_csv, write_field_csv, write_series_csv
from .grid import Boundary, GridSpec, ResolutionError
from .material import SingularParameterError, derived_properties, wave_speeds
from .parallel import ordered_map, worker_count
from .radial import J0_FIRST_ZERO, sampled_radial_field
from .render import ArrowScene, render_arrow_svg
from .wavesim import (
    CFLViolation,
    GaussianPulse,
    MeasurementWindowError,
    PlaneMode,
    RadialHalfTurn,
    WaveConfig,
    WaveMode,
    measure_speed,
    plane_mode_phase_speed,
    simulate,
)

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2

_PI_FORM = re.compile(r"^\s*([+-]?(?:\d+\.?\d*|\.\d+)?)\s*\*?\s*pi\s*(?:/\s*(\d+\.?\d*))?\s*$")


def real(text: str) -> float:
    """Float parser that also accepts multiples of pi: ``pi``, ``-pi``, ``2pi``, ``pi/2``."""
    m = _PI_FORM.match(text.lower())
    if m:
        coef, den = m.groups()
        c = 1.0 if coef in ("", "+") else -1.0 if coef == "-" else float(coef)
        value = c * math.pi / (float(den) if den else 1.0)
    else:
        try:
            value = float(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"not a finite number: {text!r}")
    return value


def positive_int(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return n


class UsageError(Exception):
    """Arguments parsed but describe an impossible request."""


def _moduli(args) -> ElasticModuli:
    try:
        return ElasticModuli(args.c1, args.c2, args.c3, args.rho)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _add_moduli(p, c1=5.0, c2=1.0, c3=1.0):
    p.add_argument("--c1", type=real, default=c1, help=f"trace-piece modulus (default {c1:g})")
    p.add_argument("--c2", type=real, default=c2, help=f"skew-piece modulus (default {c2:g})")
    p.add_argument("--c3", type=real, default=c3, help=f"trace-free symmetric modulus (default {c3:g})")
    p.add_argument("--rho", type=real, default=1.0, help="inertia density (default 1)")


# -- subcommands ---------------------------------------------------------------


def cmd_validate(args) -> int:
    names = validation.SUITES if args.suite == "all" else (args.suite,)
    ok = True
    for name in names:
        result = validation.run_suite(name, grid=args.grid, seed=args.seed)
        print(result.report())
        print()
        ok &= result.passed
    print("validation passed" if ok else "validation FAILED")
    return EXIT_OK if ok else EXIT_FAILED


def cmd_material(args) -> int:
    m = _moduli(args)
    try:
        report = derived_properties(m)
    except SingularParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILED
    if args.json:
        print(json.dumps(report.to_json_dict(), indent=2, sort_keys=True))
        return EXIT_OK
    d = report.to_json_dict()
    width = max(len(k) for k in d)
    for key, value in d.items():
        print(f"{key:<{width}}  {value:.12g}" if isinstance(value, float) else f"{key:<{width}}  {value}")
    return EXIT_OK


def _initial_condition(args, length: float):
    if args.initial == "radial":
        return RadialHalfTurn(args.k, math.pi if args.amplitude is None else args.amplitude)
    amplitude = 1.0 if args.amplitude is None else args.amplitude
    if args.initial == "pulse":
        width = args.width if args.width is not None else 5.0 * length / 128.0
        center = args.center if args.center is not None else 0.25 * length
        return GaussianPulse(center, width, amplitude)
    return PlaneMode((args.wavenumber,) * (2 if args.mode == "transversal" else 1), amplitude)


def cmd_simulate(args) -> int:
    m = _moduli(args)
    mode = WaveMode(args.mode)
    n = args.points
    if args.initial == "radial":
        if mode is not WaveMode.TRANSVERSAL_2D:
            raise UsageError("radial initial data needs --mode transversal")
        boundary, h = Boundary.DIRICHLET_IDENTITY, args.length / (n - 1)
    else:
        boundary, h = Boundary.PERIODIC, args.length / n
    dims = (n, n, 1) if mode is WaveMode.TRANSVERSAL_2D else (1, 1, n)
    try:
        grid = GridSpec(dims, h, boundary)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    v_t, v_l, _ = wave_speeds(m)
    speed = v_t if mode is WaveMode.TRANSVERSAL_2D else v_l
    dt = args.dt if args.dt is not None else args.courant * h / speed
    duration = args.duration if args.duration is not None else 0.4 * args.length / speed
    steps = max(1, int(round(duration / dt)))
    save_every = args.save_every or max(1, steps // 40)
    try:
        cfg = WaveConfig(m, grid, dt, steps, mode, _initial_condition(args, args.length), save_every)
        traj = simulate(cfg)
    except CFLViolation as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILED
    except ValueError as exc:
        raise UsageError(str(exc)) from None

    print(f"mode {mode.value}, grid {dims}, h {h:.6g}, dt {dt:.6g}, steps {steps}, courant {cfg.courant:.4f}")
    print(f"formula speed       {cfg.speed:.10g}")
    try:
        if args.initial == "pulse":
            meas = measure_speed(traj)
            print(f"measured speed      {meas.speed:.10g}  (rel. error {abs(meas.speed - cfg.speed) / cfg.speed:.3e})")
        elif args.initial == "plane":
            v = plane_mode_phase_speed(traj)
            print(f"phase speed         {v:.10g}  (rel. error {abs(v - cfg.speed) / cfg.speed:.3e})")
    except MeasurementWindowError as exc:
        print(f"speed not measured: {exc}")
    print(f"energy drift (rel.) {traj.relative_energy_drift:.3e}")

    if args.output_dir is not None:
        out = Path(args.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        for idx, snap in enumerate(traj.snapshots):
            write_field_csv(snap, out / f"snapshot_{idx:04d}.csv")
        write_series_csv(out / "energy.csv", {"time": traj.times, "energy": traj.energy_series})
        print(f"wrote {len(traj.snapshots)} snapshots and energy.csv to {out}")
    return EXIT_OK


def cmd_radial(args) -> int:
    if args.points < 4:
        raise UsageError("--points must be at least 4")
    if not args.extent > 0 or not args.k > 0:
        raise UsageError("--extent and --k must be positive")
    try:
        phi = sampled_radial_field(args.k, args.v0, args.extent, args.points)
        scene = ArrowScene.from_field(phi, glyph_length=args.glyph, canvas=args.canvas)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    c = args.points // 2
    print(f"{args.points}x{args.points} glyphs over [-{args.extent:g}, {args.extent:g}]^2, spacing {phi.grid.h:.6g}")
    print(f"centre angle {scene.angles[c, c]:.12g}")
    print(f"first horizontal ring at r = {J0_FIRST_ZERO / args.k:.12g}")
    if args.render is not None:
        render_arrow_svg(scene, args.render)
        print(f"wrote {args.render}")
    if args.csv is not None:
        write_field_csv(phi, args.csv)
        print(f"wrote {args.csv}")
    return EXIT_OK


def cmd_gradcheck(args) -> int:
    functional = Functional(args.functional)
    grid = GridSpec.cube(args.grid, boundary=Boundary(args.boundary))

    def one(seed):
        return validation.gradient_agreement(seed, functional, grid=grid, directions=args.directions)

    try:
        results = ordered_map(one, range(args.seed, args.seed + args.fields))
    except ResolutionError as exc:
        raise UsageError(str(exc)) from None
    print(f"functional {functional.value}, grid {grid.dims} {grid.boundary.value}, tolerance {args.tol:g}")
    print("  seed   full (rel)   directional (rel)")
    worst = 0.0
    for seed, (full, directional) in zip(range(args.seed, args.seed + args.fields), results):
        print(f"{seed:6d}   {full:10.3e}   {directional:10.3e}")
        worst = max(worst, full, directional)
    ok = worst <= args.tol
    print(f"worst {worst:.3e}: {'PASS' if ok else 'FAIL'}")
    return EXIT_OK if ok else EXIT_FAILED


def cmd_render(args) -> int:
    if args.input is not None:
        try:
            phi = read_field_csv(args.input)
            scene = ArrowScene.from_field(phi, glyph_length=args.glyph, canvas=args.canvas)
        except (FieldFormatError, OSError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_FAILED
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    else:
        scene = ArrowScene(np.zeros((args.points, args.points)), glyph_length=args.glyph, canvas=args.canvas)
    render_arrow_svg(scene, args.output)
    print(f"wrote {args.output} ({scene.angles.size} glyphs)")
    return EXIT_OK


# -- parser ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rotelast",
        description="Nonlinear rotational elasticity laboratory.",
        allow_abbrev=False,
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("validate", help="run the built-in verification suites", allow_abbrev=False)
    p.add_argument("--suite", choices=validation.SUITES + ("all",), default="identities")
    p.add_argument("--grid", type=positive_int, default=32, help="middle grid of the convergence study")
    p.add_argument("--seed", type=int, default=7)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("material", help="derived constants for a set of moduli", allow_abbrev=False)
    _add_moduli(p)
    p.add_argument("--json", action="store_true", help="print a JSON report")
    p.set_defaults(func=cmd_material)

    p = sub.add_parser("simulate", help="single-axis rotational wave simulation", allow_abbrev=False)
    _add_moduli(p)
    p.add_argument("--mode", choices=[m.value for m in WaveMode], default="transversal")
    p.add_argument("--initial", choices=("pulse", "plane", "radial"), default="pulse")
    p.add_argument("--points", type=positive_int, default=128, help="points per active axis")
    p.add_argument("--length", type=real, default=25.6, help="domain edge length")
    p.add_argument("--courant", type=real, default=0.5, help="v dt / h when --dt is not given")
    p.add_argument("--dt", type=real, default=None)
    p.add_argument("--duration", type=real, default=None, help="simulated time (default 0.4 L / v)")
    p.add_argument("--save-every", type=positive_int, default=None)
    p.add_argument("--amplitude", type=real, default=None)
    p.add_argument("--width", type=real, default=None, help="pulse width (default 5 L / 128)")
    p.add_argument("--center", type=real, default=None, help="pulse centre (default L / 4)")
    p.add_argument("--wavenumber", type=int, default=1, help="plane-mode index per axis")
    p.add_argument("--k", type=real, default=1.0, help="radial wavenumber")
    p.add_argument("--output-dir", default=None, help="write snapshot CSVs and energy.csv here")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("radial", help="standing radial mode v0 J0(k r) as an arrow plot", allow_abbrev=False)
    p.add_argument("--k", type=real, default=1.0)
    p.add_argument("--v0", type=real, default=math.pi, help="central angle; accepts forms like pi or pi/2")
    p.add_argument("--extent", type=real, default=10.0, help="half-width of the sampled square")
    p.add_argument("--points", type=positive_int, default=41, help="samples per side")
    p.add_argument("--glyph", type=real, default=0.8, help="arrow length in units of the spacing")
    p.add_argument("--canvas", type=positive_int, default=600, help="image size in pixels")
    p.add_argument("--render", default=None, metavar="SVG")
    p.add_argument("--csv", default=None, metavar="CSV", help="also dump the angle field")
    p.set_defaults(func=cmd_radial)

    p = sub.add_parser("gradcheck", help="analytic vs finite-difference energy gradient", allow_abbrev=False)
    p.add_argument("--functional", choices=[f.value for f in (Functional.V1, Functional.V2)], default="V1")
    p.add_argument("--grid", type=positive_int, default=6)
    p.add_argument("--boundary", choices=[b.value for b in Boundary], default="periodic")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--fields", type=positive_int, default=10)
    p.add_argument("--directions", type=positive_int, default=10)
    p.add_argument("--tol", type=real, default=1e-6)
    p.set_defaults(func=cmd_gradcheck)

    p = sub.add_parser("render", help="arrow plot of a planar angle field", allow_abbrev=False)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", default=None, metavar="CSV", help="scalar field on an (nx, ny, 1) grid")
    src.add_argument("--ground-state", action="store_true", help="all angles zero")
    p.add_argument("--points", type=positive_int, default=21, help="samples per side for --ground-state")
    p.add_argument("--glyph", type=real, default=0.8)
    p.add_argument("--canvas", type=positive_int, default=600)
    p.add_argument("--output", required=True, metavar="SVG")
    p.set_defaults(func=cmd_render)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        worker_count()
    except ValueError as exc:
        parser.error(str(exc))
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))


if __name__ == "__main__":
    sys.exit(main())
