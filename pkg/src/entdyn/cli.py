"""Command-line entry point: ``entdyn <subcommand> ...``.

Exit codes: 0 success, 2 invalid config or arguments, 3 bracket failure
(partial CSV is still written), 4 file I/O error.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from . import config as cfg
from .dynamics import Propagator, TimeGrid, default_grid
from .errors import BracketFailure, CouplingTooLarge, IoError, SchemaError
from .metrics import DEFAULT_THRESHOLD, pt_series
from .models import PRESETS, DirectModel, Model, build, preset
from .output import fmt, write_sweep_csv
from .perturbative import s_range, tlb, tuc_star
from .svg import negativity_curve_svg, phase_diagram_svg
from .sweep import (DEFAULT_TOL, SweepResult, SweepRow, find_critical_T, negativity_curve,
                    phase_diagram)

EXIT_OK, EXIT_SCHEMA, EXIT_BRACKET, EXIT_IO = 0, 2, 3, 4


@dataclass(frozen=True)
class Figure:
    task: str
    preset: str
    gammas: tuple[float, ...] = ()
    temperatures: tuple[float, ...] = ()
    title: str = ""


def _logspace(a: float, b: float, n: int) -> tuple[float, ...]:
    return tuple(float(x) for x in np.logspace(a, b, n))


FIGURES = {
    "fig1": Figure("phase-diagram", "two-spin", _logspace(-3, 1, 13),
                   title="two spins, direct coupling"),
    "fig2": Figure("phase-diagram", "slow-spins-fast-bath", _logspace(-2, 0, 9),
                   title="slow spins, fast common bath"),
    "fig3": Figure("phase-diagram", "fast-spins-slow-bath", _logspace(-1.5, 0, 7),
                   title="fast spins, slow common bath"),
    "fig4": Figure("negativity-curve", "fourlevel-a", (0.05,),
                   tuple(float(x) for x in np.linspace(0.05, 1.2, 24)),
                   title="four-level pair a, γ = 0.05"),
    "fig5": Figure("negativity-curve", "fourlevel-b", (0.05,),
                   tuple(float(x) for x in np.linspace(0.05, 1.2, 24)),
                   title="four-level pair b, γ = 0.05"),
}


def _temperature(text: str) -> float:
    if text.lower() in ("inf", "infinite", "infinity"):
        return math.inf
    value = float(text)
    if value < 0:
        raise argparse.ArgumentTypeError("temperature must be >= 0")
    return value


def _add_model_args(p: argparse.ArgumentParser, gamma_many: bool = False) -> None:
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--preset", choices=PRESETS)
    src.add_argument("--config", help="take the model from a JSON config file")
    if gamma_many:
        p.add_argument("--gammas", type=float, nargs="+", help="coupling strengths")
    else:
        p.add_argument("--gamma", type=float, help="coupling strength (preset default if omitted)")
    p.add_argument("--omega", type=float, default=1.0, help="energy unit for presets")
    p.add_argument("--bath-coupling", choices=("tridiagonal", "identity"), default="tridiagonal")


def _add_sweep_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--t-end", type=float, help="explicit horizon (default: automatic)")
    p.add_argument("--steps", type=int, help="time steps for an explicit horizon")
    p.add_argument("--horizon-multiplier", type=float, default=1.0)
    p.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--threads", type=int, help="worker threads (capped by ENTDYN_THREADS)")


def _add_outputs(p: argparse.ArgumentParser, csv_default: str | None = None) -> None:
    p.add_argument("--csv", default=csv_default, required=csv_default is None)
    p.add_argument("--svg")


def parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="entdyn",
                                 description="Thermal entanglement dynamics of weakly coupled systems.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tlb", help="evaluate the lower-bound temperature formula")
    _add_model_args(p)

    p = sub.add_parser("evolve", help="min PT eigenvalue and negativity over time")
    _add_model_args(p)
    _add_sweep_args(p)
    p.add_argument("--T", dest="temperatures", type=_temperature, nargs="+", required=True)
    p.add_argument("--csv", required=True, help="summary table (one row per temperature)")
    p.add_argument("--series", help="optional per-time CSV (T, t, min_pt_eig, negativity)")

    p = sub.add_parser("negativity-curve", help="time-averaged negativity against T")
    _add_model_args(p)
    _add_sweep_args(p)
    grp = p.add_mutually_exclusive_group(required=True)
    grp.add_argument("--T", dest="temperatures", type=_temperature, nargs="+")
    grp.add_argument("--T-grid", nargs=3, metavar=("START", "STOP", "NUM"))
    _add_outputs(p)

    p = sub.add_parser("phase-diagram", help="numeric T_uc and T_lb over a γ grid")
    _add_model_args(p, gamma_many=True)
    _add_sweep_args(p)
    p.add_argument("--T-range", type=float, nargs=2, metavar=("LO", "HI"))
    _add_outputs(p)

    p = sub.add_parser("s-range", help="range of S(t) = cos t + cos √2t + cos √3t")
    p.add_argument("--samples", type=float, default=1e6)
    p.add_argument("--dt", type=float, default=0.1)

    p = sub.add_parser("validate", help="check a JSON config and report findings")
    p.add_argument("config")

    p = sub.add_parser("run", help="run the experiment described by a JSON config")
    p.add_argument("config")
    p.add_argument("--threads", type=int)

    p = sub.add_parser("reproduce", help="run one of the figure presets")
    p.add_argument("figure", choices=sorted(FIGURES))
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--threads", type=int)
    p.add_argument("--no-svg", action="store_true")
    return ap


def _model(args) -> Model:
    gamma = getattr(args, "gamma", None)
    if gamma is None and getattr(args, "gammas", None):
        gamma = args.gammas[0]
    if args.preset:
        return preset(args.preset, gamma, omega=args.omega, bath_coupling=args.bath_coupling)
    raw = cfg.load(args.config)
    errors = [f for f in cfg.schema_findings(raw) if f.level == "error"]
    if errors:
        raise SchemaError("; ".join(f.message for f in errors))
    return cfg.build_model(raw["model"], gamma if gamma is not None else raw.get("gamma"))


def _grid(args) -> TimeGrid | None:
    if args.t_end is None:
        return None
    return TimeGrid(args.t_end, args.steps or 1000)


def _write_svg(text: str, path: str | Path | None) -> None:
    if path:
        Path(path).write_text(text, encoding="utf-8")


def _check_failures(result: SweepResult) -> int:
    failed = [b for b in result.boundaries if b.error]
    for b in failed:
        print(f"bracket failure at gamma={fmt(b.gamma)}: {b.error}", file=sys.stderr)
    return EXIT_BRACKET if failed else EXIT_OK


def _print_boundaries(result: SweepResult) -> None:
    for b in result.boundaries:
        print(f"gamma={fmt(b.gamma)} T_uc_numeric={fmt(b.T_uc_numeric)} "
              f"T_lc_numeric={fmt(b.T_lc_numeric)} T_lb={fmt(b.T_lb)}")


def run_phase_diagram(model: Model, gammas: Sequence[float], csv_path, svg_path=None,
                      T_range=None, grid=None, tol=DEFAULT_TOL, threshold=DEFAULT_THRESHOLD,
                      horizon_multiplier=1.0, workers=None, title="") -> int:
    result = phase_diagram(model, sorted(gammas), T_range, grid, tol, threshold,
                           horizon_multiplier, workers)
    write_sweep_csv(result, csv_path)
    _write_svg(phase_diagram_svg(result, title), svg_path)
    _print_boundaries(result)
    return _check_failures(result)


def run_negativity_curve(model: Model, temperatures: Sequence[float], csv_path, svg_path=None,
                         grid=None, tol=DEFAULT_TOL, threshold=DEFAULT_THRESHOLD,
                         horizon_multiplier=1.0, workers=None, title="") -> int:
    result = negativity_curve(model, sorted(temperatures), grid, threshold, horizon_multiplier,
                              True, tol, workers)
    write_sweep_csv(result, csv_path)
    _write_svg(negativity_curve_svg(result, title), svg_path)
    for name, value in sorted(result.annotations.items()):
        print(f"{name}={fmt(value)}")
    return EXIT_OK


def run_critical_temperature(model: Model, csv_path, T_range=None, grid=None, tol=DEFAULT_TOL,
                             threshold=DEFAULT_THRESHOLD, horizon_multiplier=1.0,
                             workers=None) -> int:
    lo, hi = T_range if T_range else (None, None)
    try:
        crit = find_critical_T(model, None, grid, lo, hi, tol, threshold, horizon_multiplier,
                               workers)
    except BracketFailure as exc:
        write_sweep_csv(SweepResult(rows=list(exc.rows)), csv_path)
        print(f"bracket failure: {exc}", file=sys.stderr)
        return EXIT_BRACKET
    result = SweepResult(rows=list(crit.rows))
    pred = tlb(model)
    if pred.defined:
        result.annotations["T_lb"] = pred.value
    result.annotations["T_uc_numeric"] = crit.T_uc_numeric
    result.annotations["T_lc_numeric"] = crit.T_lc_numeric
    write_sweep_csv(result, csv_path)
    print(f"T_uc_numeric={fmt(crit.T_uc_numeric)} T_lc_numeric={fmt(crit.T_lc_numeric)} "
          f"monotone={str(crit.monotone).lower()}")
    return EXIT_OK


def run_evolve(model: Model, temperatures: Sequence[float], csv_path, series_path=None,
               grid=None, threshold=DEFAULT_THRESHOLD, horizon_multiplier=1.0) -> int:
    grid = grid or default_grid(model, horizon_multiplier)
    prop = Propagator(build(model)[1])
    rows, series = [], []
    times = grid.times
    for T in sorted(temperatures):
        mins, negs = pt_series(model, T, grid, prop)
        k = int(np.argmin(mins))
        rows.append(SweepRow(model.gamma, T, grid.t_end, float(mins[k]), float(np.mean(negs)),
                             bool(mins[k] < -threshold)))
        series.extend((T, t, m, n) for t, m, n in zip(times, mins, negs))
    write_sweep_csv(SweepResult(rows=rows), csv_path)
    if series_path:
        with open(series_path, "w", encoding="utf-8", newline="") as fh:
            fh.write("T,t,min_pt_eig,negativity\n")
            for T, t, m, n in series:
                fh.write(f"{fmt(T)},{fmt(t)},{fmt(m)},{fmt(n)}\n")
    for r in rows:
        print(f"T={fmt(r.T)} min_pt_eig={fmt(r.min_pt_eig)} neg_avg={fmt(r.neg_avg)} {r.verdict}")
    return EXIT_OK


def run_config(config: cfg.ExperimentConfig, workers: int | None = None) -> int:
    common = dict(grid=config.grid, tol=config.tolerance, threshold=config.threshold,
                  horizon_multiplier=config.horizon_multiplier, workers=workers)
    if config.task == "phase-diagram":
        return run_phase_diagram(config.model, config.gammas, config.csv_path, config.svg_path,
                                 T_range=config.bracket, **common)
    if config.task == "negativity-curve":
        return run_negativity_curve(config.model, config.temperatures, config.csv_path,
                                    config.svg_path, **common)
    if config.task == "critical-temperature":
        return run_critical_temperature(config.model, config.csv_path, config.bracket, **common)
    return run_evolve(config.model, config.temperatures, config.csv_path, grid=config.grid,
                      threshold=config.threshold,
                      horizon_multiplier=config.horizon_multiplier)


def reproduce(name: str, out_dir: str | Path = ".", workers: int | None = None,
              svg: bool = True) -> int:
    fig = FIGURES[name]
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / f"{name}.csv"
    svg_path = out / f"{name}.svg" if svg else None
    model = preset(fig.preset, fig.gammas[0])
    if fig.task == "phase-diagram":
        return run_phase_diagram(model, fig.gammas, csv_path, svg_path, workers=workers,
                                 title=fig.title)
    return run_negativity_curve(model, fig.temperatures, csv_path, svg_path, workers=workers,
                                title=fig.title)


def _cmd_tlb(args) -> int:
    model = _model(args)
    pred = tlb(model)
    value = fmt(pred.value) if pred.defined else "undefined"
    print(f"T_lb={value}")
    print(f"log_argument={fmt(pred.log_argument)}")
    print(f"case={pred.case}")
    if isinstance(model, DirectModel):
        try:
            print(f"T_uc_star={fmt(tuc_star(model))}")
        except CouplingTooLarge as exc:
            print(f"T_uc_star=undefined ({exc})")
    return EXIT_OK


def _cmd_validate(args) -> int:
    raw = cfg.load(args.config)
    findings = cfg.validate(raw)
    for f in findings:
        print(f)
    if not findings:
        print("ok")
    return EXIT_SCHEMA if any(f.level == "error" for f in findings) else EXIT_OK


def _dispatch(args) -> int:
    cmd = args.command
    if cmd == "tlb":
        return _cmd_tlb(args)
    if cmd == "s-range":
        r = s_range(int(args.samples), dt=args.dt)
        print(f"min={r.min:.6f}")
        print(f"max={r.max:.6f}")
        return EXIT_OK
    if cmd == "validate":
        return _cmd_validate(args)
    if cmd == "run":
        return run_config(cfg.parse(cfg.load(args.config)), args.threads)
    if cmd == "reproduce":
        return reproduce(args.figure, args.out, args.threads, not args.no_svg)

    model = _model(args)
    sweep = dict(grid=_grid(args), threshold=args.threshold,
                 horizon_multiplier=args.horizon_multiplier)
    if cmd == "evolve":
        return run_evolve(model, args.temperatures, args.csv, args.series, **sweep)
    if cmd == "negativity-curve":
        if args.temperatures:
            temps = args.temperatures
        else:
            start, stop, num = args.T_grid
            temps = list(np.linspace(float(start), float(stop), int(num)))
        return run_negativity_curve(model, temps, args.csv, args.svg, tol=args.tol,
                                    workers=args.threads, **sweep)
    gammas = args.gammas or [model.gamma]
    return run_phase_diagram(model, gammas, args.csv, args.svg, T_range=args.T_range,
                             tol=args.tol, workers=args.threads, **sweep)


def main(argv: Sequence[str] | None = None) -> int:
    args = parser().parse_args(argv)
    try:
        return _dispatch(args)
    except SchemaError as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except (IoError, OSError) as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA


if __name__ == "__main__":
    sys.exit(main())
