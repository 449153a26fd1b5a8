"""Command line front end.

    photon-engine steady --config cfg.toml --out steady.csv [--t-hot K]
    photon-engine threshold --config cfg.toml [--out result.json] [grid flags]
    photon-engine sweep --config cfg.toml --out sweep.csv --t-min --t-max --points
    photon-engine phase-diagram --config cfg.toml --out phase.csv --tc-min --tc-max --tc-points
    photon-engine currents --config cfg.toml --out currents.csv --t-min --t-max --points

Exit codes: 0 on success, 1 on configuration or usage errors, 2 when the run
completed but some grid points failed to converge (their rows are flagged).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace

import numpy as np

from .config import ConfigError, ScenarioConfig, load_config
from .kinetics import (SteadyStateError, build_model, model_at_t_hot,
                       solve_steady_state, steady_state_to_csv)
from .sweeps import (SweepSpec, all_points_converged, run_currents_scan,
                     run_phase_diagram, run_pump_sweep)
from .thresholds import continuum_threshold, numeric_threshold

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_PARTIAL = 2

SCENARIOS = ("dye", "external-two-level", "external-many-level")


def apply_scenario(config: ScenarioConfig, name: str | None) -> ScenarioConfig:
    """Override the configured pump variant from the command line."""
    if name is None:
        return config
    if name == "dye":
        if config.dye.gamma_down <= 0:
            raise ConfigError("--scenario dye needs dye.gamma_down > 0")
        return replace(config, pump=replace(config.pump, kind="dye",
                                            t_hot=None, two_level=None))
    t_hot = config.pump.t_hot if config.pump.t_hot is not None else 1000.0
    if name == "external-two-level":
        if config.pump.two_level is None:
            raise ConfigError(
                "--scenario external-two-level needs [pump.two_level] "
                "(omega_s, g_s) in the config")
        return replace(config, pump=replace(config.pump, kind="external",
                                            t_hot=t_hot))
    if name == "external-many-level":
        return replace(config, pump=replace(config.pump, kind="external",
                                            t_hot=t_hot, two_level=None))
    raise ConfigError(f"unknown scenario {name!r}")


def _add_common(sub: argparse.ArgumentParser):
    sub.add_argument("--config", required=True, help="TOML or JSON config file")
    sub.add_argument("--scenario", choices=SCENARIOS, default=None,
                     help="override the pump variant from the config")


def _add_grid(sub: argparse.ArgumentParser):
    sub.add_argument("--t-min", type=float, required=True,
                     help="lowest hot temperature, K")
    sub.add_argument("--t-max", type=float, required=True,
                     help="highest hot temperature, K")
    sub.add_argument("--points", type=int, default=21)
    sub.add_argument("--log", action="store_true", help="logarithmic grid")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="photon-engine",
        description="Photon-gas kinetics in dye-filled microcavities")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("steady", help="single steady state to CSV")
    _add_common(p)
    p.add_argument("--out", required=True)
    p.add_argument("--t-hot", type=float, default=None,
                   help="hot temperature override, K")

    p = subs.add_parser("threshold", help="condensation threshold to JSON")
    _add_common(p)
    p.add_argument("--out", default=None, help="JSON output (default stdout)")
    p.add_argument("--t-min", type=float, default=None)
    p.add_argument("--t-max", type=float, default=None)
    p.add_argument("--points", type=int, default=17)
    p.add_argument("--method", choices=("numeric", "continuum"),
                   default="numeric")

    p = subs.add_parser("sweep", help="occupation vs T_h to CSV")
    _add_common(p)
    p.add_argument("--out", required=True)
    _add_grid(p)

    p = subs.add_parser("phase-diagram", help="threshold T_h vs T_c to CSV")
    _add_common(p)
    p.add_argument("--out", required=True)
    p.add_argument("--tc-min", type=float, required=True)
    p.add_argument("--tc-max", type=float, required=True)
    p.add_argument("--tc-points", type=int, default=5)

    p = subs.add_parser("currents", help="heat currents vs T_h to CSV")
    _add_common(p)
    p.add_argument("--out", required=True)
    _add_grid(p)
    return parser


def _load(args) -> ScenarioConfig:
    return apply_scenario(load_config(args.config), args.scenario)


def cmd_steady(args) -> int:
    config = _load(args)
    if args.t_hot is not None:
        model = model_at_t_hot(config, args.t_hot)
    else:
        model = build_model(config)
    steady = solve_steady_state(model, config.solver)
    steady_state_to_csv(steady, args.out)
    print(f"wrote {args.out}: N_ph = {steady.n_photon:.6g}, "
          f"f0 = {steady.condensate_fraction:.4g}, p_e = {steady.p_e:.6g}")
    return EXIT_OK if steady.converged else EXIT_PARTIAL


def cmd_threshold(args) -> int:
    config = _load(args)
    if args.method == "continuum":
        result = continuum_threshold(config.effective_ladder(),
                                     config.dye.t_cold, units=config.units)
    else:
        if args.t_min is None or args.t_max is None:
            raise ConfigError("numeric threshold needs --t-min and --t-max")
        grid = np.geomspace(args.t_min, args.t_max, args.points)
        result = numeric_threshold(config, grid)
    payload = {"t_hot_critical_K": result.t_hot_critical,
               "method": result.method, "residual": result.residual,
               "bracket": result.bracket,
               "aux": {k: v for k, v in result.aux.items() if k != "grid_f0"}}
    text = json.dumps(payload, indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return EXIT_OK


def cmd_sweep(args) -> int:
    config = _load(args)
    spec = SweepSpec(start=args.t_min, stop=args.t_max, count=args.points,
                     log=args.log)
    manifest = run_pump_sweep(config, spec, args.out)
    ok = all_points_converged(manifest)
    print(f"wrote {args.out} ({len(manifest.points)} points, "
          f"{'all converged' if ok else 'some points failed'})")
    return EXIT_OK if ok else EXIT_PARTIAL


def cmd_phase_diagram(args) -> int:
    config = _load(args)
    grid = np.linspace(args.tc_min, args.tc_max, args.tc_points)
    manifest = run_phase_diagram(config, grid, args.out)
    ok = all_points_converged(manifest)
    print(f"wrote {args.out} ({len(manifest.points)} points, "
          f"{'all converged' if ok else 'some points failed'})")
    return EXIT_OK if ok else EXIT_PARTIAL


def cmd_currents(args) -> int:
    config = _load(args)
    spec = SweepSpec(start=args.t_min, stop=args.t_max, count=args.points,
                     log=args.log)
    manifest = run_currents_scan(config, spec, args.out)
    ok = all_points_converged(manifest)
    print(f"wrote {args.out} ({len(manifest.points)} points, "
          f"{'all converged' if ok else 'some points failed'})")
    return EXIT_OK if ok else EXIT_PARTIAL


_COMMANDS = {
    "steady": cmd_steady,
    "threshold": cmd_threshold,
    "sweep": cmd_sweep,
    "phase-diagram": cmd_phase_diagram,
    "currents": cmd_currents,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SteadyStateError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARTIAL


if __name__ == "__main__":
    sys.exit(main())
