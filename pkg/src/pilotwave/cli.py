"""Command-line entry point: ``pilotwave {fields,trajectories,visibility,verify}``.

Exit status: 0 on success, 1 when a verification check fails, 2 on usage or
configuration errors.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import observables
from .config import ConfigError, GridSpec, RunOptions, RunConfig, load_config
from .export import export_field_grid, export_profile, export_trajectories
from .integrator import Status, integrate_ensemble
from .model import ScenarioError, make_scenario
from .report import VerifyOptions, run_verify

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _frames(text):
    """``N`` for N uniform frames, or a comma-separated list of times."""
    text = text.strip()
    if "," not in text and text.isdigit():
        n = int(text)
        if n < 1:
            raise argparse.ArgumentTypeError("frame count must be >= 1")
        return n
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid frame list {text!r}") from None


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", choices=("ewea", "ewua", "uwea"),
                        help="preset (default ewea, or the config's scenario key)")
    common.add_argument("--config", type=Path, help="INI configuration file")
    common.add_argument("--out", type=Path, default=Path("."), help="output directory")

    p = _Parser(prog="pilotwave", description="Two-pinhole pilot-wave simulation.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    f = sub.add_parser("fields", parents=[common], help="export intensity or quantum potential grids")
    f.add_argument("--which", choices=("intensity", "qpotential"), default="intensity")
    f.add_argument("--frames", type=_frames,
                   help="frame count over [0, t-final] or comma-separated times")
    f.add_argument("--t-final", type=float, help="end of the uniform frame span (s)")
    f.add_argument("--grid-n", type=int, help="points per axis")

    t = sub.add_parser("trajectories", parents=[common], help="integrate and export trajectories")
    init = t.add_mutually_exclusive_group()
    init.add_argument("--grid-init", type=int, metavar="N", help="N x N lattice per pinhole")
    init.add_argument("--born", type=int, metavar="N", help="N Born-rule samples")
    t.add_argument("--seed", type=int, help="sampling seed")
    t.add_argument("--t-final", type=float)
    t.add_argument("--dt", type=float)
    t.add_argument("--n-traj", type=int, help="integrate only the first N initial positions")

    v = sub.add_parser("visibility", parents=[common], help="central-fringe visibility")
    v.add_argument("--t-final", type=float, help="scan time (s), default 1.5e-9")

    r = sub.add_parser("verify", parents=[common], help="run the acceptance checks")
    r.add_argument("--n-traj", type=int, help="equivariance ensemble size (default 20000)")
    r.add_argument("--seed", type=int)
    r.add_argument("--skip", type=lambda s: tuple(int(v) for v in s.split(",") if v),
                   default=(), help="comma-separated criterion numbers to skip")
    return p


def _load(args) -> RunConfig:
    if args.config is not None:
        cfg = load_config(args.config, args.scenario)
        if args.scenario and cfg.scenario.kind.value not in (args.scenario, "custom"):
            raise ConfigError(f"--scenario {args.scenario} conflicts with the config's scenario")
        return cfg
    return RunConfig(make_scenario(args.scenario or "ewea"), GridSpec(), RunOptions())


def _cmd_fields(args, cfg):
    grid = cfg.grid
    if args.grid_n is not None:
        grid = replace(grid, nx=args.grid_n, nz=args.grid_n)
    if isinstance(args.frames, tuple):
        grid = replace(grid, frames=args.frames)
    elif args.frames is not None or args.t_final is not None:
        n = args.frames or 6
        end = args.t_final if args.t_final is not None else grid.frame_times(args.which)[-1]
        grid = replace(grid, frames=tuple(np.linspace(0.0, end, n)) if n > 1 else (end,))
    res = export_field_grid(cfg.scenario, grid, args.which, args.out)
    print(f"wrote {len(res.files)} {args.which} frame(s) to {args.out}; masked cells: {res.masked_points}")
    return EXIT_OK


def _cmd_trajectories(args, cfg):
    opts = cfg.options
    upd = {k: getattr(args, k) for k in ("t_final", "dt", "seed") if getattr(args, k) is not None}
    if args.grid_init is not None:
        upd.update(grid_init=args.grid_init, born=None)
    if args.born is not None:
        upd["born"] = args.born
    opts = replace(opts, **upd)
    if opts.born is not None:
        inits = observables.born_sample_initials(cfg.scenario, opts.born, opts.seed)
    else:
        inits = observables.square_grid_initials(cfg.scenario, opts.grid_init)
    points = inits.points if args.n_traj is None else inits.points[:args.n_traj]
    trajs = integrate_ensemble(cfg.scenario, points, 0.0, opts.t_final, opts.dt, opts.stride)
    path = export_trajectories(trajs, Path(args.out) / "trajectories.csv")
    masked = sum(tr.status is Status.NODE_MASKED for tr in trajs)
    print(f"wrote {len(trajs)} trajectories to {path}; node-masked: {masked}")
    return EXIT_OK


def _cmd_visibility(args, cfg):
    t = args.t_final if args.t_final is not None else 1.5e-9
    profile = observables.fringe_profile(cfg.scenario, t)
    args.out.mkdir(parents=True, exist_ok=True)
    export_profile(profile, Path(args.out) / "profile.csv")
    try:
        vis = observables.central_fringe_visibility(profile)
    except observables.NoFringeError as exc:
        print(f"no fringe: {exc}", file=sys.stderr)
        return EXIT_FAIL
    print(f"visibility={vis:.6g}")
    return EXIT_OK


def _cmd_verify(args, cfg):
    defaults = VerifyOptions()
    opts = VerifyOptions(skip=args.skip,
                         n_traj=args.n_traj if args.n_traj is not None else defaults.n_traj,
                         seed=args.seed if args.seed is not None else defaults.seed)
    report = run_verify(cfg.scenario, opts)
    print(report.text())
    print()
    print(report.key_values())
    args.out.mkdir(parents=True, exist_ok=True)
    (Path(args.out) / "report.txt").write_text(report.key_values() + "\n", encoding="utf-8")
    return EXIT_OK if report.passed else EXIT_FAIL


_COMMANDS = {"fields": _cmd_fields, "trajectories": _cmd_trajectories,
             "visibility": _cmd_visibility, "verify": _cmd_verify}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _load(args)
        return _COMMANDS[args.command](args, cfg)
    except (ConfigError, ScenarioError, ValueError, OSError) as exc:
        print(f"pilotwave: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
