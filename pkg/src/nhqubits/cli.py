"""Command-line interface.

Subcommands::

    nhqubits evolve         pure-state concurrence and populations
    nhqubits master         no-jump conditioned density-matrix evolution
    nhqubits spectrum       complex eigenvalues as functions of gamma
    nhqubits phase-diagram  PT phase over an (omega, gamma) grid + EP line
    nhqubits ep             locate the exceptional point in gamma

A scenario comes from ``--config`` (a JSON document, or a CSV previously
written by this tool, whose ``# config:`` header line is reused) and is then
overridden by individual flags.  Exit codes: 0 success, 2 configuration
error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from . import __version__
from ._accel import backend
from .dynamics import (
    METHODS,
    StepSizeUnderflowError,
    evolve_master,
    evolve_pure,
    pure_density,
    time_grid,
)
from .linalg import EigenConvergenceError
from .model import BASIS_LABELS, LOSS_LEVELS, SystemParams, basis_state, build_jump_ops, build_total_h
from .spectrum import (
    EPSILON_PHASE,
    BracketError,
    NearExceptionalPointError,
    analyze,
    classify_phase,
    find_ep,
    sweep_phase_diagram,
    track_branches,
)
from .tables import ResultTable, render, write

log = logging.getLogger("nhqubits")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

FORMATS = ("csv", "json")


class ConfigError(ValueError):
    pass


class NumericalFailure(RuntimeError):
    """Raised after partial output was produced (e.g. full decay)."""


@dataclass
class ScenarioConfig:
    params: SystemParams = field(
        default_factory=lambda: SystemParams.symmetric(J=10.0, omega=1.6)
    )
    initial_state: str | list = "ff"
    t_max: float = 20.0
    n_samples: int = 2001
    method: str = "exact"
    output: str | None = None
    format: str = "csv"
    gamma_range: list | None = None
    n_points: int = 301
    omega_range: list | None = None
    resolution: list | None = None
    bracket: list | None = None
    epsilon: float = EPSILON_PHASE
    workers: int = 1

    def validate(self):
        if not np.isfinite(self.t_max) or self.t_max <= 0:
            raise ConfigError(f"t_max: must be > 0, got {self.t_max}")
        if self.n_samples < 2:
            raise ConfigError(f"n_samples: must be >= 2, got {self.n_samples}")
        if self.method not in METHODS:
            raise ConfigError(f"method: must be one of {METHODS}, got {self.method!r}")
        if self.format not in FORMATS:
            raise ConfigError(f"format: must be one of {FORMATS}, got {self.format!r}")
        if self.n_points < 1:
            raise ConfigError("n_points: must be >= 1")
        if self.workers < 1:
            raise ConfigError("workers: must be >= 1")
        if not self.epsilon > 0:
            raise ConfigError("epsilon: must be > 0")
        initial_amplitudes(self.initial_state)
        return self

    def to_json(self) -> dict:
        d = asdict(self)
        d["params"] = self.params.to_dict()
        return d


def _parse_complex(value, where):
    if isinstance(value, bool):
        raise ConfigError(f"{where}: expected a number")
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, str):
        try:
            return complex(value.replace(" ", ""))
        except ValueError:
            pass
    raise ConfigError(f"{where}: cannot read {value!r} as a complex amplitude")


def initial_amplitudes(spec) -> np.ndarray:
    """Basis label or four amplitudes -> normalized state vector."""
    if isinstance(spec, str):
        try:
            return basis_state(spec)
        except ValueError as exc:
            raise ConfigError(f"initial_state: {exc}") from None
    if not isinstance(spec, (list, tuple)) or len(spec) != 4:
        raise ConfigError(f"initial_state: expected one of {BASIS_LABELS} or 4 amplitudes")
    psi = np.array([_parse_complex(v, f"initial_state[{i}]") for i, v in enumerate(spec)])
    nrm = np.linalg.norm(psi)
    if not np.isfinite(nrm) or nrm == 0:
        raise ConfigError("initial_state: amplitudes must be finite and not all zero")
    return psi / nrm


_SYMMETRIC_KEYS = {"gamma": ("gamma1", "gamma2"), "omega": ("omega1", "omega2"),
                   "alpha": ("alpha1", "alpha2"), "delta": ("delta1", "delta2")}
_PARAM_KEYS = {f.name for f in fields(SystemParams)}


def params_from_dict(d: dict, base: SystemParams | None = None) -> SystemParams:
    if not isinstance(d, dict):
        raise ConfigError("params: expected an object")
    values = (base or SystemParams()).to_dict()
    for key, value in d.items():
        if key in _SYMMETRIC_KEYS:
            for k in _SYMMETRIC_KEYS[key]:
                values[k] = value
        elif key in _PARAM_KEYS:
            values[key] = value
        elif key == "j":
            values["J"] = value
        else:
            raise ConfigError(f"params.{key}: unknown parameter")
    for key, value in values.items():
        if key != "loss_level" and (isinstance(value, bool) or not isinstance(value, (int, float))):
            raise ConfigError(f"params.{key}: expected a number, got {value!r}")
    try:
        return SystemParams(**values)
    except ValueError as exc:
        raise ConfigError(f"params: {exc}") from None


def _read_config_text(path: Path) -> dict:
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from None
    if path.suffix.lower() == ".csv" or text.startswith("# "):
        for line in text.splitlines():
            if line.startswith("# config: "):
                text = line[len("# config: "):]
                break
        else:
            raise ConfigError(f"{path}: no '# config:' header line")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    return data


_CONFIG_KEYS = {f.name for f in fields(ScenarioConfig)}


def config_from_dict(data: dict, base: ScenarioConfig | None = None) -> ScenarioConfig:
    cfg = base or ScenarioConfig()
    updates = {}
    for key, value in data.items():
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"{key}: unknown configuration field")
        if key == "params":
            updates["params"] = params_from_dict(value, cfg.params)
        elif key in ("t_max", "epsilon"):
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ConfigError(f"{key}: expected a number, got {value!r}")
            updates[key] = float(value)
        elif key in ("n_samples", "n_points", "workers"):
            if isinstance(value, bool) or not isinstance(value, int):
                raise ConfigError(f"{key}: expected an integer, got {value!r}")
            updates[key] = value
        elif key in ("gamma_range", "omega_range", "bracket", "resolution"):
            if value is not None and (not isinstance(value, list) or len(value) != 2):
                raise ConfigError(f"{key}: expected a list of two numbers")
            updates[key] = value
        else:
            updates[key] = value
    return replace(cfg, **updates)


def load_config(path: str | Path) -> ScenarioConfig:
    return config_from_dict(_read_config_text(Path(path))).validate()


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _metadata(command: str, cfg: ScenarioConfig, **extra) -> dict:
    meta = {
        "tool": "nhqubits",
        "version": __version__,
        "command": command,
        "backend": backend(),
        "params": cfg.params.to_dict(),
    }
    meta.update(extra)
    meta["config"] = cfg.to_json()
    return meta


def cmd_evolve(cfg: ScenarioConfig) -> ResultTable:
    """Columns t, P1..P4, norm, concurrence for the pure-state evolution."""
    cfg.validate()
    h = build_total_h(cfg.params)
    psi0 = initial_amplitudes(cfg.initial_state)
    traj = evolve_pure(h, psi0, time_grid(cfg.t_max, cfg.n_samples), cfg.method)
    rows = [
        [t, *pops, nrm, c]
        for t, pops, nrm, c in zip(traj.times, traj.populations, traj.norm, traj.concurrence)
    ]
    meta = _metadata(
        "evolve", cfg,
        grid={"t_max": cfg.t_max, "n_samples": cfg.n_samples},
        solver={"method": cfg.method, "rtol": 1e-9, "atol": 1e-12},
        terminated_at=traj.terminated_at,
    )
    return ResultTable(["t", "P1", "P2", "P3", "P4", "norm", "concurrence"], rows, meta, "evolve")


def cmd_master(cfg: ScenarioConfig) -> ResultTable:
    """Columns t, P (no-jump probability), P1..P4 of rho/P, concurrence."""
    cfg.validate()
    h = build_total_h(cfg.params)
    rho0 = pure_density(initial_amplitudes(cfg.initial_state))
    traj = evolve_master(h, build_jump_ops(cfg.params), rho0,
                         time_grid(cfg.t_max, cfg.n_samples), cfg.method)
    rows = [
        [t, p, *pops, c]
        for t, p, pops, c in zip(traj.times, traj.weight, traj.populations, traj.concurrence)
    ]
    meta = _metadata(
        "master", cfg,
        grid={"t_max": cfg.t_max, "n_samples": cfg.n_samples},
        solver={"method": cfg.method, "rtol": 1e-9, "atol": 1e-12},
        terminated_at=traj.terminated_at,
    )
    return ResultTable(["t", "P", "P1", "P2", "P3", "P4", "concurrence"], rows, meta, "master")


def cmd_spectrum(cfg: ScenarioConfig) -> ResultTable:
    """Eigenvalues versus gamma, continuity-tracked across rows."""
    cfg.validate()
    lo, hi = cfg.gamma_range or (0.0, 3.0)
    if lo < 0 or hi < lo:
        raise ConfigError("gamma_range: must satisfy 0 <= lo <= hi")
    gammas = np.linspace(lo, hi, cfg.n_points)
    values, spreads, labels = [], [], []
    for g in gammas:
        try:
            s = analyze(cfg.params.with_gamma(g))
        except EigenConvergenceError as exc:
            log.warning("eigensolver failed at gamma=%g: %s", g, exc)
            values.append(np.full(4, np.nan + 0j))
            spreads.append(np.nan)
            labels.append("unclassified")
            continue
        values.append(s.eigenvalues)
        spreads.append(s.max_im_spread)
        labels.append(classify_phase(s, cfg.epsilon).label)
    tracked = track_branches(values)
    rows = [
        [g, *lam.real, *lam.imag, sp, lab]
        for g, lam, sp, lab in zip(gammas, tracked, spreads, labels)
    ]
    columns = ["gamma", "re1", "re2", "re3", "re4", "im1", "im2", "im3", "im4",
               "max_im_spread", "phase_label"]
    meta = _metadata("spectrum", cfg,
                     grid={"gamma_range": [lo, hi], "n_points": cfg.n_points},
                     epsilon=cfg.epsilon)
    return ResultTable(columns, rows, meta, "spectrum")


def cmd_phase_diagram(cfg: ScenarioConfig) -> list[ResultTable]:
    """Long-format cell labels plus a table of EP boundary samples."""
    cfg.validate()
    omega_range = cfg.omega_range or [0.1, 5.0]
    gamma_range = cfg.gamma_range or [0.1, 5.0]
    resolution = cfg.resolution or [50, 50]
    try:
        pd = sweep_phase_diagram(omega_range, gamma_range, resolution, cfg.params,
                                 epsilon=cfg.epsilon, workers=cfg.workers)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    rows = []
    for i, omega in enumerate(pd.omega):
        for k, gamma in enumerate(pd.gamma):
            rows.append([omega, gamma, pd.labels[i, k], pd.im_spread[i, k]])
    meta = _metadata("phase-diagram", cfg,
                     grid={"omega_range": omega_range, "gamma_range": gamma_range,
                           "resolution": resolution},
                     epsilon=cfg.epsilon,
                     unclassified=int(np.sum(pd.labels == "unclassified")))
    cells = ResultTable(["omega", "gamma", "label", "max_im_spread"], rows, meta, "cells")
    boundary = ResultTable(["omega", "gamma_ep"], [list(b) for b in pd.ep_boundary], {}, "boundary")
    return [cells, boundary]


def cmd_ep(cfg: ScenarioConfig) -> dict:
    cfg.validate()
    lo, hi = cfg.bracket or (0.1, 3.0)
    if not lo < hi:
        raise ConfigError(f"bracket: expected lo < hi, got [{lo}, {hi}]")
    try:
        r = find_ep(cfg.params, lo, hi, epsilon=cfg.epsilon)
    except BracketError as exc:
        raise ConfigError(f"bracket: {exc}") from None
    return {
        "gamma_ep": r.gamma_ep,
        "min_gap": r.min_gap,
        "iterations": r.iterations,
        "bracket": list(r.bracket),
        "params": cfg.params.to_dict(),
        "epsilon": cfg.epsilon,
    }


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _common_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", help="JSON scenario file (or a CSV written by this tool)")
    p.add_argument("--gamma", type=float, help="dissipation rate of both qubits, 1/us")
    p.add_argument("--omega", type=float, help="drive amplitude of both qubits, rad/us")
    p.add_argument("--j", type=float, dest="J", help="exchange coupling, rad/us")
    p.add_argument("--alpha", type=float, help="f->e relaxation rate of both qubits, 1/us")
    p.add_argument("--delta", type=float, help="detuning of both drives, rad/us")
    p.add_argument("--loss-level", choices=LOSS_LEVELS, help="level carrying the -i gamma/2 term")
    p.add_argument("--initial", help=f"initial basis state, one of {', '.join(BASIS_LABELS)}")
    p.add_argument("--tmax", type=float, help="final time, us")
    p.add_argument("--samples", type=int, help="number of time samples")
    p.add_argument("--method", choices=METHODS)
    p.add_argument("--epsilon", type=float, help="PT phase threshold on Im spread")
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--format", choices=FORMATS)
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nhqubits",
        description="Entanglement dynamics of two coupled non-Hermitian qubits.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = _common_parser()
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("evolve", parents=[common], help="pure-state evolution")
    sub.add_parser("master", parents=[common], help="density-matrix evolution with relaxation")
    sp = sub.add_parser("spectrum", parents=[common], help="eigenvalues versus gamma")
    sp.add_argument("--gamma-range", type=float, nargs=2, metavar=("LO", "HI"))
    sp.add_argument("--points", type=int, dest="n_points")
    pd = sub.add_parser("phase-diagram", parents=[common], help="PT phase over (omega, gamma)")
    pd.add_argument("--omega-range", type=float, nargs=2, metavar=("LO", "HI"))
    pd.add_argument("--gamma-range", type=float, nargs=2, metavar=("LO", "HI"))
    pd.add_argument("--resolution", type=int, nargs=2, metavar=("N_OMEGA", "N_GAMMA"))
    pd.add_argument("--workers", type=int)
    ep = sub.add_parser("ep", parents=[common], help="locate the exceptional point")
    ep.add_argument("--bracket", type=float, nargs=2, metavar=("LO", "HI"))
    ep.add_argument("--json", action="store_true", help="machine-readable output")
    return parser


def config_from_args(args: argparse.Namespace) -> ScenarioConfig:
    cfg = load_config(args.config) if args.config else ScenarioConfig()
    params = {k: getattr(args, k) for k in ("gamma", "omega", "J", "alpha", "delta")
              if getattr(args, k) is not None}
    if args.loss_level is not None:
        params["loss_level"] = args.loss_level
    data = {}
    if params:
        data["params"] = params
    mapping = {"initial": "initial_state", "tmax": "t_max", "samples": "n_samples",
               "method": "method", "out": "output", "format": "format", "epsilon": "epsilon",
               "gamma_range": "gamma_range", "n_points": "n_points",
               "omega_range": "omega_range", "resolution": "resolution",
               "workers": "workers", "bracket": "bracket"}
    for attr, key in mapping.items():
        value = getattr(args, attr, None)
        if value is not None:
            data[key] = list(value) if isinstance(value, tuple) else value
    return config_from_dict(data, cfg).validate()


def _emit(text: str, cfg: ScenarioConfig, tables=None):
    if cfg.output:
        if tables is not None:
            for path in write(tables, cfg.output, cfg.format):
                log.info("wrote %s", path)
        else:
            Path(cfg.output).write_text(text)
    else:
        sys.stdout.write(text)


def run(args: argparse.Namespace) -> int:
    cfg = config_from_args(args)
    if args.command in ("evolve", "master"):
        table = (cmd_evolve if args.command == "evolve" else cmd_master)(cfg)
        _emit(render([table], cfg.format), cfg, [table])
        t_end = table.metadata.get("terminated_at")
        if t_end is not None:
            print(f"error: state fully decayed at t = {t_end:g} us before t_max", file=sys.stderr)
            return EXIT_NUMERIC
        return EXIT_OK
    if args.command == "spectrum":
        table = cmd_spectrum(cfg)
        _emit(render([table], cfg.format), cfg, [table])
        return EXIT_OK
    if args.command == "phase-diagram":
        tables = cmd_phase_diagram(cfg)
        _emit(render(tables, cfg.format), cfg, tables)
        return EXIT_OK
    if args.command == "ep":
        report = cmd_ep(cfg)
        if args.json or cfg.format == "json":
            text = json.dumps(report, sort_keys=True) + "\n"
        else:
            text = (
                f"gamma_EP   = {report['gamma_ep']:.11e}\n"
                f"min_gap    = {report['min_gap']:.11e}\n"
                f"iterations = {report['iterations']}\n"
                f"bracket    = [{report['bracket'][0]:g}, {report['bracket'][1]:g}]\n"
            )
        _emit(text, cfg)
        return EXIT_OK
    raise AssertionError(args.command)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return run(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (EigenConvergenceError, StepSizeUnderflowError, NearExceptionalPointError,
            NumericalFailure) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
