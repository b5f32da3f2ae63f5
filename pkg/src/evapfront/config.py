"""Run configuration: INI file <-> dataclass, plus initial data."""

from __future__ import annotations

import configparser
import hashlib
import io
import json
from dataclasses import MISSING, asdict, dataclass, field, fields

import numpy as np
import sympy

from .errors import ValidationError
from .fields import TOL_ELL, TOL_MP, Params
from .geometry import DEFAULT_DELTA_J, DEFAULT_GAMMA_MARGIN, Grid, build_grid


@dataclass(frozen=True)
class GridSpec:
    n_transverse: int = 32
    n_lower: int = 32
    n_upper: int = 32
    dim: int = 1
    transverse_method: str = "spectral"

    def build(self, H: float) -> Grid:
        return build_grid(self.n_transverse, self.n_lower, self.n_upper, H, dim=self.dim,
                          transverse_method=self.transverse_method)


@dataclass(frozen=True)
class InitialSpec:
    eta: str = "0"          # sympy expression in x (and y), or "0"
    nu: str = "linear"      # "linear" or a sympy expression in x, (y,) z
    noise: float = 0.0      # amplitude of seeded random perturbation of eta
    seed: int = 0


@dataclass(frozen=True)
class OutputSpec:
    cadence: int = 1         # time-series row every `cadence` steps
    snapshot_every: int = 0  # 0 disables periodic snapshots


@dataclass(frozen=True)
class MonitorSpec:
    delta_j: float = DEFAULT_DELTA_J
    gamma_margin: float = DEFAULT_GAMMA_MARGIN
    halt_on_illposed: bool = False


@dataclass(frozen=True)
class SolverSpec:
    tol_ell: float = TOL_ELL
    tol_mp: float = TOL_MP


@dataclass(frozen=True)
class RunConfig:
    params: Params
    grid: GridSpec = field(default_factory=GridSpec)
    dt: float = 1e-3
    t_end: float = 0.1
    initial: InitialSpec = field(default_factory=InitialSpec)
    output: OutputSpec = field(default_factory=OutputSpec)
    monitor: MonitorSpec = field(default_factory=MonitorSpec)
    solver: SolverSpec = field(default_factory=SolverSpec)

    def __post_init__(self):
        if not self.dt > 0:
            raise ValidationError("dt must be positive")
        if not self.t_end > 0:
            raise ValidationError("t_end must be positive")
        if self.solver.tol_ell <= 0 or self.solver.tol_mp <= 0:
            raise ValidationError("solver tolerances must be positive")
        if self.monitor.delta_j <= 0 or self.monitor.gamma_margin <= 0:
            raise ValidationError("monitor thresholds must be positive")
        if self.output.cadence < 1 or self.output.snapshot_every < 0:
            raise ValidationError("bad output cadence")

    @property
    def n_steps(self) -> int:
        return max(1, int(round(self.t_end / self.dt)))

    def physics_hash(self) -> str:
        """Hash of everything that changes the discrete trajectory.

        Initial data and output settings are left out: a snapshot carries its
        own state, and restarting with a different cadence is harmless.
        """
        key = {"params": asdict(self.params), "grid": asdict(self.grid), "dt": self.dt.hex(),
               "delta_j": self.monitor.delta_j, "gamma_margin": self.monitor.gamma_margin,
               "tol_ell": self.solver.tol_ell}
        return hashlib.sha256(json.dumps(key, sort_keys=True).encode()).hexdigest()


_SECTIONS = {"grid": GridSpec, "initial": InitialSpec, "output": OutputSpec,
             "monitor": MonitorSpec, "solver": SolverSpec}


def _coerce(typ, raw: str):
    if typ in ("bool", bool):
        return raw.strip().lower() in ("1", "true", "yes", "on")
    if typ in ("int", int):
        return int(raw)
    if typ in ("float", float):
        return float(raw)
    return raw


def _section(cls, sec) -> object:
    kwargs = {}
    known = {f.name: f.type for f in fields(cls)}
    for key, raw in sec.items():
        if key not in known:
            raise ValidationError(f"unknown key {key!r} in [{sec.name}]")
        try:
            kwargs[key] = _coerce(known[key], raw)
        except ValueError as exc:
            raise ValidationError(f"bad value for {key}: {raw!r}") from exc
    missing = [f.name for f in fields(cls) if f.init and f.name not in kwargs
               and f.default is MISSING and f.default_factory is MISSING]
    if missing:
        raise ValidationError(f"[{sec.name}] is missing {missing}")
    return cls(**kwargs)


def _parser() -> configparser.ConfigParser:
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str  # H is case sensitive
    return cp


def parse_config(text: str) -> RunConfig:
    cp = _parser()
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ValidationError(f"malformed config: {exc}") from exc
    if "params" not in cp:
        raise ValidationError("config needs a [params] section")
    unknown = set(cp.sections()) - set(_SECTIONS) - {"params", "time"}
    if unknown:
        raise ValidationError(f"unknown sections: {sorted(unknown)}")
    params = _section(Params, cp["params"])
    parts = {name: _section(cls, cp[name]) for name, cls in _SECTIONS.items() if name in cp}
    t = cp["time"] if "time" in cp else {}
    try:
        dt = float(t.get("dt", 1e-3))
        t_end = float(t.get("t_end", 0.1))
    except ValueError as exc:
        raise ValidationError(f"bad [time] entry: {exc}") from exc
    return RunConfig(params=params, dt=dt, t_end=t_end, **parts)


def load_config(path) -> RunConfig:
    with open(path) as fh:
        return parse_config(fh.read())


def serialize_config(cfg: RunConfig) -> str:
    cp = _parser()
    cp["params"] = {k: repr(v) for k, v in asdict(cfg.params).items()}
    cp["time"] = {"dt": repr(cfg.dt), "t_end": repr(cfg.t_end)}
    for name in _SECTIONS:
        cp[name] = {k: str(v) for k, v in asdict(getattr(cfg, name)).items()}
    buf = io.StringIO()
    cp.write(buf)
    return buf.getvalue()


# --- initial data -------------------------------------------------------------

_X, _Y, _Z = sympy.symbols("x y z", real=True)


def _lambdify(expr: str, args):
    try:
        e = sympy.sympify(expr, locals={"pi": sympy.pi, "x": _X, "y": _Y, "z": _Z})
    except (sympy.SympifyError, TypeError) as exc:
        raise ValidationError(f"cannot parse expression {expr!r}") from exc
    extra = e.free_symbols - set(args)
    if extra:
        raise ValidationError(f"expression {expr!r} uses unknown symbols {sorted(map(str, extra))}")
    return sympy.lambdify(args, e, "numpy")


def initial_eta(cfg: RunConfig, grid: Grid) -> np.ndarray:
    args = (_X,) if grid.dim == 1 else (_X, _Y)
    f = _lambdify(cfg.initial.eta, args)
    coords = grid.mesh()
    eta = np.broadcast_to(np.asarray(f(*coords), dtype=float), grid.transverse_shape).copy()
    if cfg.initial.noise:
        rng = np.random.default_rng(cfg.initial.seed)
        eta += cfg.initial.noise * rng.standard_normal(grid.transverse_shape)
    return eta


def initial_nu(cfg: RunConfig, grid: Grid) -> np.ndarray | None:
    if cfg.initial.nu.strip().lower() == "linear":
        return None
    args = (_X, _Z) if grid.dim == 1 else (_X, _Y, _Z)
    f = _lambdify(cfg.initial.nu, args)
    tshape = grid.transverse_shape
    if grid.dim == 1:
        X, Z = np.meshgrid(grid.x, grid.z_upper, indexing="ij")
        vals = f(X, Z)
    else:
        X, Y, Z = np.meshgrid(grid.x, grid.x, grid.z_upper, indexing="ij")
        vals = f(X, Y, Z)
    return np.broadcast_to(np.asarray(vals, dtype=float), tshape + grid.z_upper.shape).copy()
