"""Coupled time stepping: the front moves with pressure and humidity.

One step (Heun on the front, IMEX on humidity)::

    d_n, P_n           map and pressure at the current front
    F1 = flux(P_n, nu_n, d_n)
    eta*  = eta_n + dt F1,   nu* = humidity step d_n -> d*,   F2 = flux(P*, nu*, d*)
    eta_{n+1} = eta_n + dt (F1 + F2)/2
    nu_{n+1}  = humidity step d_n -> d_{n+1}

The state ``(eta, nu, t, step)`` is everything needed to continue a run, so
restarting from a snapshot reproduces the uninterrupted run exactly.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import WellposednessHalt
from .fields import TOL_ELL, FieldState, Params, humidity_lift, solve_pressure, step_humidity
from .geometry import (DEFAULT_DELTA_J, DEFAULT_GAMMA_MARGIN, Grid, InterfaceState,
                       build_diffeomorphism, check_margin)
from .interface import (WellposednessReport, check_wellposedness, interface_normal_flux,
                        step_interface)

logger = logging.getLogger(__name__)


@dataclass
class SimState:
    eta: np.ndarray
    humidity: np.ndarray
    time: float = 0.0
    step: int = 0

    def copy(self) -> "SimState":
        return SimState(self.eta.copy(), self.humidity.copy(), self.time, self.step)


@dataclass
class StepControls:
    delta_j: float = DEFAULT_DELTA_J
    gamma_margin: float = DEFAULT_GAMMA_MARGIN
    tol_ell: float = TOL_ELL
    halt_on_illposed: bool = False


@dataclass
class StepInfo:
    fields: FieldState  # pressure and humidity at the start of the step
    report: WellposednessReport
    flux: np.ndarray


@dataclass
class Simulator:
    grid: Grid
    params: Params
    dt: float
    controls: StepControls = field(default_factory=StepControls)

    def initial_state(self, eta0: np.ndarray, nu0: np.ndarray | None = None) -> SimState:
        eta0 = np.asarray(eta0, dtype=float)
        check_margin(eta0, self.grid.H, self.controls.gamma_margin)
        build_diffeomorphism(eta0, self.grid, self.controls.delta_j)  # fail early on bad maps
        nu = humidity_lift(self.grid) if nu0 is None else np.array(nu0, dtype=float)
        nu[..., 0], nu[..., -1] = 1.0, 0.0
        return SimState(eta0.copy(), nu)

    def _diffeo(self, eta):
        return build_diffeomorphism(eta, self.grid, self.controls.delta_j)

    def _flux(self, nu, d, t):
        p = solve_pressure(d, tol=self.controls.tol_ell)
        fs = FieldState(p, nu, t)
        return fs, interface_normal_flux(fs, d, self.params)

    def diagnose(self, state: SimState) -> StepInfo:
        d = self._diffeo(state.eta)
        fs, flux = self._flux(state.humidity, d, state.time)
        return StepInfo(fs, check_wellposedness(fs, d, self.params), flux)

    def step(self, state: SimState) -> tuple[SimState, StepInfo]:
        dt = self.dt
        c = self.controls
        d_n = self._diffeo(state.eta)
        fs, f1 = self._flux(state.humidity, d_n, state.time)
        report = check_wellposedness(fs, d_n, self.params)
        if c.halt_on_illposed and not report.satisfied:
            raise WellposednessHalt(
                f"well-posedness margin {report.worst:.4g} > -omega0 at step {state.step}")

        t1 = state.time + dt

        def flux_at(eta_pred):
            d_pred = self._diffeo(eta_pred)
            nu_pred = step_humidity(state.humidity, d_n, d_pred, dt)
            return self._flux(nu_pred, d_pred, t1)[1]

        new_if = step_interface(InterfaceState(state.eta, state.time), f1, dt, flux_at=flux_at,
                                H=self.grid.H, gamma_margin=c.gamma_margin)
        d_next = self._diffeo(new_if.eta)
        nu_next = step_humidity(state.humidity, d_n, d_next, dt)
        return SimState(new_if.eta, nu_next, t1, state.step + 1), StepInfo(fs, report, f1)

    def run(self, state: SimState, n_steps: int, callback=None) -> SimState:
        for _ in range(n_steps):
            state, info = self.step(state)
            if callback is not None:
                callback(state, info)
        return state


def mode_amplitude(eta: np.ndarray, grid: Grid, mode: int = 1) -> complex:
    """Complex amplitude of ``exp(2 pi i mode x)`` in a 1-d interface."""
    return complex(np.fft.rfft(eta)[mode] * 2.0 / grid.n_transverse)


def fit_rate(times: np.ndarray, amps: np.ndarray) -> float:
    """Least-squares slope of ``log|amp|`` against time."""
    return float(np.polyfit(np.asarray(times), np.log(np.abs(amps)), 1)[0])
