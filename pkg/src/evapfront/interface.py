"""Kinematic interface law and the well-posedness monitor."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DegenerateMapError, ValidationError
from .fields import FieldState, Params
from .geometry import (DEFAULT_GAMMA_MARGIN, DiffeoMap, InterfaceState, check_margin, ddz_bottom,
                       ddz_top)

C_DT = 0.25


def _one_sided(fields: FieldState, diffeo: DiffeoMap):
    g = diffeo.grid
    jm = 1.0 + diffeo.d_sigma_dz_minus
    jp = 1.0 + diffeo.d_sigma_dz_plus
    if np.any(jm == 0.0) or np.any(jp == 0.0):
        raise DegenerateMapError("1 + one-sided d(sigma)/dz vanishes on the interface")
    p_z = ddz_top(fields.pressure, g.dz_lower)
    nu_z = ddz_bottom(fields.humidity, g.dz_upper)
    grad2 = np.sum(diffeo.grad_eta**2, axis=0)
    return p_z, nu_z, jm, jp, grad2


def interface_normal_flux(fields: FieldState, diffeo: DiffeoMap, params: Params) -> np.ndarray:
    """Right side of the transformed kinematic law, divided by the mobility.

    ``[(1 + |grad' eta|^2) (-alpha P_z/(1 + sigma_z^-) + beta nu_z/(1 + sigma_z^+)) + 1] / mu``
    """
    p_z, nu_z, jm, jp, grad2 = _one_sided(fields, diffeo)
    rhs = (1.0 + grad2) * (-params.alpha * p_z / jm + params.beta * nu_z / jp) + 1.0
    return rhs / params.mu_eff


def step_interface(state: InterfaceState, flux: np.ndarray, dt: float, *,
                   flux_at: Callable[[np.ndarray], np.ndarray] | None = None,
                   H: float | None = None,
                   gamma_margin: float = DEFAULT_GAMMA_MARGIN) -> InterfaceState:
    """Advance the interface height with Heun's method.

    ``flux`` is the rate at the current state.  ``flux_at(eta_pred)`` returns
    the rate at the Euler predictor; without it the rate is taken as frozen
    over the step (Heun then coincides with Euler).  With ``H`` given, the new
    height is checked against the admissible band.
    """
    if not dt > 0:
        raise ValidationError(f"time step must be positive, got {dt}")
    eta = state.eta
    flux = np.asarray(flux, dtype=float)
    pred = eta + dt * flux
    if flux_at is None:
        new = pred
    else:
        new = eta + 0.5 * dt * (flux + np.asarray(flux_at(pred)))
    if H is not None:
        check_margin(new, H, gamma_margin)
    return InterfaceState(new, state.time + dt)


def max_stable_dt(grid_dx: float, c_dt: float = C_DT) -> float:
    return c_dt * grid_dx


@dataclass
class WellposednessReport:
    margin: np.ndarray
    worst: float
    satisfied: bool
    omega0: float
    omega1: np.ndarray
    omega1_min: float
    # margin: sign(mu) * d_n[beta nu + alpha P] with physical alpha, beta
    # omega1: (alpha+ - alpha-) with alpha, beta divided by mu * gamma_diff
    convention: str = "margin: physical alpha,beta times sign(mu); omega1: alpha/mu, beta/mu"

    def summary(self) -> dict:
        return {"worst": self.worst, "satisfied": self.satisfied, "omega0": self.omega0,
                "omega1_min": self.omega1_min, "convention": self.convention}


def check_wellposedness(fields: FieldState, diffeo: DiffeoMap, params: Params) -> WellposednessReport:
    p_z, nu_z, jm, jp, grad2 = _one_sided(fields, diffeo)
    root = np.sqrt(1.0 + grad2)
    # d_n on the front in transformed variables, using the constant traces P = nu = 1
    dn_p = root * p_z / jm
    dn_nu = root * nu_z / jp
    margin = np.sign(params.mu) * (params.beta * dn_nu + params.alpha * dn_p)
    worst = float(np.max(margin))
    a, b = params.alpha_scaled, params.beta_scaled
    omega1 = (-b * nu_z / jp**2 - a * p_z / jm**2) * (1.0 + grad2)
    return WellposednessReport(
        margin=margin, worst=worst, satisfied=bool(worst <= -params.omega0),
        omega0=params.omega0, omega1=omega1, omega1_min=float(np.min(omega1)))
