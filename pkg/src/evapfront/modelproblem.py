"""Reference solutions for single Fourier modes.

``solve_halfspace_mode`` integrates the boundary equation of the half-space
model in time, with the parabolic Dirichlet-to-Neumann value supplied by a
co-evolved 1-d heat profile.  ``flat_front_growth_rate`` is the growth rate
of a mode on the flat layer, from shooting in both slabs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.linalg
from scipy.integrate import solve_ivp

from .errors import ConvergenceError, ValidationError
from .fields import Params, flat_state
from .geometry import build_diffeomorphism, build_grid
from .linearize import frozen_coefficients
from .symbol import DispersionRoot, SymbolParams, dispersion_root

DEPTH_FACTOR = 8.0
DEPTH_CAP = 64.0
DX_FACTOR = 0.02

_GL_X, _GL_W = np.polynomial.legendre.leggauss(4)


@dataclass
class ModeSolution:
    k: np.ndarray
    t: np.ndarray
    phi_hat: np.ndarray
    x: np.ndarray
    phi_minus_profile: np.ndarray
    phi_plus_profile: np.ndarray
    depth: float
    depth_sensitivity: float | None = None

    def log_slope(self, t_from: float) -> float:
        m = self.t >= t_from
        return float(np.polyfit(self.t[m], np.log(np.abs(self.phi_hat[m])), 1)[0])


def _mode_system(alpha_s, beta_s, c_dot_k, kn, depth, dx):
    n = max(8, int(math.ceil(depth / dx)))
    h = depth / n
    x = np.linspace(0.0, depth, n + 1)
    # unknowns: phi at nodes 0..n; node 0 is the boundary amplitude
    A = np.zeros((n + 1, n + 1), dtype=complex)
    # heat rows, (d_t + k^2 - d_xx) phi = 0
    for i in range(1, n):
        A[i, i - 1] = A[i, i + 1] = 1.0 / h**2
        A[i, i] = -2.0 / h**2 - kn**2
    # far end: Robin phi_x + |k| phi = 0 through a ghost node
    A[n, n - 1] = 2.0 / h**2
    A[n, n] = -2.0 / h**2 - 2.0 * kn / h - kn**2
    # boundary equation; Lambda = -phi_x(0), one-sided second order
    A[0, 0] = -alpha_s * kn + 1j * c_dot_k - beta_s * 3.0 / (2.0 * h)
    A[0, 1] = beta_s * 4.0 / (2.0 * h)
    A[0, 2] = -beta_s * 1.0 / (2.0 * h)
    return A, x


def _integrate(A, x, g_of_t, n_steps, dt):
    E = scipy.linalg.expm(A * dt)
    # forcing enters the boundary row only
    taus = 0.5 * dt * (_GL_X + 1.0)
    kernels = [scipy.linalg.expm(A * (dt - tau))[:, 0] * (0.5 * dt * w) for tau, w in zip(taus, _GL_W)]
    y = np.zeros(len(x), dtype=complex)
    hist = np.empty(n_steps + 1, dtype=complex)
    hist[0] = 0.0
    for j in range(n_steps):
        t0 = j * dt
        y = E @ y
        for kern, tau in zip(kernels, taus):
            y = y + kern * g_of_t(t0 + tau)
        hist[j + 1] = y[0]
    return y, hist


def solve_halfspace_mode(alpha_s: float, beta_s: float, c, k, g_of_t: Callable[[float], complex],
                         T: float, dt: float, *, depth: float | None = None, dx: float | None = None,
                         check_depth: bool = False) -> ModeSolution:
    """Single mode of the half-space model with zero initial data.

    Boundary amplitude::

        phi' = -alpha |k| phi - beta Lambda phi + i (c . k) phi + g(t)

    where ``Lambda phi = -d_x phi+(0)`` comes from the heat profile
    ``(d_t + k^2 - d_xx) phi+ = 0`` on ``(0, depth)`` with ``phi+(0) = phi``
    and an absorbing Robin end.  The sign of the transport term follows the
    symbol, so the long-time rate is the root of ``P(., ik)``.
    """
    kv = np.atleast_1d(np.asarray(k, dtype=float))
    kn = float(np.linalg.norm(kv))
    cv = np.atleast_1d(np.asarray(c, dtype=float))
    if kn == 0:
        raise ValidationError("wavenumber must be nonzero")
    if cv.shape != kv.shape:
        raise ValidationError("c and k must have the same length")
    if not (T > 0 and dt > 0):
        raise ValidationError("T and dt must be positive")
    if abs(g_of_t(0.0)) > 1e-12:
        raise ValidationError("forcing must vanish at t = 0")
    n_steps = int(round(T / dt))
    if n_steps < 1 or abs(n_steps * dt - T) > 1e-9 * T:
        raise ValidationError("T must be an integer multiple of dt")
    depth = depth or min(DEPTH_FACTOR / kn, DEPTH_CAP)
    dx = dx or DX_FACTOR / max(1.0, kn)

    A, x = _mode_system(alpha_s, beta_s, float(cv @ kv), kn, depth, dx)
    y, hist = _integrate(A, x, g_of_t, n_steps, dt)

    sens = None
    if check_depth:
        A2, x2 = _mode_system(alpha_s, beta_s, float(cv @ kv), kn, 2 * depth, dx)
        _, hist2 = _integrate(A2, x2, g_of_t, n_steps, dt)
        scale = max(float(np.abs(hist2).max()), 1e-300)
        sens = float(np.abs(hist - hist2).max() / scale)
        if sens > 0.01:
            raise ConvergenceError(f"truncation depth {depth:g} too small: boundary values move "
                                   f"by {100 * sens:.2f}% when the depth is doubled",
                                   last_iterate=complex(hist[-1]))

    return ModeSolution(k=kv, t=np.arange(n_steps + 1) * dt, phi_hat=hist, x=x,
                        phi_minus_profile=y[0] * np.exp(-kn * x), phi_plus_profile=y,
                        depth=depth, depth_sensitivity=sens)


# --- flat layer eigenproblem --------------------------------------------------

_ODE_OPTS = dict(method="DOP853", rtol=1e-12, atol=1e-14)


def _lower_dtn(kn: float, H: float) -> float:
    """psi'(H)/psi(H) for psi'' = k^2 psi, psi(0) = 0."""
    sol = solve_ivp(lambda z, y: [y[1], kn * kn * y[0]], (0.0, H), [0.0, 1.0], **_ODE_OPTS)
    return float(sol.y[1, -1] / sol.y[0, -1])


def _upper_dtn(lam: complex, kn: float, H: float) -> complex:
    """psi'(H)/psi(H) for psi'' = (lam + k^2) psi, psi(1) = 0."""
    q = lam + kn * kn
    sol = solve_ivp(lambda z, y: [y[1], q * y[0]], (1.0, H), np.array([0.0, -1.0], dtype=complex),
                    **_ODE_OPTS)
    return complex(sol.y[1, -1] / sol.y[0, -1])


def flat_front_growth_rate(params: Params, k, lambda0: complex | None = None, *,
                           tol: float = 1e-10, max_iter: int = 50) -> DispersionRoot:
    """Growth rate of ``exp(i k x)`` on the flat layer at level ``params.H``.

    Closing condition, from the linearized interface law with coefficients
    frozen on a flat background::

        lam - a_m D_m - a_p D_p(lam) + i zeta.k = 0

    ``D_m``, ``D_p`` are the interface log-derivatives of the slab solutions,
    both obtained by shooting.  ``tol`` is relative to ``1 + |lam|``.
    """
    kv = np.atleast_1d(np.asarray(k, dtype=float))
    kn = float(np.linalg.norm(kv))
    if kn == 0:
        raise ValidationError("wavenumber must be nonzero")
    H = params.H
    grid = build_grid(8, 8, 8, H, dim=kv.size)
    d = build_diffeomorphism(np.zeros(grid.transverse_shape), grid)
    bc = frozen_coefficients(flat_state(grid), d, params).frozen("mean")
    a_m, a_p = float(bc.alpha_minus), float(bc.alpha_plus)
    izk = 1j * float(np.dot(np.atleast_1d(bc.zeta), kv))
    d_m = _lower_dtn(kn, H)

    def F(lam):
        out = lam - a_m * d_m + izk
        if a_p != 0.0:
            out -= a_p * _upper_dtn(lam, kn, H)
        return out

    if a_p == 0.0:
        lam = a_m * d_m - izk
        return DispersionRoot(kv, complex(lam), abs(F(lam)), "shooting, elliptic slab only", 0)

    if lambda0 is None:
        try:
            lambda0 = dispersion_root(SymbolParams(-a_m, a_p, tuple(-np.atleast_1d(bc.zeta))), kv).lam
        except Exception:  # the half-space guess is only a convenience
            lambda0 = a_m * kn - a_p * math.hypot(kn, math.pi / (1 - H))
    lam = complex(lambda0)
    f = F(lam)
    for it in range(1, max_iter + 1):
        h = 1e-6 * max(1.0, abs(lam))
        df = (F(lam + h) - F(lam - h)) / (2 * h)
        step = f / df
        t = 1.0
        while True:
            cand = lam - t * step
            fc = F(cand)
            if abs(fc) < abs(f) or t < 1e-4:
                break
            t *= 0.5
        lam, f = cand, fc
        if abs(f) < tol * (1.0 + abs(lam)):
            return DispersionRoot(kv, lam, abs(f), "shooting, DOP853", it)
    raise ConvergenceError("shooting did not converge", last_iterate=lam)
