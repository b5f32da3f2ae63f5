"""Frozen coefficients of the linearized dynamic boundary condition.

Linearizing the kinematic law about a background ``(sigma, U-, U+)`` gives

    phi_t - a_m phi-_z - a_p phi+_z + zeta . grad' phi - at_m u-_z - at_p u+_z = g0

on the interface.  The map used here is only continuous across the front, so
each coefficient takes the one-sided ``sigma_z`` of its own slab.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fields import FieldState, Params
from .geometry import DiffeoMap, ddz_bottom, ddz_top


@dataclass
class BoundaryCoeffs:
    alpha_minus: np.ndarray
    alpha_plus: np.ndarray
    alpha_tilde_minus: np.ndarray
    alpha_tilde_plus: np.ndarray
    zeta: np.ndarray
    g0: np.ndarray
    omega1: float

    def frozen(self, how: str = "mean") -> "BoundaryCoeffs":
        """Collapse the interface fields to constants (transverse mean)."""
        if how == "pointwise":
            return self
        if how != "mean":
            raise ValueError(f"unknown freezing {how!r}")
        m = lambda a: np.asarray(np.mean(a))
        zeta = np.asarray(self.zeta)
        return BoundaryCoeffs(m(self.alpha_minus), m(self.alpha_plus), m(self.alpha_tilde_minus),
                              m(self.alpha_tilde_plus),
                              zeta.reshape(zeta.shape[0], -1).mean(axis=1), m(self.g0),
                              float(np.mean(self.alpha_plus) - np.mean(self.alpha_minus)))

    def to_symbol_params(self):
        """Mean-frozen symbol parameters.

        The lower phase is reflected onto the upper half space, which flips the
        sign of its coefficient, and the symbol's transport vector is minus
        ``zeta`` (roots are rates of ``exp(i k x)``).  So
        ``alpha_s + beta_s`` equals the mean of ``alpha+ - alpha-``.
        """
        from .symbol import SymbolParams

        f = self.frozen("mean")
        return SymbolParams(-float(f.alpha_minus), float(f.alpha_plus),
                            tuple(-np.atleast_1d(f.zeta)))


def frozen_coefficients(background: FieldState, diffeo: DiffeoMap, params: Params,
                        sigma_t: np.ndarray | float = 0.0) -> BoundaryCoeffs:
    """Coefficients on the interface grid in the divided-by-mu convention.

    ``sigma_t`` is the background interface velocity entering ``g0``.
    """
    g = diffeo.grid
    a, b = params.alpha_scaled, params.beta_scaled
    um = ddz_top(background.pressure, g.dz_lower)
    up = ddz_bottom(background.humidity, g.dz_upper)
    jm = 1.0 + diffeo.d_sigma_dz_minus
    jp = 1.0 + diffeo.d_sigma_dz_plus
    grad = diffeo.grad_eta
    w = 1.0 + np.sum(grad**2, axis=0)

    alpha_minus = a * um * w / jm**2
    alpha_plus = -b * up * w / jp**2
    zeta = 2.0 * (a * um / jm - b * up / jp) * grad
    g0 = 1.0 / params.mu_eff - sigma_t + w * (-a * um / jm + b * up / jp)
    return BoundaryCoeffs(
        alpha_minus=alpha_minus,
        alpha_plus=alpha_plus,
        alpha_tilde_minus=-a * w / jm,
        alpha_tilde_plus=b * w / jp,
        zeta=zeta,
        g0=g0,
        omega1=float(np.min(alpha_plus - alpha_minus)),
    )
