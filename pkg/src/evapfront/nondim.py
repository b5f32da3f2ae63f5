"""Physical constants to dimensionless numbers, and flat equilibria."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from .errors import ValidationError
from .fields import Params

BALANCE_TOL = 1e-6


@dataclass(frozen=True)
class PhysicalParams:
    porosity_m: float
    permeability_k: float   # m^2
    viscosity_w: float      # Pa s
    diffusivity_D: float    # m^2/s
    density_w: float        # kg/m^3
    density_a: float        # kg/m^3
    gravity_g: float        # m/s^2
    P_a: float              # Pa
    P_c: float              # Pa
    P_0: float              # Pa
    nu_star: float
    nu_a: float
    layer_L: float          # m
    level_h: float          # m

    def __post_init__(self):
        for name, val in asdict(self).items():
            if not math.isfinite(val):
                raise ValidationError(f"{name} is not finite")
        if not 0 < self.porosity_m < 1:
            raise ValidationError("porosity must lie in (0, 1)")
        for name in ("permeability_k", "viscosity_w", "diffusivity_D", "density_w", "density_a",
                     "gravity_g", "layer_L"):
            if getattr(self, name) <= 0:
                raise ValidationError(f"{name} must be positive")
        if not (0 < self.nu_a < 1 and 0 < self.nu_star < 1):
            raise ValidationError("humidities must lie in (0, 1)")
        if not self.nu_star > self.nu_a:
            raise ValidationError("nu_star must exceed nu_a")
        if not 0 < self.level_h < self.layer_L:
            raise ValidationError("level_h must lie in (0, layer_L)")


def nondimensionalize(phys: PhysicalParams, omega0: float = 1e-3) -> Params:
    """Dimensionless numbers with length scale ``L`` and pressure scale ``rho_w g L``.

    ``mu = 1 - rho_a nu_star / rho_w`` is the density jump across the front.
    """
    f = phys
    w = f.density_w * f.gravity_g * f.layer_L
    alpha = (f.P_a + f.P_c - f.P_0) / w
    gamma = f.diffusivity_D * f.porosity_m * f.viscosity_w / (f.permeability_k * w)
    beta = gamma * f.density_a * (f.nu_star - f.nu_a) / f.density_w
    mu = 1.0 - f.density_a * f.nu_star / f.density_w
    if mu == 0:
        raise ValidationError("density jump across the front vanishes (mu = 0)")
    return Params(alpha=alpha, beta=beta, gamma_diff=gamma, mu=mu, H=f.level_h / f.layer_L,
                  omega0=omega0)


def solve_equilibrium(*, H: float | None = None, alpha: float | None = None,
                      beta: float | None = None) -> list[dict]:
    """Complete ``alpha/H + beta/(1-H) = 1`` given two of the three numbers.

    Returns every admissible solution; solving for ``H`` can give zero, one
    or two levels in ``(0, 1)``.  A level is kept when it satisfies the
    balance to ``BALANCE_TOL`` (relative to the size of the two terms).
    """
    given = [v is not None for v in (H, alpha, beta)]
    if sum(given) != 2:
        raise ValidationError("give exactly two of H, alpha, beta")
    if H is not None and not 0 < H < 1:
        raise ValidationError("H must lie in (0, 1)")
    if alpha is None:
        return [{"H": H, "alpha": H * (1.0 - beta / (1.0 - H)), "beta": beta}]
    if beta is None:
        return [{"H": H, "alpha": alpha, "beta": (1.0 - H) * (1.0 - alpha / H)}]
    # H^2 + (beta - alpha - 1) H + alpha = 0
    b = beta - alpha - 1.0
    disc = b * b - 4.0 * alpha
    if disc < 0:
        return []
    r = math.sqrt(disc)
    # stable pair of roots
    q = -0.5 * (b + math.copysign(r, b)) if b != 0 else 0.5 * r
    roots = {q} | ({alpha / q} if q != 0 else {-q})
    out = []
    for h in sorted(roots):
        if not 0 < h < 1:
            continue
        # drops the spurious H = 1 that clearing denominators adds when beta = 0,
        # and levels too close to a wall for 1 - H to be resolved in floating point
        terms = abs(alpha / h) + abs(beta / (1.0 - h))
        if abs(alpha / h + beta / (1.0 - h) - 1.0) <= BALANCE_TOL * (1.0 + terms):
            out.append({"H": h, "alpha": alpha, "beta": beta})
    return out
