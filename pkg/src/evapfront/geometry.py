"""Grids for the layer and the map that pins the interface to a fixed level.

The layer ``T^{n-1} x (0, 1)`` is split at the reference level ``H`` into a
lower (liquid) slab ``(0, H)`` and an upper (vapor) slab ``(H, 1)``.  Each slab
carries its own uniform z-grid; the node ``z = H`` is stored in both.  Arrays
on a slab have shape ``(*transverse_shape, nz + 1)`` with z as the last axis.

The moving interface ``z = H + eta(x')`` is pulled back to ``z = H`` by the
vertical map ``(z', z_n) -> (z', z_n + sigma(z', z_n))`` with
``sigma = eta(z') * s(z_n)`` and ``s`` the tent profile (0 at the walls, 1 at
``H``).  The analytic construction this replaces builds ``sigma`` from a
biharmonic extension of the interface data blended by a cutoff into
compressed outer slabs of slope ``gamma/4``; that machinery only matters for
rough Sobolev data.  For grid functions the tent map keeps the trace, the
wall conditions and a positive Jacobian, and it is trivially invertible.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateMapError, MarginViolation, ValidationError

MIN_POINTS = 4
DEFAULT_DELTA_J = 0.1
DEFAULT_GAMMA_MARGIN = 0.05


@dataclass(frozen=True)
class Grid:
    n_transverse: int
    n_lower: int
    n_upper: int
    H: float
    dim: int = 1
    transverse_method: str = "spectral"

    @property
    def transverse_shape(self) -> tuple[int, ...]:
        return (self.n_transverse,) * self.dim

    @property
    def dx(self) -> float:
        return 1.0 / self.n_transverse

    @property
    def dz_lower(self) -> float:
        return self.H / self.n_lower

    @property
    def dz_upper(self) -> float:
        return (1.0 - self.H) / self.n_upper

    @property
    def x(self) -> np.ndarray:
        return np.arange(self.n_transverse) / self.n_transverse

    @property
    def z_lower(self) -> np.ndarray:
        return np.linspace(0.0, self.H, self.n_lower + 1)

    @property
    def z_upper(self) -> np.ndarray:
        return np.linspace(self.H, 1.0, self.n_upper + 1)

    @property
    def z_nodes(self) -> np.ndarray:
        """All distinct z-levels, with ``H`` listed once."""
        return np.concatenate([self.z_lower, self.z_upper[1:]])

    def mesh(self) -> tuple[np.ndarray, ...]:
        """Transverse coordinate arrays of shape ``transverse_shape``."""
        return tuple(np.meshgrid(*([self.x] * self.dim), indexing="ij"))

    def zeros_lower(self) -> np.ndarray:
        return np.zeros(self.transverse_shape + (self.n_lower + 1,))

    def zeros_upper(self) -> np.ndarray:
        return np.zeros(self.transverse_shape + (self.n_upper + 1,))


def build_grid(n_transverse: int, n_lower: int, n_upper: int, H: float,
               dim: int = 1, transverse_method: str = "spectral") -> Grid:
    if not (0.0 < H < 1.0):
        raise ValidationError(f"reference level H must lie in (0, 1), got {H}")
    for name, n in (("n_transverse", n_transverse), ("n_lower", n_lower), ("n_upper", n_upper)):
        if int(n) != n or n < MIN_POINTS:
            raise ValidationError(
                f"{name}={n}: need an integer >= {MIN_POINTS} for second-order stencils")
    if dim not in (1, 2):
        raise ValidationError(f"transverse dimension must be 1 or 2, got {dim}")
    if transverse_method not in ("spectral", "fd"):
        raise ValidationError(f"unknown transverse method {transverse_method!r}")
    return Grid(int(n_transverse), int(n_lower), int(n_upper), float(H), int(dim),
                transverse_method)


# ---------------------------------------------------------------------------
# transverse derivatives
#
# Both methods act diagonally on Fourier modes: spectral uses i*k and -k^2,
# centred differences on the periodic grid use their modified wavenumbers.

@functools.lru_cache(maxsize=32)
def _symbols(grid: Grid) -> tuple[tuple[np.ndarray, ...], np.ndarray]:
    n = grid.n_transverse
    freqs = [np.fft.fftfreq(n, d=1.0 / n)] * (grid.dim - 1) + [np.fft.rfftfreq(n, d=1.0 / n)]
    ks = np.meshgrid(*[2.0 * np.pi * f for f in freqs], indexing="ij")
    dx = grid.dx
    first = []
    for f, k in zip(np.meshgrid(*freqs, indexing="ij"), ks):
        if grid.transverse_method == "spectral":
            d1 = 1j * k
            d1[np.abs(f) == n / 2] = 0.0  # odd derivative of the Nyquist mode
        else:
            d1 = 1j * np.sin(k * dx) / dx
        first.append(d1)
    if grid.transverse_method == "spectral":
        second = -sum(k**2 for k in ks)
    else:
        second = -sum((2.0 * np.sin(0.5 * k * dx) / dx) ** 2 for k in ks)
    return tuple(first), np.asarray(second, dtype=float)


def _taxes(grid: Grid) -> tuple[int, ...]:
    return tuple(range(grid.dim))


def _fft(f: np.ndarray, grid: Grid) -> np.ndarray:
    return np.fft.rfftn(f, axes=_taxes(grid))


def _ifft(F: np.ndarray, grid: Grid) -> np.ndarray:
    return np.fft.irfftn(F, s=grid.transverse_shape, axes=_taxes(grid))


def _pad(sym: np.ndarray, ndim: int) -> np.ndarray:
    return sym.reshape(sym.shape + (1,) * (ndim - sym.ndim))


def transverse_gradient(f: np.ndarray, grid: Grid) -> np.ndarray:
    """Gradient in x' of an array with leading transverse axes; shape ``(dim, *f.shape)``."""
    F = _fft(f, grid)
    first, _ = _symbols(grid)
    return np.stack([_ifft(_pad(d1, F.ndim) * F, grid) for d1 in first])


def transverse_laplacian(f: np.ndarray, grid: Grid) -> np.ndarray:
    F = _fft(f, grid)
    _, second = _symbols(grid)
    return _ifft(_pad(second, F.ndim) * F, grid)


def transverse_symbols(grid: Grid) -> tuple[tuple[np.ndarray, ...], np.ndarray]:
    """Fourier multipliers of the first derivatives and of the Laplacian (rfft layout)."""
    return _symbols(grid)


# ---------------------------------------------------------------------------
# vertical finite differences (z is the last axis)

def ddz(f: np.ndarray, h: float) -> np.ndarray:
    """Second-order first derivative on all nodes; one-sided at the ends."""
    d = np.empty_like(f)
    d[..., 1:-1] = (f[..., 2:] - f[..., :-2]) / (2.0 * h)
    d[..., 0] = (-3.0 * f[..., 0] + 4.0 * f[..., 1] - f[..., 2]) / (2.0 * h)
    d[..., -1] = (3.0 * f[..., -1] - 4.0 * f[..., -2] + f[..., -3]) / (2.0 * h)
    return d


def ddz_top(f: np.ndarray, h: float) -> np.ndarray:
    """One-sided derivative at the last node (the interface row of the lower slab)."""
    return (3.0 * f[..., -1] - 4.0 * f[..., -2] + f[..., -3]) / (2.0 * h)


def ddz_bottom(f: np.ndarray, h: float) -> np.ndarray:
    """One-sided derivative at the first node (the interface row of the upper slab)."""
    return (-3.0 * f[..., 0] + 4.0 * f[..., 1] - f[..., 2]) / (2.0 * h)


def ddz_interior(f: np.ndarray, h: float) -> np.ndarray:
    return (f[..., 2:] - f[..., :-2]) / (2.0 * h)


def d2dz2_interior(f: np.ndarray, h: float) -> np.ndarray:
    return (f[..., 2:] - 2.0 * f[..., 1:-1] + f[..., :-2]) / (h * h)


# ---------------------------------------------------------------------------
# interface and map

@dataclass
class InterfaceState:
    eta: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        self.eta = np.asarray(self.eta, dtype=float)
        if self.time < 0:
            raise ValidationError("interface time must be non-negative")


def check_margin(state: InterfaceState | np.ndarray, H: float,
                 gamma_margin: float = DEFAULT_GAMMA_MARGIN) -> None:
    """Raise :class:`MarginViolation` unless ``eta`` lies in ``(g - H, 1 - g - H)``."""
    eta = state.eta if isinstance(state, InterfaceState) else np.asarray(state)
    if not np.all(np.isfinite(eta)):
        raise MarginViolation("interface height is not finite")
    lo, hi = gamma_margin - H, 1.0 - gamma_margin - H
    bad = (eta <= lo) | (eta >= hi)
    if np.any(bad):
        idx = tuple(int(i) for i in np.argwhere(bad)[0])
        raise MarginViolation(
            f"interface left the band ({lo:.4g}, {hi:.4g}) at grid index {idx}: "
            f"eta={float(eta[idx]):.6g}")


def metric_coefficients(grad_prime: np.ndarray, dz: np.ndarray) -> np.ndarray:
    """Metric vector ``a(grad phi)`` of the transformed operators.

    ``grad_prime`` has the transverse derivatives stacked on axis 0; ``dz`` is
    the vertical derivative.  Returns an array with ``dim + 1`` components on
    axis 0: ``2 grad'/(1 + dz)`` followed by ``-(1 + |grad'|^2)/(1 + dz)^2``.
    """
    grad_prime = np.asarray(grad_prime, dtype=float)
    dz = np.asarray(dz, dtype=float)
    jac = 1.0 + dz
    if np.any(jac == 0.0):
        raise DegenerateMapError("1 + d(sigma)/dz vanishes; metric is undefined")
    horiz = 2.0 * grad_prime / jac
    vert = -(1.0 + np.sum(grad_prime**2, axis=0)) / jac**2
    return np.concatenate([horiz, vert[None]], axis=0)


@dataclass
class DiffeoMap:
    grid: Grid
    eta: np.ndarray
    sigma_lower: np.ndarray
    sigma_upper: np.ndarray
    dsdz_lower: np.ndarray
    dsdz_upper: np.ndarray
    grad_lower: np.ndarray
    grad_upper: np.ndarray
    metric_lower: np.ndarray
    metric_upper: np.ndarray
    d_sigma_dz_minus: np.ndarray
    d_sigma_dz_plus: np.ndarray
    jacobian_min: float
    transverse_constant: bool = field(default=False)

    @property
    def sigma(self) -> np.ndarray:
        """sigma on all distinct z-levels (``H`` once)."""
        return np.concatenate([self.sigma_lower, self.sigma_upper[..., 1:]], axis=-1)

    @property
    def grad_prime_sigma(self) -> np.ndarray:
        return np.concatenate([self.grad_lower, self.grad_upper[..., 1:]], axis=-1)

    @property
    def grad_eta(self) -> np.ndarray:
        """Transverse gradient of the interface height, shape ``(dim, *transverse)``."""
        return self.grad_lower[..., -1]

    @property
    def metric_a(self) -> np.ndarray:
        return np.concatenate([self.metric_lower, self.metric_upper[..., 1:]], axis=-1)


def tent_profile(grid: Grid) -> tuple[np.ndarray, np.ndarray]:
    s_lo = grid.z_lower / grid.H
    s_up = (1.0 - grid.z_upper) / (1.0 - grid.H)
    s_lo[0], s_lo[-1] = 0.0, 1.0
    s_up[0], s_up[-1] = 1.0, 0.0
    return s_lo, s_up


def build_diffeomorphism(state: InterfaceState | np.ndarray, grid: Grid,
                         delta_j: float = DEFAULT_DELTA_J) -> DiffeoMap:
    eta = state.eta if isinstance(state, InterfaceState) else np.asarray(state, dtype=float)
    if eta.shape != grid.transverse_shape:
        raise ValidationError(
            f"interface array has shape {eta.shape}, grid expects {grid.transverse_shape}")
    s_lo, s_up = tent_profile(grid)
    # tent slopes are exact: no need to difference the sampled profile
    jac_lo = 1.0 + eta / grid.H
    jac_up = 1.0 - eta / (1.0 - grid.H)
    jmin = float(min(jac_lo.min(), jac_up.min()))
    if jmin < delta_j:
        raise DegenerateMapError(
            f"Jacobian 1 + d(sigma)/dz reaches {jmin:.4g} < delta_J={delta_j:g}; "
            f"|eta| is too large relative to H={grid.H:g} and 1-H={1 - grid.H:g}")

    sig_lo = eta[..., None] * s_lo
    sig_up = eta[..., None] * s_up
    dsdz_lo = ddz(sig_lo, grid.dz_lower)
    dsdz_up = ddz(sig_up, grid.dz_upper)
    flat = bool(np.ptp(eta) == 0.0) if eta.size else True
    if flat:
        grad_lo = np.zeros((grid.dim,) + sig_lo.shape)
        grad_up = np.zeros((grid.dim,) + sig_up.shape)
    else:
        grad_eta = transverse_gradient(eta, grid)
        grad_lo = grad_eta[..., None] * s_lo
        grad_up = grad_eta[..., None] * s_up
    return DiffeoMap(
        grid=grid,
        eta=eta.copy(),
        sigma_lower=sig_lo,
        sigma_upper=sig_up,
        dsdz_lower=dsdz_lo,
        dsdz_upper=dsdz_up,
        grad_lower=grad_lo,
        grad_upper=grad_up,
        metric_lower=metric_coefficients(grad_lo, dsdz_lo),
        metric_upper=metric_coefficients(grad_up, dsdz_up),
        d_sigma_dz_minus=ddz_top(sig_lo, grid.dz_lower),
        d_sigma_dz_plus=ddz_bottom(sig_up, grid.dz_upper),
        jacobian_min=jmin,
        transverse_constant=flat,
    )


def physical_heights(diffeo: DiffeoMap) -> tuple[np.ndarray, np.ndarray]:
    """Physical z-coordinates ``z + sigma`` of every node of both slabs."""
    g = diffeo.grid
    return g.z_lower + diffeo.sigma_lower, g.z_upper + diffeo.sigma_upper
