"""Boundary symbol of the linearized front problem.

    P(lambda, z) = lambda + alpha |z|_- + beta sqrt(lambda + |z|_-^2) - c . z,
    |z|_- = sqrt(-sum z_k^2)

with the principal square root (argument in (-pi, pi]).  Evaluated at
``z = i k`` for a real wavenumber ``k``, a root ``lambda`` of ``P(., ik)`` is
the growth rate of the mode ``exp(i k . x)``.  In the time domain that mode
sees the transport term ``-c . grad'``, so ``c`` here is minus the transport
vector that multiplies ``grad'`` in the boundary equation.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import bisect

from .errors import BranchCutError, ConvergenceError, ValidationError

TOL_ROOT = 1e-12
MAX_ITER = 50


@dataclass(frozen=True)
class SymbolParams:
    alpha_s: float
    beta_s: float
    c: tuple[float, ...] = (0.0,)
    constraint_sum: float = field(init=False)

    def __post_init__(self):
        c = tuple(float(v) for v in np.atleast_1d(self.c))
        if len(c) not in (1, 2):
            raise ValidationError("transport vector must have length 1 or 2")
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "constraint_sum", self.alpha_s + self.beta_s)

    @property
    def c_vec(self) -> np.ndarray:
        return np.array(self.c)

    @property
    def c_norm(self) -> float:
        return float(np.linalg.norm(self.c))


@dataclass(frozen=True)
class SectorSpec:
    kappa: float = math.pi / 2 + 0.05
    delta_s: float = 0.1
    n_samples_radial: int = 32
    n_samples_angular: int = 64
    n_samples_z: int = 16

    def __post_init__(self):
        if not 0 < self.kappa < math.pi:
            raise ValidationError("kappa must lie in (0, pi)")
        if not 0 < self.delta_s < math.pi / 2:
            raise ValidationError("delta_s must lie in (0, pi/2)")
        if min(self.n_samples_radial, self.n_samples_angular, self.n_samples_z) < 1:
            raise ValidationError("sample counts must be positive")


@dataclass
class DispersionRoot:
    k: np.ndarray
    lam: complex
    residual: float
    branch_note: str = ""
    iterations: int = 0

    def as_dict(self) -> dict:
        return {"k": [float(v) for v in np.atleast_1d(self.k)], "lambda_re": self.lam.real,
                "lambda_im": self.lam.imag, "residual": self.residual,
                "branch_note": self.branch_note, "iterations": self.iterations}


# --- branch-aware evaluation ------------------------------------------------

def csqrt(w: complex) -> complex:
    """Principal square root; refuses arguments on the negative real axis."""
    w = complex(w)
    w = complex(w.real, w.imag + 0.0)  # -0.0 -> +0.0, so arg(w) = pi not -pi
    if w.imag == 0.0 and w.real < 0.0:
        raise BranchCutError(f"sqrt requested on the branch cut at w={w.real:.6g}")
    r = cmath.sqrt(w)
    return complex(r.real, r.imag + 0.0)


def norm_minus(z) -> complex:
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    return csqrt(-complex(np.sum(z * z)))


def _dot(c: tuple[float, ...], z) -> complex:
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if z.shape != (len(c),):
        raise ValidationError(f"z has {z.size} components, transport vector has {len(c)}")
    return complex(np.dot(np.array(c), z))


def eval_symbol(p: SymbolParams, lam: complex, z) -> complex:
    nm = norm_minus(z)
    out = complex(lam) + p.alpha_s * nm - _dot(p.c, z)
    if p.beta_s != 0.0:
        out += p.beta_s * csqrt(complex(lam) + nm * nm)
    return out


def principal_part(p: SymbolParams, gamma_h: float, lam: complex, z) -> complex:
    """gamma-principal part; ``gamma_h = math.inf`` is allowed."""
    if not gamma_h > 0:
        raise ValidationError("gamma_h must be positive")
    lam = complex(lam)
    if gamma_h > 1:
        return lam
    w = p.constraint_sum * norm_minus(z) - _dot(p.c, z)
    return w if gamma_h < 1 else lam + w


# --- Newton polygon ---------------------------------------------------------

@dataclass
class NewtonPolygon:
    vertices: list[tuple[float, float]]
    degenerate: bool


def monomial_hull(exponents) -> list[tuple[float, float]]:
    """Newton polygon of a set of (space order, time order) exponent pairs.

    Each pair contributes itself and its projections onto both axes, plus the
    origin; the convex hull is returned counter-clockwise from (0, 0).
    """
    pts = {(0.0, 0.0)}
    for a, b in exponents:
        pts |= {(float(a), float(b)), (float(a), 0.0), (0.0, float(b))}
    pts = sorted(pts)
    if len(pts) <= 2:
        return pts

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower, upper = [], []
    for pt in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], pt) <= 0:
            lower.pop()
        lower.append(pt)
    for pt in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], pt) <= 0:
            upper.pop()
        upper.append(pt)
    hull = lower[:-1] + upper[:-1]
    start = hull.index((0.0, 0.0))
    return hull[start:] + hull[:start]


def newton_polygon(p: SymbolParams) -> NewtonPolygon:
    # lambda -> (0,1); |z| and c.z -> (1,0); sqrt(lambda + |z|^2) -> (1,0) and (0,1/2)
    exps = [(0, 1)]
    if p.alpha_s != 0 or p.c_norm != 0:
        exps.append((1, 0))
    if p.beta_s != 0:
        exps += [(1, 0), (0, 0.5)]
    verts = monomial_hull(exps)
    tri = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)]
    return NewtonPolygon(verts, degenerate=verts != tri)


# --- N-parabolicity scan ----------------------------------------------------

def lower_bound(p: SymbolParams, delta: float) -> float:
    """Closed-form lower bound of Re((a+b)|z|_- - c.z) on |z| = 1."""
    return math.sqrt(math.cos(2 * delta)) * math.cos(delta) * p.constraint_sum - p.c_norm * math.sin(delta)


def delta_max(p: SymbolParams, xtol: float = 1e-3) -> float:
    """Largest sector half-angle keeping the closed-form bound positive."""
    if p.constraint_sum <= 0:
        return 0.0
    hi = math.pi / 4
    if lower_bound(p, hi) > 0 or p.c_norm == 0:
        return hi
    return float(bisect(lambda d: lower_bound(p, d), 0.0, hi, xtol=xtol))


def _z_samples(n_dim: int, delta: float, n: int) -> np.ndarray:
    """Unit-norm points of the double sector around the imaginary axis."""
    th = np.linspace(-delta, delta, n + 2)[1:-1]
    if n_dim == 1:
        z = 1j * np.exp(1j * th)
        return np.concatenate([z, -z])[:, None]
    phi = np.linspace(0.0, 2 * np.pi, 2 * n, endpoint=False)
    t1, t2, ph = np.meshgrid(th, th, phi, indexing="ij")
    z = np.stack([1j * np.cos(ph) * np.exp(1j * t1), 1j * np.sin(ph) * np.exp(1j * t2)], axis=-1)
    z = z.reshape(-1, 2)
    # components with a zero radius sit on the sector's apex; drop them
    keep = np.all(np.abs(z) > 1e-12, axis=1)
    return z[keep]


def _lambda_samples(s: SectorSpec, eta_sector: float) -> np.ndarray:
    half = math.pi / 2 + eta_sector
    r = np.logspace(-3, 3, s.n_samples_radial)
    ang = np.linspace(-half, half, s.n_samples_angular + 2)[1:-1]
    return (r[:, None] * np.exp(1j * ang[None, :])).ravel()


@dataclass
class ScanReport:
    passed: bool
    min_abs: dict[str, float]
    min_re_norm_minus: float
    norm_bound: float
    min_re_w: float
    w_bound: float
    delta_max: float
    n_samples: int
    first_violation: dict | None = None

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in ("passed", "min_abs", "min_re_norm_minus",
                                              "norm_bound", "min_re_w", "w_bound",
                                              "delta_max", "n_samples", "first_violation")}


def n_parabolicity_scan(p: SymbolParams, s: SectorSpec, eta_sector: float = 0.05) -> ScanReport:
    """Falsification harness for N-parabolicity on sampled sectors.

    ``|z| = 1`` by homogeneity.  For gamma < 1 the principal part
    ``w = (a+b)|z|_- - c.z`` must lie in the sector of half-angle
    ``pi/2 - eta_sector``, which is exactly what keeps ``lambda + w`` away
    from zero for all ``lambda`` in the widened sector; the gamma = 1 part is
    also sampled directly.
    """
    if not 0 < eta_sector < math.pi / 2:
        raise ValidationError("eta_sector must lie in (0, pi/2)")
    n_dim = len(p.c)
    delta = s.delta_s
    zs = _z_samples(n_dim, delta, s.n_samples_z)
    lams = _lambda_samples(s, eta_sector)
    cz = zs @ p.c_vec
    nm = np.sqrt(-np.sum(zs * zs, axis=1))  # arg(-z.z) in (-2 delta, 2 delta): no cut issue
    w = p.constraint_sum * nm - cz

    viol = None
    nbound = math.sqrt(math.cos(2 * delta)) * math.cos(delta)
    bad_nm = np.flatnonzero(nm.real < nbound - 1e-12)
    if bad_nm.size:
        i = bad_nm[0]
        viol = {"check": "Re|z|_- bound", "z": _c2l(zs[i]), "value": float(nm[i].real)}
    wbound = lower_bound(p, delta)
    if viol is None and p.constraint_sum > 0:
        bad_w = np.flatnonzero(w.real < wbound - 1e-12)
        if bad_w.size:
            i = bad_w[0]
            viol = {"check": "Re w bound", "z": _c2l(zs[i]), "value": float(w[i].real)}

    abs_w = np.abs(w)
    lim = math.pi / 2 - eta_sector
    bad_sec = np.flatnonzero((abs_w == 0) | (np.abs(np.angle(w)) >= lim))
    if viol is None and bad_sec.size:
        i = bad_sec[0]
        viol = {"check": "gamma<1 part outside sector", "z": _c2l(zs[i]),
                "value": [float(w[i].real), float(w[i].imag)]}

    # gamma = 1: lambda + w, sampled; keep the 2-d grid affordable
    zsub = zs if len(zs) <= 64 else zs[:: max(1, len(zs) // 64)]
    wsub = p.constraint_sum * np.sqrt(-np.sum(zsub * zsub, axis=1)) - zsub @ p.c_vec
    pi1 = np.abs(lams[:, None] + wsub[None, :])
    min1 = float(pi1.min())
    if viol is None and min1 == 0.0:
        i, j = np.unravel_index(np.argmin(pi1), pi1.shape)
        viol = {"check": "gamma=1 zero", "lambda": [lams[i].real, lams[i].imag], "z": _c2l(zsub[j])}

    return ScanReport(
        passed=viol is None,
        min_abs={"gamma<1": float(abs_w.min()), "gamma=1": min1, "gamma>1": float(np.abs(lams).min())},
        min_re_norm_minus=float(nm.real.min()),
        norm_bound=nbound,
        min_re_w=float(w.real.min()),
        w_bound=wbound,
        delta_max=delta_max(p),
        n_samples=int(lams.size * len(zsub) + len(zs)),
        first_violation=viol,
    )


def _c2l(z) -> list[list[float]]:
    return [[float(v.real), float(v.imag)] for v in np.atleast_1d(z)]


# --- dispersion roots -------------------------------------------------------

def _kvec(k) -> tuple[np.ndarray, float]:
    kv = np.atleast_1d(np.asarray(k, dtype=float))
    kn = float(np.linalg.norm(kv))
    if kn == 0:
        raise ValidationError("wavenumber must be nonzero")
    return kv, kn


def _newton(fun, dfun, guesses, tol, max_iter, cut):
    """Damped Newton over a list of starting points.

    ``cut(lam)`` is true when ``lam`` is on the wrong side of a branch cut; a
    step that lands there is halved until it does not.
    """
    last = None
    for lam in guesses:
        try:
            f = fun(lam)
        except BranchCutError:
            continue
        for it in range(1, max_iter + 1):
            if abs(f) < tol:
                return lam, f, it - 1
            try:
                step = f / dfun(lam)
            except (BranchCutError, ZeroDivisionError):
                break
            t = 1.0
            for _ in range(40):
                cand = lam - t * step
                if not cut(cand):
                    try:
                        fc = fun(cand)
                    except BranchCutError:
                        fc = None
                    if fc is not None and (abs(fc) < abs(f) or t < 1e-6):
                        break
                t *= 0.5
            else:
                break
            lam, f = cand, fc
            last = lam
        if abs(f) < tol:
            return lam, f, max_iter
    raise ConvergenceError("dispersion root did not converge", last_iterate=last)


def dispersion_root(p: SymbolParams, k, lambda0: complex | None = None, *,
                    tol_root: float = TOL_ROOT, max_iter: int = MAX_ITER) -> DispersionRoot:
    kv, kn = _kvec(k)
    z = 1j * kv
    cik = 1j * float(np.dot(p.c_vec, kv))
    explicit = -p.alpha_s * kn + cik
    if p.beta_s == 0.0:
        lam = explicit
        res = abs(eval_symbol(p, lam, z))
        return DispersionRoot(kv, lam, res, "linear case, explicit root", 0)

    def fun(lam):
        return eval_symbol(p, lam, z)

    def dfun(lam):
        return 1.0 + p.beta_s / (2.0 * csqrt(lam + kn * kn))

    def cut(lam):
        w = lam + kn * kn
        return w.imag == 0.0 and w.real <= 0.0

    guesses = [g for g in (lambda0, explicit, -p.constraint_sum * kn + cik) if g is not None]
    if p.beta_s < 0:
        # a negative beta can push the root far out: sqrt(lam + k^2) ~ |k| - beta
        guesses.append((kn - p.beta_s) ** 2 - kn * kn + cik)
    if lambda0 is not None:
        guesses.append(complex(lambda0).conjugate())
    lam, f, it = _newton(fun, dfun, guesses, tol_root, max_iter, cut)
    res = abs(eval_symbol(p, lam, z))
    s = csqrt(lam + kn * kn)
    return DispersionRoot(kv, lam, res, f"principal sqrt(lambda+|k|^2) = {s.real:.6g}{s.imag:+.6g}i", it)


def _layer_dtn(lam: complex, k2: float, L: float) -> tuple[complex, complex]:
    """``S = s coth(s L)`` with ``s^2 = lam + k2`` and ``dS/dlam``; even in ``s``."""
    u = (lam + k2) * L * L
    if abs(u) < 1e-2:
        S = (1 + u / 3 - u * u / 45 + 2 * u**3 / 945 - u**4 / 4725) / L
        dS = L * (1 / 3 - 2 * u / 45 + 6 * u * u / 945 - 4 * u**3 / 4725)
        return S, dS
    s = cmath.sqrt(lam + k2)
    x = s * L
    coth = 1.0 / cmath.tanh(x)
    return s * coth, (coth - x * (coth * coth - 1.0)) / (2.0 * s)


def layered_dispersion_root(coeffs, k, H: float, lambda0: complex | None = None, *,
                            tol_root: float = TOL_ROOT, max_iter: int = MAX_ITER) -> DispersionRoot:
    """Root of the finite-layer analogue of the boundary equation.

    ``|k| -> |k| coth(|k| H)`` in the elliptic slab and
    ``sqrt(lam + k^2) -> s coth(s (1 - H))`` in the parabolic one.  ``coeffs``
    is a ``SymbolParams`` or anything with ``to_symbol_params()``.
    """
    if not 0 < H < 1:
        raise ValidationError("H must lie in (0, 1)")
    p = coeffs if isinstance(coeffs, SymbolParams) else coeffs.to_symbol_params()
    kv, kn = _kvec(k)
    k2, L = kn * kn, 1.0 - H
    ell = kn / math.tanh(kn * H)
    cik = 1j * float(np.dot(p.c_vec, kv))

    def fun(lam):
        return lam + p.alpha_s * ell + p.beta_s * _layer_dtn(lam, k2, L)[0] - cik

    explicit = -p.alpha_s * ell + cik
    if p.beta_s == 0.0:
        return DispersionRoot(kv, explicit, abs(fun(explicit)), "linear case, explicit root", 0)

    def dfun(lam):
        return 1.0 + p.beta_s * _layer_dtn(lam, k2, L)[1]

    guesses = [g for g in (lambda0, explicit, -p.alpha_s * ell - p.beta_s * math.sqrt(k2 + 1 / L**2) + cik)
               if g is not None]
    lam, f, it = _newton(fun, dfun, guesses, tol_root, max_iter, lambda _: False)
    return DispersionRoot(kv, lam, abs(fun(lam)), "layer relation is entire in s^2: no branch cut", it)


# --- anisotropic reduction --------------------------------------------------

def reduce_anisotropic(A, alpha: float, beta: float, c) -> SymbolParams:
    """Map frozen anisotropic coefficients to isotropic symbol parameters.

    Boundary equation in the time domain::

        phi_t - alpha d_n phi^- - beta d_n phi^+ + c . grad' phi = g,
        with bulk operators a_ij d_ij,  A = (a_ij) SPD, n x n

    ``phi = phi~ o M`` with ``M^T M = A^{-1}`` and ``M`` upper triangular (so
    both half spaces and the boundary are preserved) turns the bulk operators
    into Laplacians.  ``d_n phi = m . grad' phi~ + M_nn d_n phi~``, hence the
    new coefficients ``M_nn alpha``, ``M_nn beta`` and
    ``M' c - (alpha + beta) m``.  Reflecting the lower phase flips the sign
    of its coefficient.
    """
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    c = np.atleast_1d(np.asarray(c, dtype=float))
    if A.shape != (n, n) or c.shape != (n - 1,):
        raise ValidationError("A must be n x n and c of length n-1")
    if not np.allclose(A, A.T):
        raise ValidationError("A must be symmetric")
    try:
        L = np.linalg.cholesky(np.linalg.inv(A))
    except np.linalg.LinAlgError as exc:
        raise ValidationError("A must be positive definite") from exc
    M = L.T  # upper triangular, M^T M = A^{-1}
    mnn = M[-1, -1]
    c_t = M[:-1, :-1] @ c - (alpha + beta) * M[:-1, -1]
    # symbol c is minus the time-domain transport vector
    return SymbolParams(-mnn * alpha, mnn * beta, tuple(-c_t))


def rotation_matrix(A) -> np.ndarray:
    """The upper-triangular ``M`` with ``M^T M = A^{-1}`` used above."""
    return np.linalg.cholesky(np.linalg.inv(np.asarray(A, dtype=float))).T
