from __future__ import annotations

import cmath
import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from evapfront.errors import BranchCutError, ValidationError
from evapfront.symbol import (SectorSpec, SymbolParams, csqrt, delta_max, dispersion_root,
                              eval_symbol, layered_dispersion_root, lower_bound, monomial_hull,
                              n_parabolicity_scan, newton_polygon, norm_minus, principal_part,
                              reduce_anisotropic, rotation_matrix)


def quadratic_roots(a, b, c, k):
    """Roots via s = sqrt(lam + k^2), i.e. s^2 + b s + a|k| - k^2 - i c k = 0."""
    kn = abs(k)
    disc = cmath.sqrt(b * b - 4 * (a * kn - kn * kn - 1j * c * k))
    roots = ((-b + disc) / 2, (-b - disc) / 2)
    # principal sheet: Re s > 0, or Re s = 0 with Im s >= 0 (includes s = 0)
    return [s * s - kn * kn for s in roots if s.real > 0 or (s.real == 0 and s.imag >= 0)]


# --- evaluation ---------------------------------------------------------------

def test_symbol_values():
    assert eval_symbol(SymbolParams(0.3, 0.4), 0.0, [0j]) == 0
    assert eval_symbol(SymbolParams(1, 2), 1.0, [0j]) == 3
    assert eval_symbol(SymbolParams(1, 0), 0.0, [2j]) == 2


def test_branch_cut_is_refused():
    with pytest.raises(BranchCutError):
        csqrt(-1.0)
    with pytest.raises(BranchCutError):
        norm_minus([1.0])  # real z: -z^2 < 0
    with pytest.raises(BranchCutError):
        eval_symbol(SymbolParams(1, 1), -5.0, [1j])
    # a negative zero imaginary part comes back as +0.0
    r = csqrt(complex(4, -0.0))
    assert r == 2 and math.copysign(1.0, r.imag) == 1.0


@settings(max_examples=100)
@given(xi=st.floats(-1e3, 1e3).filter(lambda v: abs(v) > 1e-100))
def test_imaginary_axis_gives_modulus(xi):
    assert norm_minus([1j * xi]) == abs(xi)


@settings(max_examples=60)
@given(x1=st.floats(-10, 10), x2=st.floats(-10, 10))
def test_imaginary_axis_two_dims(x1, x2):
    assume(x1 or x2)
    assert norm_minus([1j * x1, 1j * x2]) == pytest.approx(math.hypot(x1, x2), rel=1e-15)


def test_principal_part_table():
    p = SymbolParams(1.0, 1.0)
    assert principal_part(p, 2.0, 3 + 1j, [2j]) == 3 + 1j
    assert principal_part(p, math.inf, 3 + 1j, [2j]) == 3 + 1j
    assert principal_part(SymbolParams(1.5, 1.5), 1.0, 1.0, [0j]) == 1
    assert principal_part(p, 0.5, 5.0, [2j]) == 4
    assert principal_part(p, 0.5, 5.0, [1j]) == 2  # |i|_- = 1
    with pytest.raises(ValidationError):
        principal_part(p, 0.0, 1.0, [1j])


coef = st.floats(-3, 3, allow_nan=False)
sector_z = st.tuples(st.floats(0.1, 5), st.floats(-0.3, 0.3), st.sampled_from([1, -1]))


def _z(t):
    r, th, sgn = t
    return [sgn * 1j * r * cmath.exp(1j * th)]


@settings(max_examples=100)
@given(a=coef, b=coef, c=coef, lr=st.floats(0.1, 10), la=st.floats(-1.6, 1.6), zt=sector_z,
       s=st.floats(0.1, 10))
def test_principal_part_homogeneity(a, b, c, lr, la, zt, s):
    p = SymbolParams(a, b, (c,))
    lam = lr * cmath.exp(1j * la)
    z = _z(zt)
    sz = [s * v for v in z]
    w = principal_part(p, 0.5, lam, z)
    assert principal_part(p, 0.5, 7 * lam, z) == w
    assert abs(principal_part(p, 0.5, lam, sz) - s * w) <= 1e-12 * (1 + abs(s * w))
    w1 = principal_part(p, 1.0, lam, z)
    assert abs(principal_part(p, 1.0, s * lam, sz) - s * w1) <= 1e-12 * (1 + abs(s * w1))


# --- Newton polygon -------------------------------------------------------------

def test_newton_polygon_triangle():
    for p in (SymbolParams(1, 1), SymbolParams(0, 1), SymbolParams(-2, 0, (1.0,)), SymbolParams(0, 0, (0.5, 0))):
        poly = newton_polygon(p)
        assert poly.vertices == [(0, 0), (1, 0), (0, 1)] and not poly.degenerate


def test_newton_polygon_degenerate():
    poly = newton_polygon(SymbolParams(0, 0))
    assert poly.vertices == [(0, 0), (0, 1)] and poly.degenerate


def test_monomial_hull():
    assert monomial_hull([(0, 1), (1, 0)]) == [(0, 0), (1, 0), (0, 1)]
    assert monomial_hull([(2, 1)]) == [(0, 0), (2, 0), (2, 1), (0, 1)]
    # interior points do not show up
    assert monomial_hull([(0, 1), (1, 0), (0.2, 0.2)]) == [(0, 0), (1, 0), (0, 1)]


# --- N-parabolicity -------------------------------------------------------------

def test_scan_pass_example():
    rep = n_parabolicity_scan(SymbolParams(1, 1), SectorSpec(delta_s=0.1), 0.05)
    assert rep.passed
    expected = math.sqrt(math.cos(0.2)) * math.cos(0.1)
    assert rep.norm_bound == pytest.approx(expected)
    assert rep.min_re_norm_minus >= expected - 1e-12
    assert rep.min_re_w >= 2 * expected - 1e-12


def test_scan_detects_negative_sum():
    rep = n_parabolicity_scan(SymbolParams(2, -3), SectorSpec(delta_s=0.1), 0.05)
    assert not rep.passed
    assert rep.first_violation["check"].startswith("gamma<1")
    assert rep.delta_max == 0.0


def test_scan_two_dims():
    rep = n_parabolicity_scan(SymbolParams(0.7, 0.5, (0.3, -0.4)), SectorSpec(n_samples_z=6), 0.05)
    assert rep.passed
    assert rep.min_re_norm_minus >= rep.norm_bound - 1e-12


def test_delta_max_bisection():
    p = SymbolParams(0.5, 0.5, (1.0,))
    d = delta_max(p)
    assert abs(lower_bound(p, d)) < 2e-3
    assert lower_bound(p, d - 2e-3) > 0 > lower_bound(p, d + 2e-3)
    assert delta_max(SymbolParams(1, 0)) == pytest.approx(math.pi / 4)


def test_sector_spec_validation():
    with pytest.raises(ValidationError):
        SectorSpec(delta_s=2.0)
    with pytest.raises(ValidationError):
        SectorSpec(kappa=4.0)


# --- dispersion roots -------------------------------------------------------------

@pytest.mark.parametrize("a, b, expected", [
    (1.0, 0.0, -1.0),
    (0.0, 1.0, -(math.sqrt(5) - 1) / 2),
    (-2.0, 1.0, ((math.sqrt(13) - 1) / 2) ** 2 - 1),
])
def test_known_roots(a, b, expected):
    r = dispersion_root(SymbolParams(a, b), [1.0])
    assert abs(r.lam - expected) < 1e-12
    assert abs(eval_symbol(SymbolParams(a, b), r.lam, [1j])) < 1e-10
    if b:  # for b = 0 the root sits on the branch point s = 0
        assert quadratic_roots(a, b, 0.0, 1.0) == pytest.approx([expected])


def test_linear_case_with_transport():
    r = dispersion_root(SymbolParams(2.0, 0.0, (0.5,)), [3.0])
    assert r.lam == -6 + 1.5j and r.iterations == 0


def test_zero_wavenumber_rejected():
    with pytest.raises(ValidationError):
        dispersion_root(SymbolParams(1, 1), [0.0])


@settings(max_examples=150, deadline=None)
@given(a=coef, b=coef, c=st.floats(-2, 2), k=st.floats(0.1, 30))
def test_roots_match_quadratic_oracle(a, b, c, k):
    expected = quadratic_roots(a, b, c, k)
    disc = cmath.sqrt(b * b - 4 * (a * k - k * k - 1j * c * k))
    re_s = sorted([((-b + disc) / 2).real, ((-b - disc) / 2).real])
    # one root well inside the principal sheet, the other clearly outside it
    assume(len(expected) == 1 and re_s[0] < -1e-3 and re_s[1] > 1e-3)
    r = dispersion_root(SymbolParams(a, b, (c,)), [k])
    p = SymbolParams(a, b, (c,))
    assert abs(eval_symbol(p, r.lam, [1j * k])) < 1e-12 * max(1.0, k)
    assert abs(r.lam - expected[0]) < 1e-8 * (1 + abs(expected[0]))


@settings(max_examples=60, deadline=None)
@given(a=coef, b=coef, k=st.floats(0.1, 10))
def test_real_or_conjugate_roots_without_transport(a, b, k):
    expected = quadratic_roots(a, b, 0.0, k)
    assume(len(expected) == 1 and cmath.sqrt(expected[0] + k * k).real > 1e-3)
    r = dispersion_root(SymbolParams(a, b), [k])
    assert abs(r.lam.imag) < 1e-12 or abs(eval_symbol(SymbolParams(a, b), r.lam.conjugate(), [1j * k])) < 1e-10


def dichotomy_grid():
    alphas = np.linspace(-0.95, 0.95, 20)
    return [(a, b) for a in alphas for b in alphas + 0.025]


def test_sign_dichotomy():
    for a, b in dichotomy_grid():
        r = dispersion_root(SymbolParams(a, b), [1.0])
        assert (r.lam.real < 0) == (a + b > 0), (a, b, r.lam)


# --- finite layer -----------------------------------------------------------------

def test_layered_linear_case():
    for k in (0.5, 2.0, 7.0):
        r = layered_dispersion_root(SymbolParams(1.0, 0.0), [k], 0.5)
        assert r.lam == pytest.approx(-k / math.tanh(k * 0.5), rel=1e-15)


def test_layered_large_k_limit():
    r = layered_dispersion_root(SymbolParams(1.0, 0.0), [20.0], 0.5)
    assert r.lam.real == pytest.approx(-20, rel=0.01)
    p = SymbolParams(-0.2, 0.8)
    for k in (16.0, 32.0):
        lay = layered_dispersion_root(p, [k], 0.5).lam
        half = dispersion_root(p, [k]).lam
        assert abs(lay - half) < 0.01 * abs(half)


def test_layered_small_k_limit():
    r = layered_dispersion_root(SymbolParams(1.0, 0.0), [1e-4], 0.25)
    assert r.lam.real == pytest.approx(-1 / 0.25, rel=1e-6)


def test_layered_series_branch_consistent():
    # the small-argument series and the closed form agree where both are valid
    from evapfront.symbol import _layer_dtn
    for lam in (-1.0 + 0.0j, -1.0 + 0.2j):
        k2 = 1.0 + 0.0099 / 0.25
        a = _layer_dtn(lam - 0.0001, k2, 0.5)
        b = _layer_dtn(lam - 0.0002, k2, 0.5)
        assert abs(a[0] - b[0]) < 1e-3


@settings(max_examples=40, deadline=None)
@given(a=st.floats(-1, 1), b=st.floats(0.05, 2), k=st.floats(0.5, 20), H=st.floats(0.2, 0.8))
def test_layered_residual(a, b, k, H):
    p = SymbolParams(a, b)
    r = layered_dispersion_root(p, [k], H)
    assert r.residual < 1e-10 * max(1.0, k)


# --- anisotropic reduction ----------------------------------------------------------

def test_identity_matrix_is_trivial():
    p = reduce_anisotropic(np.eye(2), 0.3, 0.7, [0.4])
    assert (p.alpha_s, p.beta_s, p.c) == (-0.3, 0.7, (-0.4,))


def test_rotation_matrix_properties():
    A = np.array([[2.0, 0.3, 0.1], [0.3, 1.5, -0.2], [0.1, -0.2, 1.2]])
    M = rotation_matrix(A)
    np.testing.assert_allclose(M.T @ M, np.linalg.inv(A), atol=1e-14)
    assert np.allclose(np.tril(M, -1), 0)  # upper triangular keeps x_n = 0 fixed
    np.testing.assert_allclose(M @ A @ M.T, np.eye(3), atol=1e-14)


@settings(max_examples=40, deadline=None)
@given(q=st.floats(0.2, 3), r=st.floats(0.2, 3), off=st.floats(-0.4, 0.4), a=coef, b=coef, c=coef)
def test_reduction_coefficients(q, r, off, a, b, c):
    A = np.array([[q, off * math.sqrt(q * r)], [off * math.sqrt(q * r), r]])
    M = rotation_matrix(A)
    p = reduce_anisotropic(A, a, b, [c])
    mnn, m, mp = M[1, 1], M[0, 1], M[0, 0]
    assert p.alpha_s == pytest.approx(-mnn * a) and p.beta_s == pytest.approx(mnn * b)
    assert p.c[0] == pytest.approx(-(mp * c - (a + b) * m), abs=1e-12)
    ev = np.linalg.eigvalsh(A)
    assert 1 / math.sqrt(ev.max()) - 1e-12 <= mnn <= 1 / math.sqrt(ev.min()) + 1e-12


def test_reduction_rejects_bad_matrices():
    with pytest.raises(ValidationError):
        reduce_anisotropic(np.array([[1.0, 2.0], [0.0, 1.0]]), 1, 1, [0])
    with pytest.raises(ValidationError):
        reduce_anisotropic(-np.eye(2), 1, 1, [0])
