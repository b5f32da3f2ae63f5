from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from evapfront.errors import ConvergenceError, ValidationError
from evapfront.fields import Params, flat_state
from evapfront.geometry import build_diffeomorphism, build_grid
from evapfront.linearize import frozen_coefficients
from evapfront.modelproblem import flat_front_growth_rate, solve_halfspace_mode
from evapfront.symbol import SymbolParams, dispersion_root, layered_dispersion_root


def ramp(t):
    return 1.0 - math.exp(-t)


def pulse(t):
    return t * math.exp(-10.0 * t)


def flat_symbol(params, dim=1):
    g = build_grid(8, 8, 8, params.H, dim=dim)
    d = build_diffeomorphism(np.zeros(g.transverse_shape), g)
    return frozen_coefficients(flat_state(g), d, params).to_symbol_params()


# --- half-space oracle ------------------------------------------------------------

def test_scalar_ode_closed_form():
    sol = solve_halfspace_mode(1.0, 0.0, [0.0], [1.0], ramp, T=5.0, dt=0.01)
    exact = (1 - np.exp(-sol.t)) - sol.t * np.exp(-sol.t)
    assert np.abs(sol.phi_hat - exact).max() < 1e-8
    assert sol.phi_hat[0] == 0


def test_zero_forcing_stays_zero():
    sol = solve_halfspace_mode(0.3, 0.7, [0.5], [2.0], lambda t: 0.0, T=1.0, dt=0.05)
    assert np.all(sol.phi_hat == 0)


def test_linearity_in_forcing():
    a = solve_halfspace_mode(0.2, 0.5, [0.3], [1.5], pulse, T=2.0, dt=0.02)
    b = solve_halfspace_mode(0.2, 0.5, [0.3], [1.5], lambda t: 2 * pulse(t), T=2.0, dt=0.02)
    assert np.abs(b.phi_hat - 2 * a.phi_hat).max() <= 1e-12 * max(1.0, np.abs(b.phi_hat).max())


def test_profile_consistency():
    sol = solve_halfspace_mode(0.2, 0.8, [0.0], [2.0], pulse, T=1.0, dt=0.05)
    np.testing.assert_allclose(sol.phi_minus_profile, sol.phi_hat[-1] * np.exp(-2.0 * sol.x),
                               rtol=0, atol=1e-10 * abs(sol.phi_hat[-1]))
    assert sol.phi_plus_profile[0] == sol.phi_hat[-1]


def test_decay_matches_symbol_root():
    sol = solve_halfspace_mode(0.0, 1.0, [0.0], [1.0], pulse, T=20.0, dt=0.01)
    root = dispersion_root(SymbolParams(0.0, 1.0), [1.0]).lam.real
    assert abs(sol.log_slope(10.0) / root - 1) < 0.02


def test_depth_and_dt_refinement():
    base = solve_halfspace_mode(0.1, 0.6, [0.0], [1.0], pulse, T=3.0, dt=0.02)
    fine = solve_halfspace_mode(0.1, 0.6, [0.0], [1.0], pulse, T=3.0, dt=0.01, depth=2 * base.depth)
    assert abs(fine.phi_hat[-1] / base.phi_hat[-1] - 1) < 5e-3


def test_shallow_truncation_is_detected():
    with pytest.raises(ConvergenceError):
        solve_halfspace_mode(0.0, 1.0, [0.0], [0.2], pulse, T=20.0, dt=0.05, depth=0.5,
                             check_depth=True)


@pytest.mark.parametrize("kwargs", [
    dict(g_of_t=lambda t: 1.0),
    dict(T=1.0, dt=0.3),
    dict(k=[0.0]),
    dict(c=[0.0, 1.0]),
])
def test_halfspace_rejects_bad_input(kwargs):
    args = dict(alpha_s=0.5, beta_s=0.5, c=[0.0], k=[1.0], g_of_t=ramp, T=1.0, dt=0.1)
    args.update(kwargs)
    with pytest.raises(ValidationError):
        solve_halfspace_mode(**args)


# --- flat layer eigenproblem -------------------------------------------------------

@settings(max_examples=15, deadline=None)
@given(a=st.floats(0.01, 2.0), H=st.floats(0.2, 0.8), k=st.floats(0.5, 20.0))
def test_elliptic_only_family_agrees(a, H, k):
    p = Params(a, 0.0, H=H)
    ff = flat_front_growth_rate(p, [k]).lam
    lay = layered_dispersion_root(flat_symbol(p), [k], H).lam
    # pressure pulls the front up: the elliptic-only layer is unstable
    exact = (a / H) * k / math.tanh(k * H)
    assert abs(ff - lay) <= 1e-6 * abs(lay)
    assert abs(lay - exact) <= 1e-8 * abs(exact)


@pytest.mark.parametrize("k", [1.0, 2.0, 4.0, 8.0, 16.0])
def test_well_posed_modes_decay(k):
    p = Params(0.1, 0.4, H=0.5)
    r = flat_front_growth_rate(p, [k])
    assert r.lam.real < 0
    assert r.residual < 1e-8 * (1 + abs(r.lam))


@pytest.mark.parametrize("a, b, H", [(0.1, 0.4, 0.5), (0.3, 0.15, 0.35), (0.6, 0.3, 0.2)])
def test_flat_front_matches_layered_symbol(a, b, H):
    p = Params(a, b, H=H)
    for k in (1.0, 2 * math.pi):
        ff = flat_front_growth_rate(p, [k]).lam
        lay = layered_dispersion_root(flat_symbol(p), [k], H).lam
        assert abs(ff - lay) <= 1e-8 * (1 + abs(lay))


def test_short_wave_limit():
    p = Params(0.1, 0.4, H=0.5)
    k = 16.0 / p.H  # kH = 16
    ff = flat_front_growth_rate(p, [k]).lam
    hs = dispersion_root(flat_symbol(p), [k]).lam
    assert abs(ff.real / hs.real - 1) < 0.01


def test_ill_posed_layer_grows():
    assert flat_front_growth_rate(Params(0.4, 0.1, H=0.5), [2 * math.pi]).lam.real > 0


def test_flat_front_rejects_zero_wavenumber():
    with pytest.raises(ValidationError):
        flat_front_growth_rate(Params(0.1, 0.4), [0.0])
