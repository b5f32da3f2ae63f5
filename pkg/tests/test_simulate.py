from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from evapfront.errors import MarginViolation, WellposednessHalt
from evapfront.fields import Params
from evapfront.geometry import build_grid
from evapfront.modelproblem import flat_front_growth_rate
from evapfront.simulate import SimState, Simulator, StepControls, fit_rate, mode_amplitude


def sim(a=0.1, b=0.4, H=0.5, n=16, dt=1e-3, **ctl):
    return Simulator(build_grid(n, n, n, H), Params(a, b, H=H), dt, StepControls(**ctl))


@pytest.mark.parametrize("a, b, H", [(0.1, 0.4, 0.5), (0.15, 0.35, 0.3)])
def test_flat_equilibrium_is_stationary(a, b, H):
    s = sim(a, b, H)
    out = s.run(s.initial_state(np.zeros(16)), 50)
    assert np.abs(out.eta).max() < 1e-12
    assert out.step == 50 and out.time == pytest.approx(0.05)


def test_off_balance_layer_drifts_uniformly():
    # alpha/H + beta/(1-H) = 0.5 leaves a net upward flux of 0.5
    s = sim(0.1, 0.15, 0.5, dt=1e-3)
    out = s.run(s.initial_state(np.zeros(16)), 5)
    assert np.ptp(out.eta) < 1e-13
    assert out.eta[0] == pytest.approx(0.5 * 5e-3, rel=0.05)


def test_mode_amplitude_and_fit():
    g = build_grid(16, 4, 4, 0.5)
    assert mode_amplitude(0.3 * np.cos(2 * np.pi * g.x), g) == pytest.approx(0.3)
    t = np.linspace(0, 1, 11)
    assert fit_rate(t, 2.0 * np.exp(-1.7 * t)) == pytest.approx(-1.7)


def test_single_mode_decays_at_oracle_rate():
    n = 16
    s = sim(n=n, dt=0.25 / n)
    g = s.grid
    state = s.initial_state(1e-6 * np.cos(2 * np.pi * g.x))
    ts, amps = [], []
    for _ in range(int(round(1.0 / s.dt))):
        state, _ = s.step(state)
        if state.time > 0.3:
            ts.append(state.time)
            amps.append(mode_amplitude(state.eta, g))
    rate = fit_rate(np.array(ts), np.array(amps))
    ref = flat_front_growth_rate(s.params, [2 * math.pi]).lam.real
    # coarse grid; the tight check lives in the acceptance suite
    assert abs(rate / ref - 1) < 0.05


def test_restart_is_bitwise():
    s = sim(n=16, dt=2e-3)
    st0 = s.initial_state(0.01 * np.cos(2 * np.pi * s.grid.x) + 0.004 * np.sin(4 * np.pi * s.grid.x))
    straight = s.run(st0.copy(), 10)
    mid = s.run(st0.copy(), 4)
    resumed = SimState(mid.eta.copy(), mid.humidity.copy(), mid.time, mid.step)
    resumed = s.run(resumed, 6)
    assert np.array_equal(straight.eta, resumed.eta)
    assert np.array_equal(straight.humidity, resumed.humidity)
    assert straight.time == resumed.time


def test_halt_on_illposed():
    s = sim(0.4, 0.1, halt_on_illposed=True)
    with pytest.raises(WellposednessHalt):
        s.step(s.initial_state(np.zeros(16)))
    # without halting the run proceeds and the monitor reports the violation
    s = sim(0.4, 0.1)
    _, info = s.step(s.initial_state(np.zeros(16)))
    assert not info.report.satisfied


def test_initial_margin_breach():
    s = sim()
    with pytest.raises(MarginViolation):
        s.initial_state(np.full(16, 0.46))


@settings(max_examples=8, deadline=None)
@given(amp=st.floats(0.0, 0.02), m=st.integers(1, 3))
def test_well_posed_perturbations_shrink(amp, m):
    s = sim(n=16, dt=2e-3)
    eta0 = amp * np.cos(2 * np.pi * m * s.grid.x)
    out = s.run(s.initial_state(eta0), 20)
    assert np.abs(out.eta).max() <= amp + 1e-14
    assert np.all(np.isfinite(out.humidity))
