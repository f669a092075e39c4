import numpy as np
import pytest
import sympy as sp
from hypothesis import given, strategies as st

from logrep.heat import (Field1D, HeatSetup, PositivityError, WindowError, burgers_residual,
                         bump_mass, cole_hopf, decaying_waves, derivative_apply, field_mass,
                         fractional_power_apply, heat_evolve_t, heat_evolve_x, miura_compose,
                         profile, resolvent_bound_probe, sideways_symbol)


def test_burgers_form_symbolic():
    # psi = -2 nu u_x / u with u_t = nu u_xx satisfies psi_t + psi psi_x = nu psi_xx
    t, x, nu, a, b = sp.symbols("t x nu a b", positive=True)
    u = 3 + a * sp.exp(-nu * t) * sp.cos(x) + b * sp.exp(-4 * nu * t) * sp.sin(2 * x)
    assert sp.simplify(sp.diff(u, t) - nu * sp.diff(u, x, 2)) == 0
    psi = -2 * nu * sp.diff(u, x) / u
    res = sp.diff(psi, t) + psi * sp.diff(psi, x) - nu * sp.diff(psi, x, 2)
    assert sp.simplify(res) == 0


def test_sideways_symbol_solves_heat():
    # u = exp(i w t - lam x) solves u_xx = mu^{1/2} u_t
    t, x, w, mu = sp.symbols("t x w mu", positive=True)
    lam = sp.sqrt(sp.I * sp.sqrt(mu) * w)
    u = sp.exp(sp.I * w * t - lam * x)
    assert sp.simplify(sp.diff(u, x, 2) - sp.sqrt(mu) * sp.diff(u, t)) == 0


@given(st.integers(0, 2 ** 32 - 1), st.sampled_from([4, 16, 64, 256]))
def test_fft_roundtrip(seed, n):
    rng = np.random.default_rng(seed)
    f = Field1D(rng.standard_normal(n) + 1j * rng.standard_normal(n), 3.0)
    back = f.to_fourier().to_physical()
    assert np.linalg.norm(back.values - f.values) <= 1e-12 * np.linalg.norm(f.values)


def test_field_guards():
    with pytest.raises(ValueError):
        Field1D(np.zeros(6))
    with pytest.raises(ValueError):
        Field1D([1.0, np.inf])
    with pytest.raises(ValueError):
        HeatSetup(0.0, 8, 1.0)


def test_heat_t_examples():
    setup = HeatSetup(1.0, 32, 2 * np.pi)
    u0 = profile("cosine", 32, 2 * np.pi)
    np.testing.assert_allclose(heat_evolve_t(setup, u0, 0.0).values, u0.values)
    x = setup.grid
    for w in (1, 3):
        got = heat_evolve_t(setup, setup.field(np.cos(w * x)), 0.3).values
        np.testing.assert_allclose(got, np.exp(-0.3 * w ** 2) * np.cos(w * x), atol=1e-14)
    with pytest.raises(ValueError):
        heat_evolve_t(setup, u0, -0.1)


def test_heat_t_conserves_mass():
    setup = HeatSetup(2.0, 128, 10.0)
    u0 = profile("gaussian-bump", 128, 10.0)
    assert field_mass(u0).real == pytest.approx(bump_mass(10.0), rel=1e-12)
    assert field_mass(heat_evolve_t(setup, u0, 1.0)).real == pytest.approx(bump_mass(10.0),
                                                                             rel=1e-12)


def waves(rng, length, modes):
    ks = np.arange(-modes, modes + 1)
    amps = (rng.standard_normal(ks.size) + 1j * rng.standard_normal(ks.size)) * np.exp(-0.3 * abs(ks))
    return amps, 2 * np.pi * ks / length


def test_x_evolution_identity(rng):
    setup = HeatSetup(1.0, 64, 4.0, "x-evolution")
    v0 = setup.field(rng.standard_normal(64))
    v1 = setup.field(rng.standard_normal(64))
    res = heat_evolve_x(setup, v0, v1, 0.0)
    np.testing.assert_array_equal(res.u.values, v0.values)
    np.testing.assert_array_equal(res.ux.values, v1.values)


@pytest.mark.parametrize("mu", [0.5, 1.0, 2.0])
def test_direction_consistency(rng, mu):
    length = 8.0
    setup = HeatSetup(mu, 128, length, "x-evolution")
    amps, omegas = waves(rng, length, 6)
    x0, delta = -0.5, 0.1 * length
    v0, v1 = decaying_waves(mu, setup.grid, x0, amps, omegas, (0.4, -0.2))
    truth = decaying_waves(mu, setup.grid, x0 + delta, amps, omegas, (0.4, -0.2))
    res = heat_evolve_x(setup, setup.field(v0), setup.field(v1), delta)
    assert np.linalg.norm(res.u.values - truth[0]) <= 1e-6 * np.linalg.norm(truth[0])
    assert np.linalg.norm(res.ux.values - truth[1]) <= 1e-6 * np.linalg.norm(truth[1])
    # backwards in x as well
    back = heat_evolve_x(setup, res.u, res.ux, -delta)
    assert np.linalg.norm(back.u.values - v0) <= 1e-6 * np.linalg.norm(v0)


def test_decaying_waves_slice_matches_t_evolution():
    # for a single spatial mode the x-profile at fixed t evolves by the heat flow in t
    mu, length = 1.0, 2 * np.pi
    setup = HeatSetup(mu, 64, length)
    x = setup.grid
    u0 = setup.field(1 + 0.3 * np.cos(2 * x))
    got = heat_evolve_t(setup, u0, 0.25).values
    np.testing.assert_allclose(got, 1 + 0.3 * np.exp(-0.25 * 4 / np.sqrt(mu)) * np.cos(2 * x),
                               atol=1e-14)


def test_x_window_guard(rng):
    setup = HeatSetup(1.0, 256, 0.1, "x-evolution")
    v = setup.field(rng.standard_normal(256))
    with pytest.raises(WindowError):
        heat_evolve_x(setup, v, v, 50.0, cap=False)
    res = heat_evolve_x(setup, v, v, 0.5)
    assert res.truncated > 0 and np.all(np.isfinite(res.u.values))


def test_resolvent_examples(rng):
    const = Field1D(np.full(16, 3.0), 5.0)
    assert resolvent_bound_probe(1.0, 2.0, const) == pytest.approx(0.5)
    f = Field1D(rng.standard_normal(64) + 1j * rng.standard_normal(64), 5.0)
    assert resolvent_bound_probe(1.0, 1 + 5j, f) <= 1.0
    with pytest.raises(ValueError):
        resolvent_bound_probe(1.0, -1.0, f)


@given(st.integers(0, 2 ** 32 - 1), st.floats(0.1, 10), st.floats(-10, 10), st.floats(0.1, 4))
def test_resolvent_bound(seed, re, im, mu):
    rng = np.random.default_rng(seed)
    f = Field1D(rng.standard_normal(32) + 1j * rng.standard_normal(32), 3.0)
    assert resolvent_bound_probe(mu, complex(re, im), f) * re <= 1 + 1e-10


@given(st.integers(0, 2 ** 32 - 1), st.floats(0.1, 4), st.floats(0.05, 0.95))
def test_fractional_powers_compose(seed, mu, alpha):
    rng = np.random.default_rng(seed)
    f = Field1D(rng.standard_normal(32) + 1j * rng.standard_normal(32), 3.0)
    two = fractional_power_apply(mu, 1 - alpha, fractional_power_apply(mu, alpha, f))
    full = derivative_apply(mu, f)
    scale = np.abs(f.to_fourier().values).max() * np.sqrt(mu) * np.abs(f.omega).max()
    assert np.abs(two.to_fourier().values - full.to_fourier().values).max() <= 1e-10 * scale


def test_fractional_examples():
    const = Field1D(np.full(8, 2.0), 1.0)
    np.testing.assert_allclose(fractional_power_apply(1.0, 0.5, const).values, 0, atol=1e-15)
    with pytest.raises(ValueError):
        fractional_power_apply(1.0, 1.0, const)


def test_cole_hopf_examples():
    setup = HeatSetup(4.0, 64, 2 * np.pi)
    x = setup.grid
    psi = cole_hopf(setup, setup.field(np.full(64, 3.0))).psi.values
    np.testing.assert_allclose(psi, 0, atol=1e-15)
    # u = exp(sin x): psi = -2 mu^{-1/2} cos x
    psi = cole_hopf(setup, setup.field(np.exp(np.sin(x)))).psi.values
    np.testing.assert_allclose(psi, -2 * 0.5 * np.cos(x), atol=1e-12)
    with pytest.raises(PositivityError):
        cole_hopf(setup, setup.field(np.cos(x)))


def test_burgers_second_order():
    mu = 1.0
    setup = HeatSetup(mu, 64, 2 * np.pi)
    x = setup.grid
    u0 = setup.field(2 + 0.1 * np.cos(x))
    res = []
    for dt in (0.1, 0.05, 0.025, 0.0125):
        trace = [cole_hopf(setup, heat_evolve_t(setup, u0, 0.5 + k * dt)) for k in (-1, 0, 1)]
        res.append(burgers_residual(mu, trace, dt))
    ratios = [a / b for a, b in zip(res, res[1:])]
    assert all(3.5 <= r <= 4.5 for r in ratios)
    const = [cole_hopf(setup, setup.field(np.full(64, 2.0)))] * 3
    assert burgers_residual(mu, const, 0.1) == 0.0


def test_miura_examples():
    x = 2 * np.pi * np.arange(64) / 64
    w = miura_compose(Field1D(np.exp(np.sin(x)))).values
    np.testing.assert_allclose(w, np.cos(x) ** 2 - np.sin(x), atol=1e-11)
    np.testing.assert_allclose(miura_compose(Field1D(np.full(8, 5.0))).values, 0, atol=1e-14)


def test_sideways_symbol_branch():
    lam = sideways_symbol(1.0, np.array([-2.0, 0.0, 3.0]))
    assert np.all(lam.real >= 0)
    np.testing.assert_allclose(lam ** 2, 1j * np.array([-2.0, 0.0, 3.0]), atol=1e-15)


def test_bump_trace_burgers_residual_shrinks():
    setup = HeatSetup(1.0, 128, 2 * np.pi)
    u0 = profile("gaussian-bump", 128, 2 * np.pi, offset=2.0)
    res = [burgers_residual(1.0, [cole_hopf(setup, heat_evolve_t(setup, u0, 0.1 + k * dt))
                                  for k in (-1, 0, 1)], dt) for dt in (0.02, 0.01)]
    assert res[1] < res[0] / 3.5
