import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

from logrep.cauchy import (CauchyProblem, SolutionTrace, holomorphy_probe, mild_decomposition,
                           rk4_oracle, solve_autonomous, solve_nonautonomous)
from logrep.evolution import EvolutionFamily, GeneratorSpec, ROTATION, shipped_families
from logrep.linalg import opnorm

SHIPPED = shipped_families(0)
ROT = SHIPPED["rotation"]


def constant(a, T=1.0):
    return EvolutionFamily(GeneratorSpec("constant", np.atleast_2d(a), T=T))


def rel(x, y):
    return np.linalg.norm(x - y) / np.linalg.norm(y)


def test_autonomous_examples():
    p = CauchyProblem(constant(np.zeros((2, 2))), [1.0, -2.0])
    tr = solve_autonomous(p, [0.0, 0.5, 1.0])
    np.testing.assert_allclose(tr.states, np.tile([1.0, -2.0], (3, 1)), atol=1e-13)
    p = CauchyProblem(constant([[1.0]]), [1.0])
    assert solve_autonomous(p, [1.0]).states[0, 0] == pytest.approx(2.718281828459045, rel=1e-12)
    p = CauchyProblem(constant(ROTATION, T=2.0), [1.0, 0.0])
    np.testing.assert_allclose(solve_autonomous(p, [np.pi / 2]).states[0], [0, -1], atol=1e-8)


@pytest.mark.parametrize("name", sorted(SHIPPED))
def test_autonomous_vs_rk4(name):
    fam = SHIPPED[name]
    u0 = np.arange(1, fam.dim + 1) / fam.dim
    p = CauchyProblem(fam, u0, -0.3)
    grid = np.linspace(-0.3, 0.9, 7)
    a, b = solve_autonomous(p, grid), rk4_oracle(p, grid)
    assert max(rel(x, y) for x, y in zip(a.states, b.states)) <= 1e-7


def test_nonautonomous_examples():
    grid = [0.0, 0.5, 1.0]
    zero = lambda t: np.zeros(2)
    p0 = CauchyProblem(ROT, [1.0, 0.0], 0.0, zero, (1.0, 1.0))
    p1 = CauchyProblem(ROT, [1.0, 0.0], 0.0)
    np.testing.assert_allclose(solve_nonautonomous(p0, grid).states,
                               solve_autonomous(p1, grid).states, atol=1e-12)
    p = CauchyProblem(constant(np.zeros((2, 2))), [0.0, 0.0], 0.0,
                      lambda t: np.array([1.0, 0.0]), (1.0, 1.0))
    np.testing.assert_allclose(solve_nonautonomous(p, grid).states[:, 0], grid, atol=1e-13)
    p = CauchyProblem(constant([[-1.0]], T=2.0), [0.0], 0.0, lambda t: np.array([np.exp(-t)]),
                      (8.0, 1.0))
    assert solve_nonautonomous(p, [1.0]).states[0, 0] == pytest.approx(0.36787944117144233,
                                                                        rel=1e-10)


def test_smooth_source_vs_rk4():
    src = lambda t: np.array([np.cos(t), 0.5 * np.sin(2 * t)])
    p = CauchyProblem(SHIPPED["cos-damped"], [1.0, -1.0], 0.0, src, (2.0, 1.0))
    grid = np.linspace(0, 1, 6)
    a, b = solve_nonautonomous(p, grid), rk4_oracle(p, grid)
    assert max(rel(x, y) for x, y in zip(a.states, b.states)) <= 1e-6


def test_holder_source_vs_fine_rk4():
    src = lambda t: np.sqrt(abs(t)) * np.array([1.0, 0.5])
    p = CauchyProblem(ROT, [1.0, 0.0], 0.0, src, (1.2, 0.5))
    coarse = np.linspace(0, 1, 6)
    d = solve_nonautonomous(p, coarse)
    r = rk4_oracle(p, np.linspace(0, 1, 1001))
    assert max(rel(d.at(t), r.at(t)) for t in coarse) <= 1e-4


def test_holder_bound_spot_check():
    with pytest.raises(ValueError):
        CauchyProblem(ROT, [1.0, 0.0], 0.0, lambda t: np.array([50 * t, 0.0]), (1.0, 1.0))
    with pytest.raises(ValueError):
        CauchyProblem(ROT, [1.0, 0.0], 0.0, lambda t: np.zeros(2))


def test_holder_exponent_warning():
    src = lambda t: np.sqrt(abs(t)) * np.array([1.0, 0.0])
    p = CauchyProblem(ROT, [1.0, 0.0], 0.0, src, (100.0, 1.0))
    with pytest.warns(RuntimeWarning, match="Holder exponent"):
        solve_nonautonomous(p, [0.0, 1.0])


def test_mild_decomposition_examples():
    fam = constant(np.zeros((1, 1)), T=2.0)
    p = CauchyProblem(fam, [1.0], 0.0, lambda t: np.array([1.0]), (1.0, 1.0))
    parts = mild_decomposition(p, 2.0, kappa=1.0)
    # kappa (u_s + int_0^2 f) = 3, and the reassembled solution is u(2) = 3
    assert parts.kappa_part[0] == pytest.approx(3.0)
    assert parts.assembled[0] == pytest.approx(3.0)
    zero = CauchyProblem(ROT, [0.3, 1.0], 0.0, lambda t: np.zeros(2), (1.0, 1.0))
    parts = mild_decomposition(zero, 0.7, kappa=1.0)
    np.testing.assert_allclose(parts.kappa_part, [0.3, 1.0])
    np.testing.assert_allclose(parts.series - parts.kappa_part, ROT(0.7, 0.0) @ [0.3, 1.0],
                               atol=1e-12)


def test_mild_reassembly_random(rng):
    a = rng.standard_normal((3, 3)) * 0.5
    fam = constant(a)
    src = lambda t: np.array([1 + t, t ** 2, -2 * t ** 3])
    p = CauchyProblem(fam, rng.standard_normal(3), 0.0, src, (10.0, 0.9))
    grid = np.linspace(0, 1, 5)
    mp = mild_decomposition(p, 1.0, grid=grid)
    assert rel(mp.assembled, solve_nonautonomous(p, grid).states[-1]) <= 1e-10


@given(st.integers(0, 2 ** 32 - 1), st.floats(-2, 2), st.floats(-2, 2))
def test_superposition(seed, al, be):
    rng = np.random.default_rng(seed)
    u1, u2 = rng.standard_normal(2), rng.standard_normal(2)
    c1, c2 = rng.standard_normal(2), rng.standard_normal(2)
    f1, f2 = (lambda t: c1 * np.cos(t)), (lambda t: c2 * t)
    grid = [0.0, 0.5, 1.0]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        sols = [solve_nonautonomous(CauchyProblem(ROT, u, 0.0, f, (10.0, 0.9)), grid, 8)
                for u, f in ((u1, f1), (u2, f2),
                             (al * u1 + be * u2, lambda t: al * f1(t) + be * f2(t)))]
    mix = al * sols[0].states + be * sols[1].states
    scale = max(1.0, np.abs(mix).max())
    assert np.abs(sols[2].states - mix).max() <= 1e-10 * scale


def test_holomorphy_probe():
    fam = constant(ROTATION)
    t = 0.5
    n1 = holomorphy_probe(fam, t, 0.0, orders=1, h=1e-3)[0]
    assert n1 == pytest.approx(t * opnorm(ROTATION @ fam(t, 0.0)), rel=0.05)
    zero = holomorphy_probe(constant(np.zeros((2, 2))), t, 0.0, orders=3)
    assert max(zero) < 1e-8
    vals = holomorphy_probe(ROT, 0.5, 0.0, orders=3)
    assert all(np.isfinite(vals))


def test_holomorphy_guards():
    with pytest.raises(ValueError):
        holomorphy_probe(ROT, 0.999, 0.0, orders=4)
    with pytest.warns(RuntimeWarning):
        holomorphy_probe(ROT, 0.5, 0.0, orders=1, h=1e-5)


def test_trace_validation():
    with pytest.raises(ValueError):
        SolutionTrace(np.array([]), np.zeros((0, 2)), "duhamel")
    with pytest.raises(ValueError):
        SolutionTrace([0.0, 0.0], np.zeros((2, 2)), "duhamel")
    tr = SolutionTrace([0.0, 1.0], np.ones((2, 2)), "duhamel")
    with pytest.raises(KeyError):
        tr.at(0.5)
