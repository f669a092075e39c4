import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import random_complex
from logrep.contour import (BranchError, Contour, ContourError, KappaChoice, build_contour,
                            dunford_apply, dunford_log, enclosing_contours, select_kappa)
from logrep.linalg import eig, eigfunc, expm, opnorm


def test_select_kappa_examples(rng):
    k = select_kappa(np.eye(3), 2.0)
    assert k.kappa == 2 and k.margin >= 1
    k = select_kappa(np.diag([3.0, -3.0]), 1.5)
    assert k.kappa == pytest.approx(4.5)
    assert sorted(eig(np.diag([3.0, -3.0]) + 4.5 * np.eye(2)).values.real) == [1.5, 7.5]
    u = random_complex(rng, 6)
    u *= 2.3 / opnorm(u)
    k = select_kappa(u, 1.5)
    assert k.kappa.real == pytest.approx(3.45)
    assert np.all(eig(u + k.kappa * np.eye(6)).values.real > 0)


def test_select_kappa_policy_floor():
    with pytest.raises(ValueError):
        select_kappa(np.eye(2), 1.2)


def test_build_contour_examples():
    c = build_contour(np.zeros((2, 2)), KappaChoice.explicit(1.5))
    assert c.center == 1.5 and c.radius <= 1.425 and c.encloses(1.5)
    c = build_contour(np.array([[2.0]]), KappaChoice.explicit(3.0))
    assert c.radius == pytest.approx(2.5) and c.encloses(5.0)
    u = expm([[0, 1], [-1, 0]])
    k = select_kappa(u, 2.0)
    c = build_contour(u, k)
    assert np.all(c.encloses(eig(u).values + k.kappa))
    assert c.avoids_cut


def test_build_contour_too_small_growth():
    with pytest.raises(ContourError):
        build_contour(np.diag([5.0]), KappaChoice.explicit(2.0))


def test_dunford_log_examples():
    # Log(I + 1 I) = ln 2 I; the zero operator gives Log(I) = 0
    rep = dunford_log(np.eye(3), 1.0)
    np.testing.assert_allclose(rep.a, 0.6931471805599453 * np.eye(3), atol=1e-14)
    np.testing.assert_allclose(dunford_log(np.zeros((3, 3)), 1.0).a, 0, atol=1e-14)
    rep = dunford_log(np.diag([2.0, 3.0]), 0.0)
    np.testing.assert_allclose(rep.a, np.diag(np.log([2.0, 3.0])), atol=1e-13)
    rep = dunford_log(np.array([[2.0, 1.0], [0.0, 2.0]]), 0.0)
    np.testing.assert_allclose(rep.a, [[np.log(2), 0.5], [0, np.log(2)]], atol=1e-13)


def test_dunford_log_zero_shift_rejects_cut():
    with pytest.raises(BranchError):
        dunford_log(np.diag([-1.0, 2.0]), 0.0)


def test_dunford_log_rejects_contour_across_cut():
    with pytest.raises(ContourError):
        dunford_log(np.eye(2), 0.0, Contour(0.5, 1.0))


def test_rotation_log_without_shift():
    th = 1.2
    u = expm(th * np.array([[0, 1], [-1, 0]]))
    rep = dunford_log(u, 0.0)
    np.testing.assert_allclose(rep.a, th * np.array([[0, 1], [-1, 0]]), atol=1e-12)


def test_enclosing_contours_avoid_cut(rng):
    vals = np.exp(1j * rng.uniform(-3.0, 3.0, 12)) * rng.uniform(0.2, 3, 12)
    cs = enclosing_contours(vals)
    assert all(c.avoids_cut for c in cs)
    inside = np.zeros(vals.size, dtype=bool)
    for c in cs:
        inside |= c.encloses(vals)
    assert inside.all()


def test_contour_independence(rng):
    u = random_complex(rng, 5)
    k = select_kappa(u, 2.0)
    a6 = dunford_log(u, k, build_contour(u, k, radius_factor=0.6)).a
    a9 = dunford_log(u, k, build_contour(u, k, radius_factor=0.9)).a
    assert opnorm(a6 - a9) <= 1e-9 * opnorm(a9)


def test_refinement_gain(rng):
    u = random_complex(rng, 4)
    k = select_kappa(u, 2.0)
    r64 = dunford_log(u, k, nodes=64).residual
    r128 = dunford_log(u, k, nodes=128).residual
    assert r64 >= 1e3 * r128


@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 10), st.sampled_from([1.5, 2.0, 3.0]))
def test_log_matches_eig_oracle(seed, n, policy):
    rng = np.random.default_rng(seed)
    u = random_complex(rng, n)
    rep = dunford_log(u, policy=policy)
    m = u + rep.kappa.kappa * np.eye(n)
    d = eig(m)
    assert rep.relative_residual <= 1e-8
    if d.condition < 1e6:
        assert opnorm(rep.a - eigfunc(m, np.log)) <= 1e-8 * opnorm(rep.a)


def test_dunford_apply_examples(rng):
    c = Contour(1.5, 1.5)
    np.testing.assert_allclose(dunford_apply(lambda z: z, np.diag([1.0, 2.0]), c),
                               np.diag([1.0, 2.0]), atol=1e-13)
    c = Contour(1.0, 0.5)
    np.testing.assert_allclose(dunford_apply(lambda z: z ** 2, [[1, 1], [0, 1]], c),
                               [[1, 2], [0, 1]], atol=1e-13)
    u = random_complex(rng, 4)
    c = Contour(0.0, 1.5 * opnorm(u))
    np.testing.assert_allclose(dunford_apply(np.exp, u, c), expm(u), atol=1e-11)


def test_dunford_apply_rejects_unenclosed():
    with pytest.raises(ContourError):
        dunford_apply(np.exp, np.diag([1.0, 5.0]), Contour(1.0, 1.0))
