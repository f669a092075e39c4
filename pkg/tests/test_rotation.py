import numpy as np
import pytest

from logrep.linalg import expm, opnorm
from logrep.rotation import (AXES, RotationOp, bch_defect, build_spin_rep,
                             collective_renormalization, rotation_log_rep,
                             sum_decomposition_check)

PAULI = {"x": np.array([[0, 1], [1, 0]]), "y": np.array([[0, -1j], [1j, 0]]),
         "z": np.diag([1, -1])}


def test_spin_half_is_pauli():
    for hbar in (1.0, 0.5):
        rep = build_spin_rep(0.5, hbar)
        for ax in AXES:
            np.testing.assert_allclose(rep.component(ax), hbar / 2 * PAULI[ax], atol=1e-15)
        lx, ly, lz = rep.Lx, rep.Ly, rep.Lz
        np.testing.assert_array_equal(lx @ ly - ly @ lx, 1j * hbar * lz)


def test_small_reps():
    rep = build_spin_rep(0)
    assert rep.dim == 1 and all(opnorm(rep.component(a)) == 0 for a in AXES)
    rep = build_spin_rep(1, 2.0)
    total = rep.Lx @ rep.Lx + rep.Ly @ rep.Ly + rep.Lz @ rep.Lz
    np.testing.assert_allclose(total, 2 * 4.0 * np.eye(3), atol=1e-13)


@pytest.mark.parametrize("ell", np.arange(0, 41) / 2)
def test_algebra_all_ell(ell):
    rep = build_spin_rep(ell)
    assert max(rep.commutator_residuals().values()) <= 1e-12
    assert rep.casimir_residual() <= 1e-12 * max(1.0, ell * (ell + 1))
    assert rep.hermitian_residual() == 0


def test_spin_guards():
    for bad in (0.3, -1, 20.5):
        with pytest.raises(ValueError):
            build_spin_rep(bad)
    with pytest.raises(ValueError):
        build_spin_rep(1, 0.0)


def test_generator_reconstruction_examples():
    rot = RotationOp(build_spin_rep(0.5), "z", 0.3, 0.0)
    _, gen = rotation_log_rep(rot)
    np.testing.assert_allclose(gen, np.diag([0.5j, -0.5j]), atol=1e-6)
    rot = RotationOp(build_spin_rep(1), "x", 1.0, 0.0)
    _, gen = rotation_log_rep(rot)
    assert opnorm(gen - rot.generator) / opnorm(rot.generator) <= 1e-5


def test_generator_reconstruction_second_order():
    rot = RotationOp(build_spin_rep(1), "y", 0.8, 0.0)
    errs = [opnorm(rotation_log_rep(rot, h=h, richardson=False)[1] - rot.generator)
            for h in (1e-2, 5e-3, 2.5e-3)]
    for a, b in zip(errs, errs[1:]):
        assert 3.5 <= a / b <= 4.5


def test_collective_examples():
    rot = RotationOp(build_spin_rep(1), "z", 0.4, 0.4)
    v, _ = collective_renormalization(rot)
    np.testing.assert_allclose(v, np.eye(3), atol=1e-12)
    rep = build_spin_rep(0.5)
    rot = RotationOp(rep, "y", np.pi / 2, 0.0)
    v, terms = collective_renormalization(rot, kappa=2.0)
    assert opnorm(v - expm(1j * np.pi / 2 * rep.Ly)) <= 1e-10 and terms > 1
    small = RotationOp(build_spin_rep(2), "x", 0.2, 0.0)
    v, _ = collective_renormalization(small, kappa=0.0)
    assert opnorm(v - small.v) <= 1e-10


@pytest.mark.parametrize("ell", [0.5, 1, 1.5, 3])
@pytest.mark.parametrize("axis", AXES)
def test_collective_and_unitarity(ell, axis):
    for angle in (0.3, 1.7, 3.0):
        rot = RotationOp(build_spin_rep(ell), axis, angle, 0.0)
        assert rot.unitarity_residual() <= 1e-12
        v, _ = collective_renormalization(rot)
        assert opnorm(v - rot.v) <= 1e-10


def test_regrouping():
    rep = build_spin_rep(1)
    assert sum_decomposition_check(rep, "x", "y", 0.2, 0.0, 2.0) <= 1e-10
    assert sum_decomposition_check(rep, "z", "x", 0.7, 0.5, 3.0) <= 1e-10
    # kappa = 0: the shift terms vanish and both sides are the plain difference
    assert sum_decomposition_check(rep, "y", "z", 0.2, 0.0, 0.0) <= 1e-10
    with pytest.raises(ValueError):
        sum_decomposition_check(rep, "x", "x", 0.2, 0.0, 2.0)


def test_bch_defect():
    rep = build_spin_rep(1)
    for a, b in ((0.1, 0.1), (0.05, 0.08)):
        defect, predicted = bch_defect(rep, a, b)
        assert defect == pytest.approx(predicted, rel=0.2)
