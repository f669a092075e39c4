"""Spin-l angular momentum matrices and the logarithm of rotations.

On the ``2l + 1`` dimensional invariant subspace the components ``L_k``
are exact Hermitian matrices built from the ladder operators, and a
rotation about axis ``k`` is ``V(t, s) = expm(i (t - s) L_k / hbar)``.
"""

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .contour import KappaChoice, dunford_log, select_kappa
from .evolution import exp_series
from .linalg import commutator, expm, opnorm

AXES = ("x", "y", "z")
MAX_ELL = 20


@dataclass(frozen=True)
class SpinRep:
    ell: float
    hbar: float
    Lx: np.ndarray
    Ly: np.ndarray
    Lz: np.ndarray

    @property
    def dim(self):
        return self.Lz.shape[0]

    def component(self, axis):
        if axis not in AXES:
            raise ValueError(f"axis must be one of {AXES}, got {axis!r}")
        return {"x": self.Lx, "y": self.Ly, "z": self.Lz}[axis]

    def commutator_residuals(self):
        """``||[L_a, L_b] - i hbar L_c|| / (||L_a|| ||L_b||)`` for the cyclic triples."""
        out = {}
        for a, b, c in (("x", "y", "z"), ("y", "z", "x"), ("z", "x", "y")):
            la, lb, lc = self.component(a), self.component(b), self.component(c)
            scale = opnorm(la) * opnorm(lb)
            defect = opnorm(commutator(la, lb) - 1j * self.hbar * lc)
            out[a + b] = defect / scale if scale > 0 else defect
        return out

    def casimir_residual(self):
        total = self.Lx @ self.Lx + self.Ly @ self.Ly + self.Lz @ self.Lz
        target = self.hbar ** 2 * self.ell * (self.ell + 1) * np.eye(self.dim)
        return opnorm(total - target)

    def hermitian_residual(self):
        return max(opnorm(m - m.conj().T) for m in (self.Lx, self.Ly, self.Lz))


def build_spin_rep(ell, hbar=1.0):
    """Ladder realization: ``Lz = hbar diag(l, ..., -l)``, ``Lx``, ``Ly`` from ``L+`` and ``L-``."""
    two = Fraction(ell).limit_denominator(2) * 2
    if two.denominator != 1 or abs(float(two) - 2 * float(ell)) > 1e-12:
        raise ValueError(f"2 * ell must be an integer, got ell={ell}")
    if not 0 <= ell <= MAX_ELL:
        raise ValueError(f"ell must lie in [0, {MAX_ELL}], got {ell}")
    if not hbar > 0:
        raise ValueError("hbar must be positive")
    ell = float(ell)
    m = ell - np.arange(int(two) + 1)
    lz = hbar * np.diag(m).astype(complex)
    # L+ |m> = hbar sqrt(l(l+1) - m(m+1)) |m+1>; row i-1 holds m + 1 = l - (i-1)
    coef = hbar * np.sqrt(ell * (ell + 1) - m[1:] * (m[1:] + 1))
    lp = np.diag(coef, 1).astype(complex)
    lm = lp.conj().T
    return SpinRep(ell, float(hbar), (lp + lm) / 2, (lp - lm) / 2j, lz)


@dataclass(frozen=True)
class RotationOp:
    rep: SpinRep
    axis: str
    t: float
    s: float

    @property
    def generator(self):
        """``i L_k / hbar``."""
        return 1j * self.rep.component(self.axis) / self.rep.hbar

    @property
    def v(self):
        return rotation_matrix(self.rep, self.axis, self.t - self.s)

    def unitarity_residual(self):
        v = self.v
        return opnorm(v.conj().T @ v - np.eye(self.rep.dim))


def rotation_matrix(rep, axis, angle):
    return expm(1j * angle * rep.component(axis) / rep.hbar)


def _kappa(v, kappa_policy=None, kappa=None):
    if kappa is not None:
        return kappa if isinstance(kappa, KappaChoice) else KappaChoice.explicit(kappa, opnorm(v))
    return select_kappa(v, kappa_policy)


def rotation_log_rep(rot, kappa_policy=2.0, h=1e-3, richardson=True):
    """``Log(V + kappa I)`` and the generator rebuilt as ``(I + kappa V(s, t)) d_t Log(V(t, s) + kappa I)``.

    ``V(s, t) = V(t, s)^H``.  The derivative is a central difference in
    ``t`` with one Richardson level unless ``richardson`` is false.
    """
    if abs(rot.t - rot.s) > np.pi:
        raise ValueError("|t - s| must not exceed pi")
    v = rot.v
    kappa = select_kappa(v, kappa_policy)
    rep = dunford_log(v, kappa)

    def log_at(dt):
        return dunford_log(rotation_matrix(rot.rep, rot.axis, rot.t + dt - rot.s), kappa).a

    def central(step):
        return (log_at(step) - log_at(-step)) / (2 * step)

    da = central(h)
    if richardson:
        da = (4 * central(h / 2) - da) / 3
    prefactor = np.eye(rot.rep.dim) + kappa.kappa * v.conj().T
    return rep, prefactor @ da


def collective_renormalization(rot, kappa=None, kappa_policy=2.0):
    """``V = sum_n Log(V + kappa I)^n / n! - kappa I``; returns the sum and the term count."""
    v = rot.v
    choice = _kappa(v, kappa_policy, kappa)
    rep = dunford_log(v, choice)
    series, terms = exp_series(rep.a)
    return series - choice.kappa * np.eye(rot.rep.dim), terms


def sum_decomposition_check(rep, i, j, t, s, kappa, h=1e-3):
    """Residual of the three-term regrouping of a difference of two log-derivative terms.

    Stand-ins: ``D_k = i L_k / hbar`` for the derivative along ``r_k`` and
    ``R_k = I + 0.1 L_k^2 / hbar^2`` for multiplication by ``r_k``.  With
    ``E1 = e^{(s-t) D_j}``, ``E2 = e^{-(s-t) D_i}``,
    ``F1 = Log(e^{(t-s) D_j} + kappa)`` and ``F2 = Log(e^{-(t-s) D_i} + kappa)``
    the left side is ``(I + kE1) d[R_i F1] - (I + kE2) d[R_j F2]`` and the
    right side is ``(I + kE1) d[R_i (F1 - F2)] + (I + kE1) d[(R_i - R_j) F2]
    + (kE1 - kE2) d[R_j F2]``.  Returns the relative residual.
    """
    if i == j:
        raise ValueError("the two axes must differ")
    hb = rep.hbar
    d_i, d_j = 1j * rep.component(i) / hb, 1j * rep.component(j) / hb
    n = rep.dim
    eye = np.eye(n)
    r_i = eye + 0.1 * rep.component(i) @ rep.component(i) / hb ** 2
    r_j = eye + 0.1 * rep.component(j) @ rep.component(j) / hb ** 2
    kc = KappaChoice.explicit(kappa, 1.0)

    def logs(tt):
        f1 = dunford_log(expm((tt - s) * d_j), kc).a
        f2 = dunford_log(expm(-(tt - s) * d_i), kc).a
        return f1, f2

    def deriv(build):
        up, down = build(*logs(t + h)), build(*logs(t - h))
        return (up - down) / (2 * h)

    e1, e2 = expm((s - t) * d_j), expm(-(s - t) * d_i)
    p, q = eye + kappa * e1, eye + kappa * e2
    lhs = p @ deriv(lambda f1, f2: r_i @ f1) - q @ deriv(lambda f1, f2: r_j @ f2)
    rhs = (p @ deriv(lambda f1, f2: r_i @ (f1 - f2))
           + p @ deriv(lambda f1, f2: (r_i - r_j) @ f2)
           + (kappa * e1 - kappa * e2) @ deriv(lambda f1, f2: r_j @ f2))
    scale = opnorm(lhs)
    return opnorm(lhs - rhs) / scale if scale > 0 else opnorm(rhs)


def bch_defect(rep, a, b):
    """``(||e^{iaLx} e^{ibLy} - e^{i(aLx + bLy)}||, ||(ab/2)[iLx, iLy]||)`` with ``hbar`` scaling."""
    hb = rep.hbar
    x, y = 1j * rep.Lx / hb, 1j * rep.Ly / hb
    defect = opnorm(expm(a * x) @ expm(b * y) - expm(a * x + b * y))
    return defect, opnorm(0.5 * a * b * commutator(x, y))
