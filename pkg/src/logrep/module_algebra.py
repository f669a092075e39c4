"""Sums and module actions on shifted operator logarithms.

For commuting operators ``Log(A) + Log(B) = Log(AB)`` holds exactly when
the principal arguments of paired eigenvalues do not wrap past ``pi``.  The
checks here certify that condition from a joint eigenbasis, then compare
both sides computed with one shared set of contours.
"""

from dataclasses import dataclass

import numpy as np

from ._validation import check_square
from .contour import BranchError, dunford_log, enclosing_contours
from .evolution import (MIN_POLICY, EvolutionFamily, GeneratorSpec,
                        KappaChoice, exp_series, _log_derivative)
from .linalg import expm, inv, opnorm, solve

COMMUTE_TOL = 1e-12
BRANCH_MARGIN = 0.1


class CommutationError(ValueError):
    """Operators that must commute do not."""


class KappaFloorError(ValueError):
    """A shift dropped below the family's admissible floor."""


def commutation_defect(mats):
    """Largest ``||XY - YX|| / (||X|| ||Y||)`` over pairs."""
    worst = 0.0
    for i, x in enumerate(mats):
        for y in mats[i + 1:]:
            scale = opnorm(x) * opnorm(y)
            if scale > 0:
                worst = max(worst, opnorm(x @ y - y @ x) / scale)
    return worst


def _require_commuting(mats, what):
    defect = commutation_defect(mats)
    if defect > COMMUTE_TOL:
        raise CommutationError(f"{what}: commutation defect {defect:.2e} exceeds {COMMUTE_TOL:g}")
    return defect


@dataclass(frozen=True)
class CommutingSet:
    """Matrices built from one seed ``S`` as ``p(S)`` and ``expm(q(S))``."""

    members: tuple
    defect: float
    seed: np.ndarray

    @classmethod
    def from_seed(cls, seed, polys=(), exps=()):
        """``polys`` and ``exps`` are coefficient lists ``[c0, c1, ...]`` in ``S``."""
        seed = check_square(seed, "seed")
        members = [poly_eval(c, seed) for c in polys]
        members += [expm(poly_eval(c, seed)) for c in exps]
        members = tuple(members)
        return cls(members, _require_commuting(members, "CommutingSet"), seed)


def poly_eval(coef, s):
    """``sum_k coef[k] S^k`` by Horner's rule."""
    n = s.shape[0]
    out = np.zeros((n, n), dtype=complex)
    for c in reversed(list(coef)):
        out = out @ s + c * np.eye(n)
    return out


def joint_eigenvalues(mats, rng=None):
    """Eigenvalues of commuting diagonalizable matrices, paired by a common basis.

    The basis diagonalizes a random combination, which separates the joint
    eigenspaces with probability one.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    weights = rng.standard_normal(len(mats)) + 1j * rng.standard_normal(len(mats))
    combo = sum(w * m for w, m in zip(weights, mats))
    _, vecs = np.linalg.eig(combo)
    vinv = inv(vecs)
    return np.array([np.diag(vinv @ m @ vecs) for m in mats])


def branch_certificate(mats, margin=BRANCH_MARGIN):
    """``(safe, worst)``: paired principal arguments sum inside ``(-pi + margin, pi - margin)``."""
    vals = joint_eigenvalues(mats)
    if np.any(np.abs(vals) == 0):
        return False, np.inf
    total = np.angle(vals).sum(axis=0)
    worst = float(np.max(np.abs(total)))
    return worst < np.pi - margin, worst


@dataclass(frozen=True)
class ShiftedLogElement:
    """``Log(u + k)`` with ``u + k`` certified clear of ``(-inf, 0]``."""

    u: np.ndarray
    k: np.ndarray
    logval: np.ndarray

    @property
    def shifted(self):
        return self.u + self.k


def _union_contours(mats, nodes):
    values = np.concatenate([np.linalg.eigvals(m) for m in mats])
    return enclosing_contours(values, nodes)


def _log(m, contours):
    return dunford_log(m, 0.0, contours).a


def shifted_log(u, k=None, contours=None, nodes=256):
    """Build a :class:`ShiftedLogElement`; ``k`` defaults to zero."""
    u = check_square(u, "u")
    k = np.zeros_like(u) if k is None else check_square(k, "k")
    m = u + k
    if contours is None:
        contours = _union_contours([m], nodes)
    return ShiftedLogElement(u, k, _log(m, contours))


def shifted_logs(pairs, nodes=256):
    """Elements for several ``(u, k)`` pairs sharing one set of contours."""
    mats = [check_square(u, "u") + (0 if k is None else check_square(k, "k")) for u, k in pairs]
    contours = _union_contours(mats, nodes)
    return [shifted_log(u, k, contours) for u, k in pairs]


@dataclass(frozen=True)
class SumCheck:
    residual: float
    branch_safe: bool
    branch_worst: float


def _relative(diff, *terms):
    scale = max(opnorm(t) for t in terms)
    return opnorm(diff) / scale if scale > 0 else opnorm(diff)


def sum_same_family(fam, t, r, s, nodes=256, allow_unsafe=False):
    """``||Log U(t,r) + Log U(r,s) - Log U(t,s)||`` relative, on shared contours."""
    u_tr, u_rs, u_ts = fam(t, r), fam(r, s), fam(t, s)
    safe, worst = branch_certificate([u_tr, u_rs])
    if not safe and not allow_unsafe:
        raise BranchError(f"same-family sum is not branch-safe (argument sum {worst:.3f})")
    contours = _union_contours([u_tr, u_rs, u_ts], nodes)
    l_tr, l_rs, l_ts = (_log(m, contours) for m in (u_tr, u_rs, u_ts))
    return SumCheck(_relative(l_tr + l_rs - l_ts, l_tr, l_rs, l_ts), safe, worst)


def sum_commuting_families(e1, e2, nodes=256, allow_unsafe=False):
    """``||Log(u1 + k1) + Log(u2 + k2) - Log((u1 + k1)(u2 + k2))||`` relative."""
    _require_commuting([e1.u, e2.u, e1.k, e2.k], "sum_commuting_families")
    m1, m2 = e1.shifted, e2.shifted
    safe, worst = branch_certificate([m1, m2])
    if not safe and not allow_unsafe:
        raise BranchError(f"commuting sum is not branch-safe (argument sum {worst:.3f})")
    prod = m1 @ m2
    l_prod = _log(prod, _union_contours([m1, m2, prod], nodes))
    return SumCheck(_relative(e1.logval + e2.logval - l_prod, e1.logval, e2.logval, l_prod),
                    safe, worst)


def module_action(l, e, tol=1e-10):
    """``l Log(u + k)``, checked to stay exponentiable by its power series."""
    l = check_square(l, "l")
    _require_commuting([l, e.logval], "module_action")
    x = l @ e.logval
    series, _ = exp_series(x)
    ref = expm(x)
    defect = opnorm(series - ref) / max(opnorm(ref), 1e-300)
    if defect > tol:
        raise ArithmeticError(f"series and scaling-squaring exponentials differ by {defect:.2e}")
    return x


def product_perturbation_rep(fam, l, t, s, h=1e-3):
    """Relative gap between ``l A(t)`` and ``(I - kappa e^{-a})^{-1} d_t[l a(t, s)]``."""
    l = check_square(l, "l")
    a_t = fam.spec.generator(t)
    _require_commuting([l, a_t], "product_perturbation_rep")
    kappa = fam.kappa_choice()
    rep = fam.log(t, s, kappa)
    da = l @ _log_derivative(fam, t, s, h, kappa, richardson=True)
    prefactor = np.eye(fam.dim) - kappa.kappa * inv(expm(rep.a))
    rhs = solve(prefactor, da)
    lhs = l @ a_t
    scale = opnorm(lhs)
    return opnorm(lhs - rhs) / scale if scale > 0 else opnorm(rhs)


def strong_continuity_probe(lfun, fam, t, s, kfun=None, quad_nodes=16, h=1e-4):
    """Bound violation of ``int_s^t L(eta) d_eta[Log(U(eta, s) + K(eta))] d eta``.

    The bound is ``1.1 sup||L|| ||Log(U(t,s) + K(t)) - Log(I + K(s))||``
    with ``K(eta) = kfun(eta) I``.  Returns ``(violation, integral_norm)``;
    the violation is zero when the bound holds.
    """
    floor = MIN_POLICY * fam.growth_bound
    kfun = (lambda eta: fam.kappa) if kfun is None else kfun
    probe = np.linspace(min(s, t), max(s, t), 101)
    low = min(float(np.real(kfun(eta))) for eta in probe)
    if low < floor:
        raise KappaFloorError(f"shift drops to {low:.3g}, below the floor {floor:.3g}")

    def log_at(eta):
        return fam.log(eta, s, KappaChoice.explicit(kfun(eta))).a

    def dlog(eta):
        d1 = (log_at(eta + h) - log_at(eta - h)) / (2 * h)
        d2 = (log_at(eta + h / 2) - log_at(eta - h / 2)) / h
        return (4 * d2 - d1) / 3

    nodes, weights = np.polynomial.legendre.leggauss(quad_nodes)
    half, mid = 0.5 * (t - s), 0.5 * (t + s)
    total = np.zeros((fam.dim, fam.dim), dtype=complex)
    sup = 0.0
    for x, w in zip(nodes, weights):
        eta = mid + half * x
        lv = check_square(lfun(eta), "L(eta)")
        sup = max(sup, opnorm(lv))
        total = total + w * half * (lv @ dlog(eta))
    for eta in probe:
        sup = max(sup, opnorm(check_square(lfun(eta), "L(eta)")))
    span = log_at(t) - fam.log(s, s, KappaChoice.explicit(kfun(s))).a
    bound = 1.1 * sup * opnorm(span)
    norm = opnorm(total)
    return max(0.0, norm - bound), norm


def random_seed_matrix(rng, dim):
    seed = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return seed / opnorm(seed)


def random_hermitian_seed(rng, dim):
    """Hermitian seed scaled to spectral radius one."""
    x = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    h = 0.5 * (x + x.conj().T)
    return h / opnorm(h)


@dataclass(frozen=True)
class SumInstance:
    identity: str
    residual: float
    branch_safe: bool
    branch_worst: float


def random_sum_instance(rng, identity, dim, attempts=50):
    """One branch-safe instance of ``same-family``, ``commuting`` or ``k-shifted``.

    Draws that fail the branch certificate are discarded and redrawn.
    """
    for _ in range(attempts):
        try:
            return _draw_sum_instance(rng, identity, dim)
        except BranchError:
            continue
    raise BranchError(f"no branch-safe {identity} instance in {attempts} draws")


def _draw_sum_instance(rng, identity, dim):
    if identity == "same-family":
        gen = 0.8 * random_seed_matrix(rng, dim)
        fam = EvolutionFamily(GeneratorSpec("constant", gen))
        t, r, s = rng.uniform(-1, 1, 3)
        chk = sum_same_family(fam, t, r, s)
    elif identity in ("commuting", "k-shifted"):
        seed = random_seed_matrix(rng, dim)
        c1, c2 = (0.5 * (rng.standard_normal(3) + 1j * rng.standard_normal(3)) for _ in range(2))
        u1, u2 = expm(poly_eval(c1, seed)), expm(poly_eval(c2, seed))
        if identity == "k-shifted":
            kappa = 2.0 * max(opnorm(u1), opnorm(u2))
            k = kappa * np.eye(dim)
        else:
            k = np.zeros((dim, dim))
        e1, e2 = shifted_logs([(u1, k), (u2, k)])
        chk = sum_commuting_families(e1, e2)
    else:
        raise ValueError(f"unknown identity {identity!r}")
    return SumInstance(identity, chk.residual, chk.branch_safe, chk.branch_worst)


def random_unsafe_instance(rng, dim):
    """Commuting unitaries whose paired arguments sum past ``pi``; the identity must fail."""
    herm = random_hermitian_seed(rng, dim)
    th1, th2 = rng.uniform(1.9, 2.6, 2)
    u1, u2 = expm(1j * th1 * herm), expm(1j * th2 * herm)
    e1, e2 = shifted_logs([(u1, None), (u2, None)])
    chk = sum_commuting_families(e1, e2, allow_unsafe=True)
    return SumInstance("unsafe-commuting", chk.residual, chk.branch_safe, chk.branch_worst)
