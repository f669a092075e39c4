"""Two-parameter evolution families and their shifted logarithms.

A family ``U(t, s)`` is generated by ``A(t)`` with ``A(t)`` commuting with
``U(t, s)``: a constant matrix, a scalar profile times a fixed matrix, or a
piecewise-constant table of mutually commuting matrices.  For a shift
``kappa`` shared by the whole family, ``a(t, s) = Log(U(t, s) + kappa I)``
and the regularized operator ``e^{a(t, s)} = U(t, s) + kappa I``.
"""

import json
import math
import threading
import warnings
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np
from scipy.integrate import quad

from ._validation import check_operator_stack, check_positive, check_square
from .contour import (DEFAULT_NODES, DEFAULT_POLICY, MIN_POLICY, KappaChoice,
                      LogRep, dunford_log)
from .linalg import expm, inv, opnorm, solve

SERIES_TOL = 1e-14
PROFILES = {
    "one": lambda t: 1.0,
    "t": lambda t: t,
    "cos": math.cos,
    "exp-decay": lambda t: math.exp(-t),
}
KINDS = ("constant", "separable", "tabulated")
GROWTH_GRID = 9
COMMUTE_TOL = 1e-12


class IntervalError(ValueError):
    """A time argument falls outside ``[-T, T]``."""


@dataclass(frozen=True)
class GeneratorSpec:
    """Generator ``A(t)`` on ``[-T, T]``.

    ``constant``: ``A(t) = base``.  ``separable``: ``A(t) = g(t) base`` with
    ``g`` a named profile or a callable.  ``tabulated``: ``base`` is a stack
    of commuting matrices, one per equal cell of ``[-T, T]``.
    """

    kind: str
    base: np.ndarray
    profile: Union[str, Callable[[float], float]] = "one"
    T: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        check_positive(self.T, "T")
        if self.kind == "tabulated":
            base = check_operator_stack(self.base, "base")
            defect = max((opnorm(x @ y - y @ x) / max(opnorm(x) * opnorm(y), 1e-300)
                          for i, x in enumerate(base) for y in base[i + 1:]),
                         default=0.0)
            if defect > COMMUTE_TOL:
                raise ValueError(f"tabulated steps do not commute (defect {defect:.2e})")
        else:
            base = check_square(self.base, "base")
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "T", float(self.T))
        if self.kind == "separable":
            g = self.g
            ts = np.linspace(-self.T, self.T, 1000)
            vals = np.array([g(t) for t in ts], dtype=float)
            if not np.all(np.isfinite(vals)):
                raise ValueError("profile is not finite on the interval")
            if np.max(np.abs(np.diff(vals))) > 0.05 * (1.0 + np.max(np.abs(vals))):
                raise ValueError("profile looks discontinuous on the sampled grid")

    @property
    def dim(self):
        return self.base.shape[-1]

    @property
    def g(self):
        if callable(self.profile):
            return self.profile
        try:
            return PROFILES[self.profile]
        except KeyError:
            raise ValueError(f"unknown profile {self.profile!r}; "
                             f"choose from {sorted(PROFILES)}") from None

    def generator(self, t):
        """``A(t)``."""
        self._check_time(t)
        if self.kind == "constant":
            return self.base
        if self.kind == "separable":
            return self.g(t) * self.base
        return self.base[self._cell(t)]

    def _check_time(self, *times):
        for x in times:
            if not -self.T - 1e-12 <= x <= self.T + 1e-12:
                raise IntervalError(f"time {x} outside [-{self.T}, {self.T}]")

    def _cell(self, t):
        k = len(self.base)
        return min(int((t + self.T) / (2 * self.T) * k), k - 1)


def evolve(spec, t, s):
    """``U(t, s)`` for a generator spec."""
    spec._check_time(t, s)
    if spec.kind == "constant":
        return expm((t - s) * spec.base)
    if spec.kind == "separable":
        integral, _ = quad(spec.g, s, t, epsabs=1e-13, epsrel=1e-13, limit=200)
        return expm(integral * spec.base)
    # tabulated: ordered product over the cells between s and t
    k = len(spec.base)
    edges = np.linspace(-spec.T, spec.T, k + 1)
    lo, hi = min(s, t), max(s, t)
    sign = 1.0 if t >= s else -1.0
    u = np.eye(spec.dim, dtype=complex)
    for j in range(k):
        length = min(hi, edges[j + 1]) - max(lo, edges[j])
        if length > 0:
            u = expm(sign * length * spec.base[j]) @ u
    return u


class EvolutionFamily:
    """``U(t, s)`` with one shift ``kappa`` shared by every pair.

    The growth bound is the largest ``||U(t, s)||`` on a sampled grid of
    pairs (at least one); it is computed once, on first use, under a lock.
    """

    def __init__(self, spec, invertible=True, policy=DEFAULT_POLICY,
                 nodes=DEFAULT_NODES, name=None):
        if not isinstance(spec, GeneratorSpec):
            raise TypeError("spec must be a GeneratorSpec")
        if not policy >= MIN_POLICY:
            raise ValueError(f"kappa policy must be >= {MIN_POLICY}, got {policy}")
        self.spec = spec
        self.invertible = bool(invertible)
        self.policy = float(policy)
        self.nodes = int(nodes)
        self.name = name or spec.kind
        self._growth = None
        self._lock = threading.Lock()

    def __repr__(self):
        return (f"EvolutionFamily(name={self.name!r}, dim={self.dim}, "
                f"T={self.T}, invertible={self.invertible})")

    @property
    def dim(self):
        return self.spec.dim

    @property
    def T(self):
        return self.spec.T

    def __call__(self, t, s):
        if not self.invertible and t < s:
            raise IntervalError(f"family is forward-only; got t={t} < s={s}")
        return evolve(self.spec, t, s)

    @property
    def growth_bound(self):
        if self._growth is None:
            with self._lock:
                if self._growth is None:
                    grid = np.linspace(-self.T, self.T, GROWTH_GRID)
                    norms = [opnorm(self(t, s)) for t in grid for s in grid
                             if self.invertible or t >= s]
                    self._growth = max(1.0, max(norms))
        return self._growth

    def kappa_choice(self, policy=None):
        policy = self.policy if policy is None else policy
        if not policy >= MIN_POLICY:
            raise ValueError(f"kappa policy must be >= {MIN_POLICY}, got {policy}")
        g = self.growth_bound
        return KappaChoice(complex(policy * g), (policy - 1.0) * g, g)

    @property
    def kappa(self):
        return self.kappa_choice().kappa.real

    def log(self, t, s, kappa=None):
        """``Log(U(t, s) + kappa I)``; ``kappa=0`` is the unshifted override."""
        u = self(t, s)
        if kappa is None:
            kappa = self.kappa_choice()
        elif not isinstance(kappa, KappaChoice):
            kappa = KappaChoice.explicit(kappa, opnorm(u))
        return dunford_log(u, kappa, nodes=self.nodes)


def alternative_generator(fam, t, s, policy=None, kappa=None):
    """``a(t, s) = Log(U(t, s) + kappa I)`` with the family's shared shift.

    ``policy`` rescales the shared growth bound; ``kappa`` overrides the
    shift outright (``0`` for the unshifted logarithm).
    """
    if kappa is None:
        kappa = fam.kappa_choice(policy)
    return fam.log(t, s, kappa)


def exp_series(a, tol=SERIES_TOL):
    """``sum a^n / n!`` truncated once the tail bound drops below ``tol e^{||a||}``.

    Returns the sum and the number of terms used.
    """
    a = check_square(a, "a")
    norm = opnorm(a)
    target = tol * math.exp(norm)
    term = np.eye(a.shape[0], dtype=complex)
    total = term.copy()
    n = 0
    bound = 1.0  # ||a||^n / n!
    while True:
        n += 1
        term = term @ a / n
        total = total + term
        bound *= norm / n
        # geometric majorant of the remaining terms once n + 2 > ||a||
        ratio = norm / (n + 2)
        if ratio < 1 and bound * norm / (n + 1) / (1 - ratio) < target:
            return total, n + 1
        if n > 10000:
            raise RuntimeError("exponential series failed to converge")


@dataclass(frozen=True)
class RegularizedEvolution:
    logrep: LogRep
    eAts: np.ndarray
    series_terms: int

    @property
    def kappa(self):
        return self.logrep.kappa.kappa


def regularized_evolution(fam, t, s, kappa=None):
    """``e^{a(t, s)}`` by its power series."""
    rep = alternative_generator(fam, t, s, kappa=kappa)
    value, terms = exp_series(rep.a)
    return RegularizedEvolution(rep, value, terms)


def _log_derivative(fam, t, s, h, kappa, richardson):
    def central(step):
        fam.spec._check_time(t - step, t + step)
        up = fam.log(t + step, s, kappa)
        down = fam.log(t - step, s, kappa)
        diff = up.a - down.a
        floor = 1e2 * max(up.residual, down.residual)
        if opnorm(diff) < floor:
            warnings.warn(f"finite-difference step {step:g} is below the "
                          f"quadrature floor", RuntimeWarning, stacklevel=3)
        return diff / (2.0 * step)

    coarse = central(h)
    if not richardson:
        return coarse
    return (4.0 * central(h / 2.0) - coarse) / 3.0


def recover_generator(fam, t, s, h=1e-3, richardson=True, kappa=None):
    """Reconstruct ``A(t)`` from ``(I - kappa e^{-a})^{-1} d/dt a(t, s)``.

    ``d/dt a`` is a central difference with step ``h`` (one Richardson level
    by default).  This prefactor form needs no inverse evolution operator.
    """
    if not 1e-6 <= h <= 1e-2:
        raise ValueError(f"step h must lie in [1e-6, 1e-2], got {h}")
    if kappa is None:
        kappa = fam.kappa_choice()
    elif not isinstance(kappa, KappaChoice):
        kappa = KappaChoice.explicit(kappa)
    rep = fam.log(t, s, kappa)
    da = _log_derivative(fam, t, s, h, kappa, richardson)
    n = fam.dim
    prefactor = np.eye(n) - kappa.kappa * inv(expm(rep.a))
    return solve(prefactor, da)


@dataclass(frozen=True)
class SemigroupResiduals:
    """Defects of the shifted composition, identity and commutation laws."""

    composition: float
    identity: float
    commutation: Optional[float]
    scale: float
    product_scale: Optional[float] = None

    @property
    def relative(self):
        comm = None
        if self.commutation is not None:
            comm = self.commutation / self.product_scale
        return (self.composition / self.scale, self.identity / self.scale, comm)


def _regularized(fam, t, s, kappa):
    return exp_series(fam.log(t, s, kappa).a)[0]


def _kappa_arg(fam, kappa):
    if kappa is None:
        return fam.kappa_choice()
    if isinstance(kappa, KappaChoice):
        return kappa
    return KappaChoice.explicit(kappa)


def check_modified_semigroup(fam, t, r, s, kappa=None):
    """Residuals of the composition law with shift terms, of ``e^{a(s,s)} = (1 + kappa) I``
    and of the commutation of ``e^{a(s,t)}`` with ``e^{a(t,s)}``.

    With ``kappa = 0`` the first residual is the plain semigroup defect.
    """
    kappa = _kappa_arg(fam, kappa)
    k = kappa.kappa
    eye = np.eye(fam.dim)
    e_ts = _regularized(fam, t, s, kappa)
    e_tr = _regularized(fam, t, r, kappa)
    e_rs = _regularized(fam, r, s, kappa)
    e_ss = _regularized(fam, s, s, kappa)
    comp = e_ts - e_tr @ e_rs - k * (k + 1) * eye + k * (e_tr + e_rs)
    ident = e_ss - (1 + k) * eye
    comm = prod = None
    if fam.invertible:
        e_st = _regularized(fam, s, t, kappa)
        left, right = e_st @ e_ts, e_ts @ e_st
        comm = opnorm(left - right)
        prod = opnorm(left)
    return SemigroupResiduals(opnorm(comp), opnorm(ident), comm, opnorm(e_ts), prod)


def inverse_relation_residual(fam, t, s, kappa=None):
    """Relative defect of ``e^{a(s,t)} e^{a(t,s)} - e^{a(s,s)} = kappa(e^{a(t,s)} + e^{a(s,t)}) - kappa(kappa+1) I``."""
    if not fam.invertible:
        raise ValueError("the inverse relation needs an invertible family")
    kappa = _kappa_arg(fam, kappa)
    k = kappa.kappa
    e_ts = _regularized(fam, t, s, kappa)
    e_st = _regularized(fam, s, t, kappa)
    e_ss = _regularized(fam, s, s, kappa)
    lhs = e_st @ e_ts - e_ss
    rhs = k * (e_ts + e_st) - k * (k + 1) * np.eye(fam.dim)
    return opnorm(lhs - rhs) / opnorm(e_st @ e_ts)


def structure_decomposition(fam, partition, kappa=None):
    """Relative defect of the chain expansion of ``e^{a(t, s)}`` over ``s < r_1 < ... < r_n < t``.

    ``partition`` lists ``[s, r_1, ..., r_n, t]``.  The right-hand side is
    the ordered product ``e^{a(t,r_n)} ... e^{a(r_1,s)}`` plus, for each
    intermediate point, the shift correction
    ``kappa(kappa+1) I - kappa(e^{a(t,r_k)} + e^{a(r_k,r_{k-1})})`` carried
    through the remaining chain to ``s``.
    """
    pts = [float(x) for x in partition]
    if len(pts) < 4:
        raise ValueError("need at least two interior points (n >= 2)")
    if any(b <= a for a, b in zip(pts, pts[1:])):
        raise ValueError("partition must be strictly increasing")
    kappa = _kappa_arg(fam, kappa)
    k = kappa.kappa
    s, t, r = pts[0], pts[-1], pts[:-1]  # r[0] = s
    n = len(r) - 1
    eye = np.eye(fam.dim)
    step = [_regularized(fam, r[j], r[j - 1], kappa) for j in range(1, n + 1)]
    to_t = [None] + [_regularized(fam, t, r[j], kappa) for j in range(1, n + 1)]

    # tail[j] = e^{a(r_j, r_{j-1})} ... e^{a(r_1, s)}, tail[0] = I
    tail = [eye]
    for j in range(1, n + 1):
        tail.append(step[j - 1] @ tail[-1])

    rhs = to_t[n] @ tail[n]
    for j in range(1, n + 1):
        corr = k * (k + 1) * eye - k * (to_t[j] + step[j - 1])
        rhs = rhs + corr @ tail[j - 1]
    lhs = _regularized(fam, t, s, kappa)
    return opnorm(lhs - rhs) / opnorm(lhs)


def _parse_matrix(entries, key):
    arr = np.asarray(entries, dtype=float)
    if arr.ndim < 1 or arr.shape[-1] != 2:
        raise ValueError(f"{key}: entries must be [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


FAMILY_KEYS = {"kind", "matrix", "matrices", "profile", "T", "invertible",
               "kappa_policy", "nodes", "name"}


def family_from_dict(cfg):
    """Build a family from a config mapping (strict keys)."""
    unknown = set(cfg) - FAMILY_KEYS
    if unknown:
        raise KeyError(f"unknown family config keys: {sorted(unknown)}")
    kind = cfg.get("kind", "constant")
    key = "matrices" if kind == "tabulated" else "matrix"
    if key not in cfg:
        raise KeyError(f"family of kind {kind!r} needs {key!r}")
    spec = GeneratorSpec(kind, _parse_matrix(cfg[key], key),
                         cfg.get("profile", "one"), cfg.get("T", 1.0))
    return EvolutionFamily(spec, cfg.get("invertible", True),
                           cfg.get("kappa_policy", DEFAULT_POLICY),
                           cfg.get("nodes", DEFAULT_NODES), cfg.get("name"))


def load_family(path):
    with open(path) as fh:
        return family_from_dict(json.load(fh))


def commuting_steps(rng, dim, count, scale=0.5):
    """``count`` polynomials of one random seed matrix (they commute exactly)."""
    seed = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    seed /= opnorm(seed)
    powers = np.stack([np.eye(dim), seed, seed @ seed])
    coef = scale * (rng.standard_normal((count, 3)) + 1j * rng.standard_normal((count, 3)))
    coef /= np.sqrt(3)
    return np.einsum("kp,pij->kij", coef, powers)


ROTATION = np.array([[0.0, 1.0], [-1.0, 0.0]])


def shipped_families(seed=0, dim=3):
    """The three reference families used by the experiments.

    ``rotation``: constant planar rotation generator.  ``cos-damped``:
    ``cos(t) K`` with a weakly damped rotation ``K``.  ``tabulated``: four
    commuting steps built from a random seed matrix.  All three keep the
    growth bound near one; the chain expansion loses about ``kappa^n``
    digits, so strongly growing families are unsuitable for it.
    """
    rng = np.random.default_rng(seed)
    return {
        "rotation": EvolutionFamily(GeneratorSpec("constant", ROTATION), name="rotation"),
        "cos-damped": EvolutionFamily(
            GeneratorSpec("separable", np.array([[-0.1, 1.0], [-1.0, -0.2]]), "cos"),
            name="cos-damped"),
        "tabulated": EvolutionFamily(
            GeneratorSpec("tabulated", commuting_steps(rng, dim, 4)), name="tabulated"),
    }


def positive_families():
    """Families whose operators have positive spectrum, so ``kappa = 0`` is admissible."""
    return {
        "diag": EvolutionFamily(
            GeneratorSpec("constant", np.diag([0.3, 0.7])), name="diag"),
        "cos-diag": EvolutionFamily(
            GeneratorSpec("separable", np.diag([2.0, 3.0]), "cos"), name="cos-diag"),
        "hermitian-exp": EvolutionFamily(
            GeneratorSpec("separable", np.array([[1.0, 0.5j], [-0.5j, -0.5]]),
                          "exp-decay"), name="hermitian-exp"),
    }
