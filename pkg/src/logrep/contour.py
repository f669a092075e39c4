"""Holomorphic functional calculus on circles.

``Log(U + kappa I)`` is evaluated as the Cauchy integral

    (1 / 2 pi i) \\oint Log(lam) (lam I - U - kappa I)^{-1} d lam

with the trapezoidal rule on one or more circles.  With a real positive
shift ``kappa`` the spectrum of ``U + kappa I`` sits in the open right
half-plane, so a single circle centred at ``kappa`` sees neither the
origin nor the branch cut of the principal logarithm.
"""

from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np
from scipy.optimize import minimize_scalar

from ._validation import check_square
from .linalg import SingularMatrixError, eig, expm, opnorm, solve

DEFAULT_NODES = 256
DEFAULT_POLICY = 2.0
MIN_POLICY = 1.5
RADIUS_CAP = 0.95
QUADRATURE_TARGET = 1e-17


class ContourError(ValueError):
    """The contour does not enclose the spectrum, or a node hits it."""


class BranchError(ValueError):
    """A principal-branch requirement is violated."""


@dataclass(frozen=True)
class Contour:
    """Circle ``|lam - center| = radius`` sampled at ``nodes`` equispaced points."""

    center: complex
    radius: float
    nodes: int = DEFAULT_NODES

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError(f"radius must be positive, got {self.radius}")
        if int(self.nodes) != self.nodes or self.nodes < 1:
            raise ValueError(f"nodes must be a positive integer, got {self.nodes}")
        object.__setattr__(self, "center", complex(self.center))
        object.__setattr__(self, "radius", float(self.radius))
        object.__setattr__(self, "nodes", int(self.nodes))

    @property
    def excludes_origin(self):
        return abs(self.center) - self.radius > 0

    @property
    def cut_distance(self):
        """Distance from the closed disk to the branch cut ``(-inf, 0]``."""
        c = self.center
        d = abs(c) if c.real >= 0 else abs(c.imag)
        return d - self.radius

    @property
    def avoids_cut(self):
        return self.cut_distance > 0

    def encloses(self, z):
        return np.abs(np.asarray(z) - self.center) < self.radius

    def quadrature(self):
        """Nodes ``lam_j`` and weights ``w_j`` with ``(1/2 pi i) \\oint g ~ sum w_j g(lam_j)``."""
        theta = 2.0 * np.pi * np.arange(self.nodes) / self.nodes
        unit = np.exp(1j * theta)
        return self.center + self.radius * unit, self.radius * unit / self.nodes


ContourLike = Union[Contour, Sequence[Contour]]


@dataclass(frozen=True)
class KappaChoice:
    """Shift ``kappa`` together with the growth bound it was derived from.

    ``margin`` is the distance from the origin to the disk of radius
    ``growth_bound`` about ``kappa``, which contains the shifted spectrum.
    """

    kappa: complex
    margin: float
    growth_bound: float

    @classmethod
    def explicit(cls, kappa, growth_bound=0.0):
        kappa = complex(kappa)
        return cls(kappa, abs(kappa) - growth_bound, growth_bound)

    @property
    def is_zero(self):
        return self.kappa == 0


@dataclass(frozen=True)
class LogRep:
    kappa: KappaChoice
    a: np.ndarray
    residual: float
    shifted_norm: float
    contours: tuple = field(repr=False)
    resolvent_norms: np.ndarray = field(repr=False)

    @property
    def relative_residual(self):
        return self.residual / self.shifted_norm


def _as_contours(contour):
    if isinstance(contour, Contour):
        return (contour,)
    contours = tuple(contour)
    if not contours or not all(isinstance(c, Contour) for c in contours):
        raise TypeError("contour must be a Contour or a non-empty sequence of Contours")
    return contours


def _kappa_value(kappa):
    return kappa.kappa if isinstance(kappa, KappaChoice) else complex(kappa)


def select_kappa(u, policy=DEFAULT_POLICY):
    """Real positive shift ``kappa = policy * max(||u||, 1)``.

    The floor of one is the growth bound of ``U(s, s) = I``; it keeps the
    shift away from zero for the zero operator.
    """
    u = check_square(u, "u")
    if not policy >= MIN_POLICY:
        raise ValueError(f"kappa policy must be >= {MIN_POLICY}, got {policy}")
    growth = max(opnorm(u), 1.0)
    kappa = policy * growth
    return KappaChoice(complex(kappa), kappa - growth, growth)


def build_contour(u, kappa, nodes=DEFAULT_NODES, radius_factor=None):
    """Circle about ``kappa`` enclosing the spectrum of ``u + kappa I``.

    The radius is ``(||u|| + kappa) / 2`` clipped below ``0.95 kappa``;
    ``radius_factor`` instead sets it to that fraction of the cap.
    """
    u = check_square(u, "u")
    k = _kappa_value(kappa)
    if k.imag != 0 or not k.real > 0:
        raise ValueError(f"build_contour needs a real positive kappa, got {k}")
    k = k.real
    cap = RADIUS_CAP * k
    if radius_factor is None:
        radius = min(0.5 * (opnorm(u) + k), cap)
    else:
        if not 0 < radius_factor <= 1:
            raise ValueError("radius_factor must lie in (0, 1]")
        radius = radius_factor * cap
    contour = Contour(k, radius, nodes)
    values = eig(u).values + k
    outside = ~contour.encloses(values)
    if np.any(outside):
        raise ContourError(
            f"eigenvalue {values[outside][0]:.6g} of u + kappa I lies outside "
            f"the circle |lam - {k:.6g}| = {radius:.6g}; growth bound too small")
    return contour


def _cut_distance(z):
    z = np.asarray(z)
    return np.where(z.real >= 0, np.abs(z), np.abs(z.imag))


def _clusters(values, reach):
    """Single-linkage groups: join eigenvalues closer than ``reach``."""
    n = len(values)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(values[i] - values[j]) <= min(reach[i], reach[j]):
                parent[find(i)] = find(j)
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return [np.array(g) for g in groups.values()]


def _single_circle(values):
    """Best real-centred circle avoiding the cut; returns (factor, center, radius)."""
    if np.any(values.real <= 0):
        return np.inf, None, None
    mod2 = np.abs(values) ** 2

    def q(y):  # max |lam - c| / c with y = 1/c, convex in y
        return np.sqrt(np.max(mod2 * y * y - 2 * values.real * y + 1.0))

    top = 2.0 * np.max(values.real / mod2)
    res = minimize_scalar(q, bounds=(top * 1e-9, top), method="bounded",
                          options={"xatol": top * 1e-10})
    qmin = float(q(res.x))
    if not qmin < 1:
        return np.inf, None, None
    c = 1.0 / res.x
    qmin = max(qmin, 1e-3)
    return np.sqrt(qmin), c, c * np.sqrt(qmin)


def enclosing_contours(values, nodes=DEFAULT_NODES, avoid_cut=True):
    """Circles whose union encloses ``values``.

    With ``avoid_cut`` every disk stays clear of ``(-inf, 0]`` so the
    principal logarithm is holomorphic on it.  The cheaper of a single
    real-centred circle and one circle per eigenvalue cluster is chosen by
    the predicted trapezoidal convergence factor.
    """
    values = np.atleast_1d(np.asarray(values, dtype=complex))
    if avoid_cut:
        dist = _cut_distance(values)
        scale = max(1.0, float(np.max(np.abs(values))))
        if np.any(dist <= 1e-12 * scale):
            raise BranchError(
                "spectrum touches the branch cut (-inf, 0]; the principal "
                "logarithm is undefined without a shift")
    else:
        m = values.mean()
        rho = float(np.max(np.abs(values - m)))
        radius = 2.0 * rho if rho > 0 else max(1.0, 0.5 * abs(m))
        return (Contour(m, radius, nodes),)

    single = _single_circle(values)

    # merge near-coincident eigenvalues; refine the merge radius while the
    # predicted trapezoidal error on the best clustering is still visible
    tie = 1e-12 * scale
    fraction = 0.25
    circles, worst = [], np.inf
    while fraction >= 1e-6 and not worst ** nodes < QUADRATURE_TARGET:
        cand, w = _cluster_circles(values, np.maximum(fraction * dist, tie), nodes)
        if w < worst:
            circles, worst = cand, w
        fraction /= 4

    if single[0] <= worst:
        return (Contour(single[1], single[2], nodes),)
    if not np.isfinite(worst):
        raise ContourError("could not separate the spectrum into admissible circles")
    return tuple(circles)


def _cluster_circles(values, reach, nodes):
    """One circle per cluster; disks never overlap and never touch the cut.

    Cluster ``j`` with centre ``m_j`` and spread ``rho_j`` may use radii up
    to ``R_j``, the smaller of its distance to the cut and its share of the
    gap to each other cluster, ``(|m_i - m_j| - rho_i - rho_j) / 2 + rho_j``.
    The circle radius is the geometric mean of ``rho_j`` and ``R_j``.
    """
    groups = _clusters(values, reach)
    centers = np.array([values[g].mean() for g in groups])
    spreads = np.array([np.max(np.abs(values[g] - c)) for g, c in zip(groups, centers)])
    circles, worst = [], 0.0
    for j, (m, rho) in enumerate(zip(centers, spreads)):
        limit = float(_cut_distance(m))
        for i, (mi, ri) in enumerate(zip(centers, spreads)):
            if i != j:
                limit = min(limit, 0.5 * (abs(mi - m) - ri - rho) + rho)
        if not rho < 0.9 * limit:
            return [], np.inf
        rho = max(rho, 1e-2 * limit)
        circles.append(Contour(m, np.sqrt(rho * limit), nodes))
        worst = max(worst, np.sqrt(rho / limit))
    return circles, worst


def _quadrature(f, m, contours):
    """Sum of trapezoidal Cauchy integrals of ``f(lam) (lam I - m)^{-1}``."""
    n = m.shape[-1]
    eye = np.eye(n, dtype=complex)
    total = np.zeros_like(m)
    norms = []
    for c in contours:
        lam, w = c.quadrature()
        shifted = lam[:, None, None] * eye - m
        try:
            res = solve(shifted, np.broadcast_to(eye, shifted.shape))
        except SingularMatrixError as exc:
            raise ContourError(
                f"quadrature node on |lam - {c.center:.6g}| = {c.radius:.6g} "
                f"hits the spectrum (pivot {exc.pivot_index})") from exc
        total = total + ((w * f(lam))[:, None, None] * res).sum(axis=0)
        norms.append(np.linalg.svd(res, compute_uv=False)[:, 0])
    return total, np.concatenate(norms)


def _check_branch(a):
    values = np.linalg.eigvals(a)
    bad = np.abs(values.imag) > np.pi * (1 + 1e-12)
    if np.any(bad):
        raise BranchError(
            f"logarithm has eigenvalue {values[bad][0]:.6g} off the principal strip")


def dunford_log(u, kappa=None, contour=None, *, policy=DEFAULT_POLICY,
                nodes=DEFAULT_NODES):
    """Principal logarithm ``Log(u + kappa I)`` by contour quadrature.

    Parameters
    ----------
    u : (n, n) array_like
    kappa : KappaChoice, complex or None
        ``None`` selects ``policy * max(||u||, 1)``.  Zero is accepted only
        when the spectrum of ``u`` avoids ``(-inf, 0]``.
    contour : Contour or sequence of Contour, optional
        Defaults to :func:`build_contour` (nonzero shift) or
        :func:`enclosing_contours` (zero shift, or a shift too small for the
        circle about ``kappa``).

    Returns
    -------
    LogRep
    """
    u = check_square(u, "u")
    if kappa is None:
        kappa = select_kappa(u, policy)
    elif not isinstance(kappa, KappaChoice):
        kappa = KappaChoice.explicit(kappa, opnorm(u))
    k = kappa.kappa
    m = u + k * np.eye(u.shape[0])

    if contour is None:
        if k == 0:
            contour = enclosing_contours(eig(u).values, nodes)
        else:
            try:
                contour = build_contour(u, kappa, nodes)
            except ContourError:
                # shift too small for the kappa-centred circle; enclose the
                # shifted spectrum directly
                contour = enclosing_contours(eig(m).values, nodes)
    contours = _as_contours(contour)
    if k == 0:
        values = eig(u).values
        if np.any(_cut_distance(values) <= 1e-12 * max(1.0, np.max(np.abs(values)))):
            raise BranchError("kappa = 0 rejected: spectrum meets (-inf, 0]")
    for c in contours:
        if not c.avoids_cut:
            raise ContourError(f"contour {c} crosses the branch cut of Log")

    a, norms = _quadrature(np.log, m, contours)
    _check_branch(a)
    residual = opnorm(expm(a) - m)
    return LogRep(kappa, a, residual, opnorm(m), contours, norms)


def dunford_apply(f, u, contour):
    """``f(u)`` for a scalar function ``f`` holomorphic on and inside ``contour``."""
    u = check_square(u, "u")
    contours = _as_contours(contour)
    values = eig(u).values
    inside = np.zeros(values.shape, dtype=bool)
    for c in contours:
        inside |= c.encloses(values)
    if not np.all(inside):
        raise ContourError(f"eigenvalue {values[~inside][0]:.6g} not enclosed")
    result, _ = _quadrature(f, u, contours)
    return result
