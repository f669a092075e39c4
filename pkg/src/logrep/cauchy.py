"""Cauchy problems ``u' = A(t) u + f(t)`` solved through the shifted logarithm.

The homogeneous part is ``(e^{a(t, s)} - kappa I) u_s`` with ``e^{a}`` summed
as a power series; the source enters through the Duhamel integral of the
same operator, taken by Gauss-Legendre quadrature per grid cell.  A
classical RK4 integrator serves as the independent oracle.
"""

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from ._validation import check_vector
from .evolution import EvolutionFamily, alternative_generator, exp_series
from .linalg import opnorm

METHODS = ("power-series", "duhamel", "rk4-oracle")
HOLDER_PAIRS = 200
RK4_REFINE = 8


@dataclass(frozen=True)
class CauchyProblem:
    """``u' = A(t) u + f(t)``, ``u(s) = u_s`` for a family with generator ``A``.

    ``holder`` declares ``(C_H, gamma)`` for the source; it is spot-checked
    on random pairs at construction.
    """

    family: EvolutionFamily
    initial: np.ndarray
    s: float = 0.0
    source: Optional[Callable[[float], np.ndarray]] = None
    holder: Optional[Tuple[float, float]] = None

    def __post_init__(self):
        if not isinstance(self.family, EvolutionFamily):
            raise TypeError("family must be an EvolutionFamily")
        n = self.family.dim
        object.__setattr__(self, "initial", check_vector(self.initial, n, "initial"))
        self.family.spec._check_time(self.s)
        if self.source is None:
            return
        check_vector(self.source(self.s), n, "source(s)")
        if self.holder is None:
            raise ValueError("a source needs declared Holder constants (C_H, gamma)")
        c_h, gamma = self.holder
        if not (c_h > 0 and 0 < gamma <= 1):
            raise ValueError(f"invalid Holder constants {self.holder}")
        pairs, jumps = self._holder_sample()
        gaps = np.abs(pairs[:, 0] - pairs[:, 1])
        excess = jumps - c_h * gaps ** gamma
        if np.any(excess > 1e-12 * (1 + jumps)):
            raise ValueError(
                f"source violates the declared Holder bound on {int(np.sum(excess > 0))} "
                f"of {HOLDER_PAIRS} sampled pairs")

    def _holder_sample(self):
        T = self.family.T
        rng = np.random.default_rng(HOLDER_PAIRS)
        pairs = rng.uniform(-T, T, (HOLDER_PAIRS, 2))
        jumps = np.array([np.linalg.norm(self.source(a) - self.source(b)) for a, b in pairs])
        return pairs, jumps

    def holder_exponent_estimate(self):
        """Least-squares slope of ``log ||f(t) - f(s)||`` against ``log |t - s|``."""
        pairs, jumps = self._holder_sample()
        gaps = np.abs(pairs[:, 0] - pairs[:, 1])
        keep = (jumps > 1e-14) & (gaps > 1e-14)
        if keep.sum() < 3:
            return math.inf
        slope, _ = np.polyfit(np.log(gaps[keep]), np.log(jumps[keep]), 1)
        return float(slope)

    def source_at(self, t):
        if self.source is None:
            return np.zeros(self.family.dim, dtype=complex)
        return np.asarray(self.source(t), dtype=complex)


@dataclass(frozen=True)
class SolutionTrace:
    times: np.ndarray
    states: np.ndarray
    method: str

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}")
        times = np.asarray(self.times, dtype=float)
        states = np.asarray(self.states, dtype=complex)
        if times.ndim != 1 or times.size == 0:
            raise ValueError("a trace needs a non-empty 1-d time grid")
        if np.any(np.diff(times) <= 0):
            raise ValueError("trace times must be strictly increasing")
        if states.shape[0] != times.size or not np.all(np.isfinite(states)):
            raise ValueError("trace states must be finite, one per time")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "states", states)

    def at(self, t):
        idx = np.flatnonzero(np.isclose(self.times, t, rtol=0, atol=1e-12))
        if idx.size == 0:
            raise KeyError(f"time {t} not on the trace grid")
        return self.states[idx[0]]


def _grid(p, grid):
    times = np.asarray(grid, dtype=float)
    if times.ndim != 1 or times.size == 0:
        raise ValueError("grid must be a non-empty 1-d array")
    if np.any(np.diff(times) <= 0):
        raise ValueError("grid must be strictly increasing")
    p.family.spec._check_time(*times)
    return times


def _shifted_operator(fam, t, tau, kappa):
    """``e^{a(t, tau)} - kappa I`` through the logarithm and its series."""
    rep = alternative_generator(fam, t, tau, kappa=kappa)
    value, _ = exp_series(rep.a)
    return value - rep.kappa.kappa * np.eye(fam.dim), rep


def solve_autonomous(p, grid, kappa=None):
    """``u(t) = (e^{a(t, s)} - kappa I) u_s`` on each grid time."""
    if p.source is not None:
        raise ValueError("solve_autonomous needs a problem without source")
    times = _grid(p, grid)
    fam = p.family
    _, rep = _shifted_operator(fam, p.s, p.s, kappa)
    k = rep.kappa.kappa
    # renormalized start: e^{a(s, s)} u_s must equal (1 + kappa) u_s
    start = exp_series(rep.a)[0] @ p.initial
    defect = np.linalg.norm(start - (1 + k) * p.initial)
    if defect > 1e-8 * abs(1 + k) * max(np.linalg.norm(p.initial), 1e-300):
        raise RuntimeError(f"renormalized initial value off by {defect:.3e}")
    states = [_shifted_operator(fam, t, p.s, kappa)[0] @ p.initial for t in times]
    return SolutionTrace(times, np.array(states), "power-series")


def _duhamel(p, t, cells, nodes, weights, kappa):
    """``int_s^t (e^{a(t, tau)} - kappa I) f(tau) dtau`` over the given cells."""
    total = np.zeros(p.family.dim, dtype=complex)
    for lo, hi in cells:
        half, mid = 0.5 * (hi - lo), 0.5 * (hi + lo)
        for x, w in zip(nodes, weights):
            tau = mid + half * x
            op, _ = _shifted_operator(p.family, t, tau, kappa)
            total = total + (w * half) * (op @ p.source_at(tau))
    return total


def _cells(s, t, times):
    """Grid cells covering ``[s, t]`` (or ``[t, s]``), split at the grid points."""
    lo, hi = min(s, t), max(s, t)
    inner = times[(times > lo) & (times < hi)]
    edges = np.concatenate([[lo], inner, [hi]])
    return list(zip(edges[:-1], edges[1:])), (1.0 if t >= s else -1.0)


def solve_nonautonomous(p, grid, quad_nodes=32, kappa=None):
    """Homogeneous part plus the Duhamel integral, Gauss-Legendre per grid cell."""
    if p.source is None:
        raise ValueError("solve_nonautonomous needs a source term")
    times = _grid(p, grid)
    gamma = p.holder[1]
    est = p.holder_exponent_estimate()
    if est < gamma - 0.05:
        warnings.warn(f"sampled Holder exponent {est:.3f} is below the declared "
                      f"{gamma}", RuntimeWarning, stacklevel=2)
    nodes, weights = np.polynomial.legendre.leggauss(quad_nodes)
    states = []
    for t in times:
        op, _ = _shifted_operator(p.family, t, p.s, kappa)
        cells, sign = _cells(p.s, t, times)
        integral = sign * _duhamel(p, t, cells, nodes, weights, kappa) if t != p.s else 0
        states.append(op @ p.initial + integral)
    return SolutionTrace(times, np.array(states), "duhamel")


@dataclass(frozen=True)
class MildParts:
    """``u(t) = series - kappa_part``."""

    series: np.ndarray
    kappa_part: np.ndarray
    kappa: complex

    @property
    def assembled(self):
        return self.series - self.kappa_part


def mild_decomposition(p, t, quad_nodes=32, kappa=None, grid=None):
    """Split the mild solution into its series part and its shift part.

    ``series = e^{a(t,s)} u_s + int_s^t e^{a(t,tau)} f(tau) dtau`` and
    ``kappa_part = kappa (u_s + int_s^t f(tau) dtau)``.  Their difference
    is ``u(t)``.  ``grid`` supplies the quadrature cells (default: one).
    """
    if p.source is None:
        raise ValueError("mild_decomposition needs a source term")
    fam = p.family
    times = np.array([p.s, t]) if grid is None else _grid(p, grid)
    nodes, weights = np.polynomial.legendre.leggauss(quad_nodes)
    cells, sign = _cells(p.s, t, times)
    rep = alternative_generator(fam, t, p.s, kappa=kappa)
    k = rep.kappa.kappa
    series = exp_series(rep.a)[0] @ p.initial
    plain = np.zeros(fam.dim, dtype=complex)
    for lo, hi in cells:
        half, mid = 0.5 * (hi - lo), 0.5 * (hi + lo)
        for x, w in zip(nodes, weights):
            tau = mid + half * x
            f = p.source_at(tau)
            reg = exp_series(alternative_generator(fam, t, tau, kappa=kappa).a)[0]
            series = series + sign * (w * half) * (reg @ f)
            plain = plain + sign * (w * half) * f
    return MildParts(series, k * (p.initial + plain), k)


def rk4_oracle(p, grid):
    """Classical RK4 on ``u' = A(t) u + f(t)`` with each grid cell split 8 ways.

    For tabulated generators the steps also stop at the cell edges and use
    the generator of the cell being crossed.
    """
    times = _grid(p, grid)
    spec = p.family.spec
    spacing = _spacing(times, p.s)
    edges = np.array([])
    if spec.kind == "tabulated":
        edges = np.linspace(-spec.T, spec.T, len(spec.base) + 1)

    def step(t, h, u):
        if spec.kind == "tabulated":
            a = spec.generator(t + h / 2)
            rhs = lambda tt, uu: a @ uu + p.source_at(tt)
        else:
            rhs = lambda tt, uu: spec.generator(tt) @ uu + p.source_at(tt)
        k1 = rhs(t, u)
        k2 = rhs(t + h / 2, u + h / 2 * k1)
        k3 = rhs(t + h / 2, u + h / 2 * k2)
        k4 = rhs(t + h, u + h * k3)
        return u + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)

    u = p.initial.copy()
    t = p.s
    states = []
    for target in times:
        lo, hi = min(t, target), max(t, target)
        stops = [x for x in edges if lo < x < hi]
        stops = sorted(stops, reverse=bool(target < t)) + [target]
        for stop in stops:
            span = stop - t
            n = RK4_REFINE * max(1, int(math.ceil(round(abs(span) / spacing, 9))))
            if span != 0:
                h = span / n
                for _ in range(n):
                    u = step(t, h, u)
                    t = t + h
            t = stop
        states.append(u.copy())
    return SolutionTrace(times, np.array(states), "rk4-oracle")


def _spacing(times, s):
    pts = np.unique(np.concatenate([[s], times]))
    return float(np.min(np.diff(pts))) if pts.size > 1 else 1.0


def holomorphy_probe(fam, t, s, orders=4, h=1e-2, kappa=None):
    """``t^n ||d^n/dt^n e^{a(t, s)}||`` for ``n = 1..orders`` by central differences."""
    if not 1 <= orders <= 4:
        raise ValueError("orders must be between 1 and 4")
    if h < 1e-4:
        warnings.warn(f"difference step {h:g} risks cancellation underflow",
                      RuntimeWarning, stacklevel=2)
    T = fam.T
    reach = orders * h / 2
    if not (-T < t - reach and t + reach < T):
        raise ValueError("t must be interior to the interval with room for the stencil")

    def reg(x):
        return exp_series(alternative_generator(fam, x, s, kappa=kappa).a)[0]

    out = []
    for n in range(1, orders + 1):
        acc = 0
        for j in range(n + 1):
            acc = acc + (-1) ** j * math.comb(n, j) * reg(t + (n / 2 - j) * h)
        out.append(abs(t) ** n * opnorm(acc / h ** n))
    return out
