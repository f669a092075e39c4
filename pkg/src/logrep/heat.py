"""Heat equation in either direction, and the Cole-Hopf map to Burgers.

The heat equation ``d_x^2 u = mu^{1/2} d_t u`` is treated on periodic
grids.  Forward in ``t`` the generator is the multiplier
``-mu^{-1/2} omega^2``.  Sideways in ``x`` the data ``(u, d_x u)`` at one
station are propagated with ``cosh`` and ``sinh`` of
``lam = (i mu^{1/2} omega)^{1/2}``, where ``omega`` is now the frequency in
``t``.  The growing branch is genuine, so modes whose growth over the
window exceeds ``1e6`` are cut.
"""

from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np
from scipy.integrate import quad

from ._validation import check_positive

SPACES = ("physical", "fourier")
DIRECTIONS = ("t-evolution", "x-evolution")
GROWTH_CAP = 1e6
OVERFLOW_EXPONENT = 700.0
POSITIVITY_FLOOR = 1e-8


class PositivityError(ValueError):
    """A field came too close to zero for its logarithm or reciprocal."""


class WindowError(OverflowError):
    """The sideways propagation would overflow."""


@dataclass(frozen=True)
class Field1D:
    """Samples of a periodic function on ``n`` equispaced points of ``[0, length)``."""

    values: np.ndarray
    length: float = 2 * np.pi
    space: str = "physical"

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        n = values.size
        if values.ndim != 1 or n < 2 or n & (n - 1):
            raise ValueError(f"grid size must be a power of two >= 2, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("field values must be finite")
        if self.space not in SPACES:
            raise ValueError(f"space must be one of {SPACES}")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "length", check_positive(float(self.length), "length"))

    @property
    def n(self):
        return self.values.size

    @property
    def coords(self):
        return self.length * np.arange(self.n) / self.n

    @property
    def omega(self):
        return 2 * np.pi * np.fft.fftfreq(self.n, self.length / self.n)

    def to_fourier(self):
        if self.space == "fourier":
            return self
        return replace(self, values=np.fft.fft(self.values), space="fourier")

    def to_physical(self):
        if self.space == "physical":
            return self
        return replace(self, values=np.fft.ifft(self.values), space="physical")

    def with_values(self, values, space="physical"):
        return replace(self, values=values, space=space)

    def norm(self):
        return float(np.linalg.norm(self.to_physical().values))


@dataclass(frozen=True)
class HeatSetup:
    mu: float
    n: int
    length: float
    direction: str = "t-evolution"

    def __post_init__(self):
        check_positive(self.mu, "mu")
        check_positive(self.length, "length")
        if self.n < 2 or self.n & (self.n - 1):
            raise ValueError("grid size must be a power of two")
        if self.direction not in DIRECTIONS:
            raise ValueError(f"direction must be one of {DIRECTIONS}")

    def field(self, values):
        return Field1D(values, self.length)

    @property
    def grid(self):
        return self.field(np.zeros(self.n)).coords


@dataclass(frozen=True)
class BurgersField:
    psi: Field1D

    def __post_init__(self):
        if self.psi.space != "physical":
            object.__setattr__(self, "psi", self.psi.to_physical())


def _spectral(field, power):
    """``d^power`` of a physical field by Fourier multiplication."""
    f = field.to_physical()
    k = f.omega.copy()
    if power % 2 and f.n % 2 == 0:
        k[f.n // 2] = 0.0  # the Nyquist mode has no odd derivative
    return np.fft.ifft((1j * k) ** power * np.fft.fft(f.values))


def _check_setup(setup, field, direction):
    if setup.direction != direction:
        raise ValueError(f"setup direction is {setup.direction}, need {direction}")
    if field.n != setup.n or not np.isclose(field.length, setup.length):
        raise ValueError("field grid does not match the setup")


def heat_evolve_t(setup, u0, t):
    """``u(t) = exp(t mu^{-1/2} d_x^2) u0`` by the multiplier ``exp(-t mu^{-1/2} omega^2)``."""
    _check_setup(setup, u0, "t-evolution")
    if t < 0:
        raise ValueError("heat evolution in t runs forward only")
    f = u0.to_fourier()
    mult = np.exp(-t * setup.mu ** -0.5 * f.omega ** 2)
    return f.with_values(mult * f.values, "fourier").to_physical()


def sideways_symbol(mu, omega):
    """``lam = (i mu^{1/2} omega)^{1/2}``, principal branch."""
    return np.sqrt(1j * np.sqrt(mu) * omega)


def frequency_cap(mu, x):
    """Largest ``|omega|`` whose sideways growth ``exp(Re lam |x|)`` stays within ``1e6``."""
    if x == 0:
        return np.inf
    return 2.0 * (np.log(GROWTH_CAP) / abs(x)) ** 2 / np.sqrt(mu)


class SidewaysResult(NamedTuple):
    u: Field1D
    ux: Field1D
    omega_cap: float
    truncated: int


def heat_evolve_x(setup, v0, v1, x, cap=True):
    """Propagate ``(u, d_x u)`` at one station a distance ``x`` sideways.

    Per ``t``-frequency ``omega != 0``:
    ``u = v0 cosh(lam x) + v1 sinh(lam x) / lam`` and
    ``d_x u = v0 lam sinh(lam x) + v1 cosh(lam x)``, the two-exponential
    solution matching the data.  ``omega = 0`` gives ``v0 + x v1``.
    With ``cap`` the modes above :func:`frequency_cap` are dropped.
    """
    _check_setup(setup, v0, "x-evolution")
    _check_setup(setup, v1, "x-evolution")
    f0, f1 = v0.to_fourier(), v1.to_fourier()
    omega = f0.omega
    lam = sideways_symbol(setup.mu, omega)
    omega_cap = frequency_cap(setup.mu, x) if cap else np.inf
    keep = np.abs(omega) <= omega_cap
    exponent = np.max(np.abs(lam[keep].real)) * abs(x)
    if exponent > OVERFLOW_EXPONENT:
        raise WindowError(f"x-window too wide for grid: growth exponent {exponent:.1f}")
    zero = omega == 0
    safe = np.where(zero, 1.0, lam)
    ch, sh = np.cosh(lam * x), np.sinh(lam * x)
    u = np.where(zero, f0.values + x * f1.values, f0.values * ch + f1.values * sh / safe)
    ux = np.where(zero, f1.values, f0.values * lam * sh + f1.values * ch)
    u, ux = np.where(keep, u, 0), np.where(keep, ux, 0)
    if x == 0:
        return SidewaysResult(v0.to_physical(), v1.to_physical(), omega_cap, 0)
    return SidewaysResult(f0.with_values(u, "fourier").to_physical(),
                          f0.with_values(ux, "fourier").to_physical(),
                          float(omega_cap), int(np.sum(~keep)))


def decaying_waves(mu, t, x, amplitudes, omegas, mean=(0.0, 0.0)):
    """Closed-form solution that is periodic in ``t``.

    ``u = m0 + m1 x + Re sum_k c_k exp(i omega_k t - lam_k x)`` with
    ``lam_k = (i mu^{1/2} omega_k)^{1/2}``.  Returns ``(u, d_x u)``.
    """
    t = np.asarray(t, dtype=float)
    c = np.asarray(amplitudes, dtype=complex)
    w = np.asarray(omegas, dtype=float)
    lam = sideways_symbol(mu, w)
    modes = c[:, None] * np.exp(1j * w[:, None] * t[None, :] - lam[:, None] * x)
    u = mean[0] + mean[1] * x + modes.sum(axis=0).real
    ux = mean[1] + (-lam[:, None] * modes).sum(axis=0).real
    return u, ux


def resolvent_bound_probe(mu, lam, f):
    """``||(lam - mu^{1/2} d_t)^{-1} f|| / ||f||`` by Fourier division."""
    check_positive(mu, "mu")
    lam = complex(lam)
    if lam.real < 0.1:
        raise ValueError("Re lambda must be at least 0.1")
    f = f.to_fourier()
    den = lam - 1j * np.sqrt(mu) * f.omega
    if np.min(np.abs(den)) < 1e-12:
        raise ZeroDivisionError("resolvent denominator underflows on some mode")
    u = f.with_values(f.values / den, "fourier")
    return u.norm() / f.norm()


def fractional_power_apply(mu, alpha, f):
    """``(mu^{1/2} d_t)^alpha f`` via the symbol ``(i mu^{1/2} omega)^alpha``, zero at ``omega = 0``."""
    check_positive(mu, "mu")
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    f = f.to_fourier()
    sym = 1j * np.sqrt(mu) * f.omega
    mult = np.zeros_like(sym)
    nz = sym != 0
    mult[nz] = sym[nz] ** alpha
    return f.with_values(mult * f.values, "fourier").to_physical()


def derivative_apply(mu, f):
    """``mu^{1/2} d_t f`` as the full symbol ``i mu^{1/2} omega``."""
    f = f.to_fourier()
    return f.with_values(1j * np.sqrt(mu) * f.omega * f.values, "fourier").to_physical()


def _floor_check(values, floor, what):
    low = np.min(np.abs(values))
    if not low > floor:
        raise PositivityError(f"{what}: min |u| = {low:.3e} is not above the floor {floor:g}")


def cole_hopf(setup, u, positivity_floor=POSITIVITY_FLOOR):
    """``psi = -2 mu^{-1/2} d_x u / u`` with spectral ``d_x``."""
    u = u.to_physical()
    _check_setup(setup, u, "t-evolution")
    _floor_check(u.values, positivity_floor, "cole_hopf")
    psi = -2.0 * setup.mu ** -0.5 * _spectral(u, 1) / u.values
    return BurgersField(u.with_values(psi))


def burgers_residual(mu, psi_trace, dt):
    """Max-norm residual of ``psi_t + psi psi_x - mu^{-1/2} psi_xx`` on interior slices.

    ``psi_t`` is a central difference with step ``dt``; ``x``-derivatives
    are spectral.  This is the Burgers equation satisfied by the transform
    of solutions of ``u_t = mu^{-1/2} u_xx``.
    """
    if len(psi_trace) < 3:
        raise ValueError("need at least 3 time slices")
    check_positive(dt, "dt")
    nu = mu ** -0.5
    fields = [p.psi if isinstance(p, BurgersField) else p for p in psi_trace]
    worst = 0.0
    for j in range(1, len(fields) - 1):
        mid = fields[j]
        dpsi = (fields[j + 1].values - fields[j - 1].values) / (2 * dt)
        r = dpsi + mid.values * _spectral(mid, 1) - nu * _spectral(mid, 2)
        worst = max(worst, float(np.max(np.abs(r))))
    return worst


def miura_compose(v, positivity_floor=POSITIVITY_FLOOR):
    """``w = v'' / v`` with spectral derivatives."""
    v = v.to_physical()
    _floor_check(v.values, positivity_floor, "miura_compose")
    return v.with_values(_spectral(v, 2) / v.values)


def profile(name, n, length, offset=0.0):
    """Initial profiles: ``gaussian-bump``, ``cosine``, ``constant-plus-mode``."""
    x = length * np.arange(n) / n
    if name == "gaussian-bump":
        vals = np.exp(-((x - length / 2) / (0.1 * length)) ** 2)
    elif name == "cosine":
        vals = np.cos(2 * np.pi * x / length)
    elif name == "constant-plus-mode":
        vals = 2.0 + 0.1 * np.cos(2 * np.pi * x / length)
    else:
        raise ValueError(f"unknown profile {name!r}")
    return Field1D(vals + offset, length)


def field_mass(field):
    """``int u dx`` by the rectangle rule (exact for trigonometric polynomials)."""
    f = field.to_physical()
    return complex(f.values.sum() * f.length / f.n)


def bump_mass(length):
    """Reference mass of the Gaussian bump by adaptive quadrature."""
    val, _ = quad(lambda x: np.exp(-((x - length / 2) / (0.1 * length)) ** 2),
                  0, length, epsabs=1e-13, epsrel=1e-13, limit=200)
    return val
