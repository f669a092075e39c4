"""Experiment runners behind the CLI and the acceptance suite.

Every runner takes ``(seed, params)`` and returns an :class:`Outcome`: the
report records in a fixed order plus named fields or traces to dump as CSV.
Randomized instances draw from ``instance_rng(seed, k)`` so a seed fixes
the whole run.
"""

from dataclasses import dataclass, field

import numpy as np

from .cauchy import (CauchyProblem, holomorphy_probe, mild_decomposition, rk4_oracle,
                     solve_autonomous, solve_nonautonomous)
from .contour import dunford_log, select_kappa
from .evolution import (EvolutionFamily, GeneratorSpec, check_modified_semigroup,
                        inverse_relation_residual, positive_families, recover_generator,
                        shipped_families, structure_decomposition)
from .heat import (Field1D, HeatSetup, burgers_residual, cole_hopf, decaying_waves,
                   derivative_apply, fractional_power_apply, heat_evolve_t, heat_evolve_x,
                   miura_compose, profile, resolvent_bound_probe, sideways_symbol)
from .linalg import eigfunc, opnorm
from .module_algebra import random_sum_instance, random_unsafe_instance
from .reports import ReportRecord, instance_rng
from .rotation import (AXES, RotationOp, build_spin_rep, collective_renormalization,
                       rotation_log_rep, sum_decomposition_check)

SUM_IDENTITIES = ("same-family", "commuting", "k-shifted")


@dataclass
class Outcome:
    records: list = field(default_factory=list)
    fields: dict = field(default_factory=dict)

    def add(self, *args, **kw):
        self.records.append(ReportRecord.check(*args, **kw))

    def extend(self, other):
        self.records.extend(other.records)
        self.fields.update(other.fields)
        return self


def _rel(x, ref):
    d = np.linalg.norm(np.asarray(x) - np.asarray(ref))
    n = np.linalg.norm(ref)
    return d / n if n > 0 else d


# ---------------------------------------------------------------- logrep

def random_diagonalizable(rng, dim_min, dim_max, cond_max=1e6):
    """``V diag(lam) V^{-1}`` with Gaussian ``V`` and ``lam``; redrawn until ``cond(V) < cond_max``."""
    while True:
        d = int(rng.integers(dim_min, dim_max + 1))
        v = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        if np.linalg.cond(v) >= cond_max:
            continue
        lam = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        return v @ np.diag(lam) @ np.linalg.inv(v)


def run_logrep(seed, instances=100, dim_min=2, dim_max=16, nodes=256, kappa_policy=2.0,
               coarse_nodes=64, gain=1e3, gain_fraction=0.9, tol=1e-8):
    out = Outcome()
    short = 0
    for k in range(instances):
        u = random_diagonalizable(instance_rng(seed, k), dim_min, dim_max)
        kappa = select_kappa(u, kappa_policy)
        rep = dunford_log(u, kappa, nodes=nodes)
        ref = eigfunc(u + kappa.kappa * np.eye(len(u)), np.log)
        out.add("logrep", k, "oracle_relative", opnorm(rep.a - ref) / opnorm(ref), tol)
        out.add("logrep", k, "roundtrip_relative", rep.relative_residual, tol)
        r1 = dunford_log(u, kappa, nodes=coarse_nodes).residual
        r2 = dunford_log(u, kappa, nodes=2 * coarse_nodes).residual
        short += r1 < gain * r2
    out.add("logrep", instances, f"refinement_{coarse_nodes}_{2 * coarse_nodes}_failing_fraction",
            short / max(instances, 1), 1 - gain_fraction)
    return out


# ------------------------------------------------------------- semigroup

def _triple(rng, T):
    return tuple(float(x) for x in rng.uniform(-T, T, 3))


def run_semigroup(seed, dim=3, kappa_policy=2.0, triples=50, kappa_zero=0, inverse=False,
                  tol=1e-8, tol_zero=1e-9):
    out = Outcome()
    fams = list(shipped_families(seed, dim).values())
    for f in fams:
        f.policy = float(kappa_policy)
    for k in range(triples):
        fam = fams[k % len(fams)]
        t, r, s = _triple(instance_rng(seed, k), fam.T)
        res = check_modified_semigroup(fam, t, r, s)
        comp, ident, comm = res.relative
        tag = f"{fam.name}"
        out.add("semigroup", k, f"{tag}/composition", comp, tol)
        out.add("semigroup", k, f"{tag}/identity", ident, tol)
        out.add("semigroup", k, f"{tag}/commutation", comm, tol)
        if inverse:
            out.add("semigroup", k, f"{tag}/inverse_relation",
                    inverse_relation_residual(fam, t, s), tol)
    pos = list(positive_families().values())
    for k in range(kappa_zero):
        fam = pos[k % len(pos)]
        t, r, s = _triple(instance_rng(seed, 10_000 + k), fam.T)
        comp, _, _ = check_modified_semigroup(fam, t, r, s, kappa=0.0).relative
        out.add("semigroup", triples + k, f"{fam.name}/kappa0_composition", comp, tol_zero)
    return out


def run_structure(seed, dim=3, kappa_policy=2.0, partitions=(2, 3, 4, 6), kappa_zero=True,
                  tol=1e-8, tol_zero=1e-9):
    out = Outcome()
    k = 0
    fams = list(shipped_families(seed, dim).values())
    for f in fams:
        f.policy = float(kappa_policy)
        for n in partitions:
            pts = np.linspace(-0.9 * f.T, 0.9 * f.T, n + 2)
            out.add("structure", k, f"{f.name}/n={n}", structure_decomposition(f, pts), tol)
            k += 1
    if kappa_zero:
        for f in positive_families().values():
            pts = np.linspace(-0.9 * f.T, 0.9 * f.T, 5)
            out.add("structure", k, f"{f.name}/kappa0/n=3",
                    structure_decomposition(f, pts, kappa=0.0), tol_zero)
            k += 1
    return out


def run_recovery(seed, times=(-0.5, 0.1, 0.4, 0.7), h=1e-3, tol=1e-5, ratio_band=0.5):
    """Generator recovery on constant and separable families, plus the step-halving order."""
    out = Outcome()
    fams = shipped_families(seed)
    fams = [fams["rotation"], fams["cos-damped"],
            EvolutionFamily(GeneratorSpec("separable", np.diag([2.0, 3.0]), "cos"),
                            name="cos-diag")]
    k = 0
    for f in fams:
        for t in times:
            a = f.spec.generator(t)
            err = opnorm(recover_generator(f, t, 0.0, h) - a) / opnorm(a)
            out.add("recovery", k, f"{f.name}/t={t:g}/relative_error", err, tol)
            k += 1
        a = f.spec.generator(0.4)
        errs = [opnorm(recover_generator(f, 0.4, 0.0, hh, richardson=False) - a)
                for hh in (1e-2, 5e-3, 2.5e-3)]
        for j in range(2):
            out.add("recovery", k, f"{f.name}/halving_ratio_{j}_minus_4",
                    abs(errs[j] / errs[j + 1] - 4.0), ratio_band)
            k += 1
    return out


# ---------------------------------------------------------------- cauchy

def _smooth_source(t):
    return np.array([np.cos(t), 0.5 * np.sin(2 * t)])


def _holder_source(t):
    return np.sqrt(abs(t)) * np.array([1.0, 0.5])


def run_cauchy(seed, grid_points=11, quad_nodes=32, t_end=1.0, holder_step=1e-3,
               tol_aut=1e-7, tol_smooth=1e-6, tol_holder=1e-4, tol_mild=1e-10,
               tol_linear=1e-10):
    out = Outcome()
    grid = np.linspace(0.0, t_end, grid_points)
    k = 0
    fams = shipped_families(seed)
    for name, f in fams.items():
        u0 = instance_rng(seed, k).standard_normal(f.dim)
        p = CauchyProblem(f, u0, 0.0)
        a, b = solve_autonomous(p, grid), rk4_oracle(p, grid)
        err = max(_rel(x, y) for x, y in zip(a.states, b.states))
        out.add("cauchy", k, f"{name}/autonomous_vs_rk4", err, tol_aut)
        out.fields[f"cauchy_{name}_power_series"] = a
        k += 1

    rot = fams["rotation"]
    coarse = np.linspace(0.0, t_end, 6)
    fine = np.linspace(0.0, t_end, int(round(t_end / holder_step)) + 1)
    cases = [("smooth", _smooth_source, (2.0, 1.0), tol_smooth),
             ("holder", _holder_source, (1.2, 0.5), tol_holder)]
    for label, src, holder, tol in cases:
        p = CauchyProblem(rot, [1.0, 0.0], 0.0, src, holder)
        d = solve_nonautonomous(p, coarse, quad_nodes)
        r = rk4_oracle(p, fine)
        err = max(_rel(d.at(t), r.at(t)) for t in coarse)
        out.add("cauchy", k, f"{label}/duhamel_vs_rk4", err, tol)
        out.fields[f"cauchy_{label}_duhamel"] = d
        k += 1
        mp = mild_decomposition(p, coarse[-1], quad_nodes, grid=coarse)
        out.add("cauchy", k, f"{label}/mild_reassembly", _rel(mp.assembled, d.states[-1]), tol_mild)
        k += 1

    # superposition in (u_s, f)
    rng = instance_rng(seed, k)
    u1, u2 = rng.standard_normal(2), rng.standard_normal(2)
    al, be = 0.7, -1.3
    f1, f2 = _smooth_source, lambda t: np.array([t ** 2, 1.0 - t])
    mix = lambda t: al * f1(t) + be * f2(t)
    sols = [solve_nonautonomous(CauchyProblem(rot, u, 0.0, f, (10.0, 0.9)), coarse, quad_nodes)
            for u, f in ((u1, f1), (u2, f2), (al * u1 + be * u2, mix))]
    lin = max(_rel(c, al * a + be * b) for a, b, c in zip(*(s.states for s in sols)))
    out.add("cauchy", k, "superposition", lin, tol_linear)
    k += 1

    probe = holomorphy_probe(rot, 0.5, 0.0, 3)
    for n, v in enumerate(probe, 1):
        out.add("cauchy", k, f"holomorphy/order_{n}", v, 0.0, expect="info")
        k += 1
    ratios = [probe[j + 1] / probe[j] for j in range(len(probe) - 1)]
    out.add("cauchy", k, "holomorphy/max_growth_ratio", max(ratios), 10.0)
    return out


# ------------------------------------------------------ heat and burgers

def burgers_records(seed, n=64, mu=1.0, length=2 * np.pi, t=0.5, dt=0.1, halvings=3,
                    profiles=("constant-plus-mode", "gaussian-bump"), ratio_band=0.5):
    out = Outcome()
    setup = HeatSetup(mu, n, length)
    k = 0
    for name in profiles:
        offset = 2.0 if name == "gaussian-bump" else 0.0
        u0 = profile(name, n, length, offset)
        res = []
        for j in range(halvings + 1):
            step = dt / 2 ** j
            trace = [cole_hopf(setup, heat_evolve_t(setup, u0, t + m * step)) for m in (-1, 0, 1)]
            res.append(burgers_residual(mu, trace, step))
            out.add("colehopf", k, f"{name}/burgers_residual_dt={step:g}", res[-1], 0.0,
                    expect="info")
            k += 1
        for j in range(halvings):
            out.add("colehopf", k, f"{name}/richardson_ratio_{j}_minus_4",
                    abs(res[j] / res[j + 1] - 4.0), ratio_band)
            k += 1
        out.fields[f"colehopf_{name}_psi"] = cole_hopf(setup, heat_evolve_t(setup, u0, t)).psi
    const = [cole_hopf(setup, setup.field(np.full(n, 1.5))) for _ in range(3)]
    out.add("colehopf", k, "constant/burgers_residual", burgers_residual(mu, const, dt), 1e-14)
    return out


def resolvent_records(seed, lambdas=20, sources=10, n=64, length=8.0, mu=2.0, tol=1e-10):
    out = Outcome()
    rng = instance_rng(seed, 0)
    re = np.geomspace(0.1, 10.0, lambdas)
    im = rng.uniform(-5, 5, lambdas)
    k = 0
    for lam in re + 1j * im:
        for j in range(sources):
            g = instance_rng(seed, 1 + j)
            f = Field1D(g.standard_normal(n) + 1j * g.standard_normal(n), length)
            out.add("resolvent", k, f"lambda={lam:.4g}/ratio_times_re",
                    resolvent_bound_probe(mu, lam, f) * lam.real, 1.0 + tol)
            k += 1
    return out


def fractional_records(seed, n=64, length=8.0, mus=(0.5, 1.0, 2.0), tol=1e-10):
    out = Outcome()
    for k, mu in enumerate(mus):
        g = instance_rng(seed, k)
        f = Field1D(g.standard_normal(n) + 1j * g.standard_normal(n), length)
        twice = fractional_power_apply(mu, 0.5, fractional_power_apply(mu, 0.5, f)).to_fourier()
        full = derivative_apply(mu, f).to_fourier()
        scale = np.maximum(np.abs(full.values), np.abs(f.to_fourier().values))
        per_mode = np.abs(twice.values - full.values) / np.where(scale > 0, scale, 1.0)
        out.add("fractional", k, f"mu={mu:g}/half_twice_vs_derivative_per_mode",
                float(np.max(per_mode)), tol)
    return out


def run_colehopf(seed, n=64, mu=1.0, t=0.5, dt=0.1, halvings=3, lambdas=20, sources=10):
    out = burgers_records(seed, n, mu, t=t, dt=dt, halvings=halvings)
    out.extend(resolvent_records(seed, lambdas, sources))
    out.extend(fractional_records(seed))
    setup = HeatSetup(mu, n, 2 * np.pi)
    x = setup.grid
    w = miura_compose(setup.field(2 + 0.1 * np.cos(x)))
    ref = -0.1 * np.cos(x) / (2 + 0.1 * np.cos(x))
    out.add("colehopf", 10_000, "miura/closed_form", float(np.max(np.abs(w.values - ref))), 1e-10)
    out.fields["miura_w"] = w
    return out


def run_direction_swap(seed, n=128, mu=1.0, length=8.0, delta_fraction=0.05, x0=0.3, modes=6,
                       tol=1e-5, tol_identity=1e-12):
    """Sideways propagation of boundary data against a closed-form ``t``-periodic solution."""
    out = Outcome()
    rng = instance_rng(seed, 0)
    ks = np.arange(-modes, modes + 1)
    omegas = 2 * np.pi * ks / length
    amps = (rng.standard_normal(ks.size) + 1j * rng.standard_normal(ks.size)) * np.exp(-0.3 * np.abs(ks))
    mean = tuple(rng.standard_normal(2))
    setup = HeatSetup(mu, n, length, "x-evolution")
    ts = setup.grid
    delta = delta_fraction * length
    v0, v1 = decaying_waves(mu, ts, x0, amps, omegas, mean)
    truth_u, truth_ux = decaying_waves(mu, ts, x0 + delta, amps, omegas, mean)
    res = heat_evolve_x(setup, setup.field(v0), setup.field(v1), delta)
    out.add("direction-swap", 0, "u_relative", _rel(res.u.values, truth_u), tol)
    out.add("direction-swap", 1, "ux_relative", _rel(res.ux.values, truth_ux), tol)
    out.add("direction-swap", 2, "omega_cap", res.omega_cap, 0.0, expect="info")
    out.add("direction-swap", 3, "truncated_modes", res.truncated, 0.0, expect="info")
    zero = heat_evolve_x(setup, setup.field(v0), setup.field(v1), 0.0)
    ident = max(_rel(zero.u.values, v0), _rel(zero.ux.values, v1))
    out.add("direction-swap", 4, "x0_identity", ident, tol_identity)
    # the truth solves the heat equation: check its symbol relation per mode
    lam = sideways_symbol(mu, omegas)
    out.add("direction-swap", 5, "truth_symbol_defect",
            float(np.max(np.abs(lam ** 2 - 1j * np.sqrt(mu) * omegas))), 1e-12)
    out.fields["direction_swap_u"] = res.u
    out.fields["direction_swap_truth"] = setup.field(truth_u)
    return out


# --------------------------------------------------------- module props

def run_module_props(seed, instances=200, unsafe=10, dim_min=2, dim_max=6, tol=1e-8):
    out = Outcome()
    for k in range(instances):
        rng = instance_rng(seed, k)
        ident = SUM_IDENTITIES[k % len(SUM_IDENTITIES)]
        inst = random_sum_instance(rng, ident, int(rng.integers(dim_min, dim_max + 1)))
        out.add("module-props", k, f"{inst.identity}/residual", inst.residual, tol)
    caught = 0
    for j in range(unsafe):
        rng = instance_rng(seed, instances + j)
        inst = random_unsafe_instance(rng, int(rng.integers(dim_min, dim_max + 1)))
        out.add("module-props", instances + j, f"{inst.identity}/residual", inst.residual, tol,
                expect="fail")
        caught += (not inst.branch_safe) and inst.residual > tol
    out.add("module-props", instances + unsafe, "unsafe_shortfall", max(0, unsafe - caught), 0)
    return out


# -------------------------------------------------------------- rotation

def rotation_algebra_records(ell_max=20, hbar=1.0, tol=1e-12):
    out = Outcome()
    ells = np.arange(0, 2 * ell_max + 1) / 2
    for k, ell in enumerate(ells):
        rep = build_spin_rep(ell, hbar)
        out.add("rotation", k, f"ell={ell:g}/commutator", max(rep.commutator_residuals().values()), tol)
        casimir = rep.casimir_residual() / max(1.0, hbar ** 2 * ell * (ell + 1))
        out.add("rotation", k, f"ell={ell:g}/casimir", casimir, tol)
        out.add("rotation", k, f"ell={ell:g}/hermitian", rep.hermitian_residual(), tol)
    return out


def rotation_log_records(ells=(0.5, 1.0, 1.5, 2.0, 3.0), angles=(0.3, 1.0, 2.5),
                         kappa_policy=2.0, tol_series=1e-10, tol_gen=1e-5, hbar=1.0):
    out = Outcome()
    k = 0
    for ell in ells:
        rep = build_spin_rep(ell, hbar)
        for axis in AXES:
            for angle in angles:
                rot = RotationOp(rep, axis, angle, 0.0)
                tag = f"ell={ell:g}/{axis}/angle={angle:g}"
                out.add("rotation", k, f"{tag}/unitarity", rot.unitarity_residual(), 1e-12)
                v, terms = collective_renormalization(rot, kappa_policy=kappa_policy)
                out.add("rotation", k, f"{tag}/series_reconstruction", opnorm(v - rot.v), tol_series)
                out.add("rotation", k, f"{tag}/series_terms", terms, 0.0, expect="info")
                _, gen = rotation_log_rep(rot, kappa_policy)
                err = opnorm(gen - rot.generator) / max(opnorm(rot.generator), 1e-300)
                out.add("rotation", k, f"{tag}/generator_reconstruction", err, tol_gen)
                k += 1
        small = RotationOp(rep, "z", 0.5 / max(ell, 0.5), 0.0)
        v, _ = collective_renormalization(small, kappa=0.0)
        out.add("rotation", k, f"ell={ell:g}/kappa0_series", opnorm(v - small.v), tol_series)
        k += 1
    rep = build_spin_rep(1.0, hbar)
    for i, j in (("x", "y"), ("y", "z"), ("z", "x")):
        for kappa in (0.0, 2.0):
            out.add("rotation", k, f"regrouping/{i}{j}/kappa={kappa:g}",
                    sum_decomposition_check(rep, i, j, 0.2, 0.0, kappa), 1e-10)
            k += 1
    return out


def run_rotation(seed, ell=1.0, axis="x", angle=1.0, kappa_policy=2.0, ell_max=20, hbar=1.0):
    out = rotation_algebra_records(ell_max, hbar)
    if axis not in AXES:
        raise ValueError(f"axis must be one of {AXES}")
    rep = build_spin_rep(ell, hbar)
    rot = RotationOp(rep, axis, float(angle), 0.0)
    tag = f"ell={ell:g}/{axis}/angle={angle:g}"
    out.add("rotation", 0, f"{tag}/unitarity", rot.unitarity_residual(), 1e-12)
    v, terms = collective_renormalization(rot, kappa_policy=kappa_policy)
    out.add("rotation", 0, f"{tag}/series_reconstruction", opnorm(v - rot.v), 1e-10)
    out.add("rotation", 0, f"{tag}/series_terms", terms, 0.0, expect="info")
    _, gen = rotation_log_rep(rot, kappa_policy)
    err = opnorm(gen - rot.generator) / max(opnorm(rot.generator), 1e-300)
    out.add("rotation", 0, f"{tag}/generator_reconstruction", err, 1e-5)
    return out


# ------------------------------------------------------------ acceptance

def _tag(outcome, criterion):
    for i, rec in enumerate(outcome.records):
        outcome.records[i] = type(rec)(f"c{criterion:02d}.{rec.experiment}", *tuple(
            getattr(rec, f) for f in ("instance", "metric", "value", "tolerance", "passed",
                                      "expect")))
    return outcome


CRITERIA = {
    1: ("operator-log oracle and refinement", lambda seed: run_logrep(seed)),
    2: ("modified semigroup identities",
        lambda seed: run_semigroup(seed, triples=50, kappa_zero=12, inverse=True)),
    3: ("structure decomposition", lambda seed: run_structure(seed)),
    4: ("generator recovery", lambda seed: run_recovery(seed)),
    5: ("cauchy solvers", lambda seed: run_cauchy(seed)),
    6: ("resolvent bound", lambda seed: resolvent_records(seed)),
    7: ("direction swap", lambda seed: run_direction_swap(seed)),
    8: ("cole-hopf second order", lambda seed: burgers_records(seed)),
    9: ("fractional power", lambda seed: fractional_records(seed)),
    10: ("module closure", lambda seed: run_module_props(seed)),
    11: ("rotation group", lambda seed: rotation_algebra_records().extend(rotation_log_records())),
}


def run_criterion(number, seed):
    return _tag(CRITERIA[number][1](seed), number)


def run_acceptance(seed):
    out = Outcome()
    for number in sorted(CRITERIA):
        out.extend(run_criterion(number, seed))
    return out


PARAMS = {
    "logrep": dict(instances=100, dim_min=2, dim_max=16, nodes=256, kappa_policy=2.0),
    "semigroup": dict(dim=3, kappa_policy=2.0, triples=50),
    "structure": dict(dim=3, kappa_policy=2.0, partitions=[2, 3, 4, 6]),
    "cauchy": dict(grid_points=11, quad_nodes=32, t_end=1.0, holder_step=1e-3),
    "colehopf": dict(n=64, mu=1.0, t=0.5, dt=0.1, halvings=3, lambdas=20, sources=10),
    "direction-swap": dict(n=128, mu=1.0, length=8.0, delta_fraction=0.05, x0=0.3, modes=6),
    "module-props": dict(instances=200, unsafe=10, dim_min=2, dim_max=6),
    "rotation": dict(ell=1.0, axis="x", angle=1.0, kappa_policy=2.0, ell_max=20, hbar=1.0),
    "acceptance": dict(),
}

RUNNERS = {
    "logrep": run_logrep,
    "semigroup": run_semigroup,
    "structure": run_structure,
    "cauchy": run_cauchy,
    "colehopf": run_colehopf,
    "direction-swap": run_direction_swap,
    "module-props": run_module_props,
    "rotation": run_rotation,
    "acceptance": run_acceptance,
}


def run(experiment, seed, params=None):
    if experiment not in RUNNERS:
        raise KeyError(f"unknown experiment {experiment!r}")
    params = dict(params or {})
    unknown = set(params) - set(PARAMS[experiment])
    if unknown:
        raise KeyError(f"unknown parameters for {experiment}: {sorted(unknown)}")
    if "partitions" in params:
        params["partitions"] = tuple(int(x) for x in params["partitions"])
    return RUNNERS[experiment](seed, **params)
