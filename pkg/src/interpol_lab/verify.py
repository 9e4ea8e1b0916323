"""The named acceptance suites, runnable from pytest or the CLI.

Each suite returns a :class:`CheckReport` whose ``passed`` flag is the
verdict at the stated tolerances; sizes default to the full battery and can
be shrunk through :class:`VerifySizes` for quick runs.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .annulus import (
    AnnulusPoint,
    LaurentElement,
    PseudolatticeCouple,
    cancel_divide,
    delta_constant,
    evaluate,
    evaluate_derivative,
    j_norm,
    kernel_distance_probe,
    project_to_zero,
    random_laurent,
    rotate,
)
from .functors import (
    FunctorFamily,
    QuadratureConfig,
    delta_condition_check,
    real_norm,
    trivial_couple_constant,
)
from .lattice import (
    calderon_reiteration_check,
    composite_propagation_check,
    cwikel_nilsson_check,
    order_iso_sweep,
    power_inequality_check,
)
from .operators import CoupleOperator, resolvent_profile, spectrum
from .report import CheckReport
from .sampling import (
    random_couple,
    random_endomorphism_instance,
    random_invertible_instance,
    random_monomial_instance,
    random_positive_instance,
    random_vector,
)
from .spaces import (
    INF,
    BanachCouple,
    WeightedSpace,
    k_closed_form_l1,
    k_closed_form_linf,
    k_functional,
    magnitude_pnorm,
)
from .stability import AnalyticSolverConfig, solve_analytic_equation, sweep

E = math.e


@dataclass(frozen=True)
class VerifySizes:
    cancellation_samples: int = 1000
    distance_samples_per_pair: int = 200
    rotation_samples: int = 500
    radius_operators: int = 100
    theta_step: float = 0.01
    kfunctional_cases: int = 100
    delta_couples: int = 100
    reiteration_draws: int = 100
    spectrum_operators: int = 10
    power_instances: int = 1000
    order_iso_operators: int = 50
    cn_cases: int = 100
    composite_instances: int = 20

    @classmethod
    def quick(cls) -> "VerifySizes":
        return cls(
            cancellation_samples=60,
            distance_samples_per_pair=10,
            rotation_samples=40,
            radius_operators=8,
            theta_step=0.05,
            kfunctional_cases=12,
            delta_couples=6,
            reiteration_draws=12,
            spectrum_operators=3,
            power_instances=60,
            order_iso_operators=6,
            cn_cases=10,
            composite_instances=3,
        )


# ---------------------------------------------------------------- suite 1


def cancellation_suite(seed: int = 42, samples: int = 1000) -> CheckReport:
    """Division bound, division identity, and quotient value at s."""
    rng = np.random.default_rng(seed)
    points = [AnnulusPoint(math.exp(0.3)), AnnulusPoint(cmath.exp(0.5 + 0.4j)), AnnulusPoint(1.1)]
    qs = [1.0, 2.0, INF]
    failures = 0
    worst_norm_ratio = 0.0
    worst_identity = 0.0
    worst_derivative = 0.0
    zring = [1.3 * cmath.exp(2j * math.pi * k / 16) for k in range(8)]
    zring += [2.2 * cmath.exp(2j * math.pi * k / 16) for k in range(8)]
    for i in range(samples):
        s = points[i % 3]
        P = PseudolatticeCouple(qs[i % 3], qs[(i // 3) % 3])
        B = random_couple(rng, dim=2, dims=(2, 2), weight_span=2.0)
        f = project_to_zero(random_laurent(rng, 2, -4, 4), s)
        jf = j_norm(f, P, B)
        g = cancel_divide(f, s)
        jg = j_norm(g, P, B)
        ok = jg <= delta_constant(s) * jf * (1.0 + 1e-12)
        worst_norm_ratio = max(worst_norm_ratio, jg / (delta_constant(s) * jf))
        for z in zring:
            resid = np.linalg.norm(
                (z - s.value) * evaluate(g, z) - evaluate(f, z)
            )
            worst_identity = max(worst_identity, resid / jf)
            ok = ok and resid <= 1e-9 * jf
        dresid = np.linalg.norm(evaluate(g, s.value) - evaluate_derivative(f, s.value))
        worst_derivative = max(worst_derivative, dresid)
        ok = ok and dresid <= 1e-9 * max(1.0, jf)
        if not ok:
            failures += 1
    return CheckReport(
        "cancellation-suite",
        failures == 0,
        {
            "samples": samples,
            "failures": failures,
            "worst_norm_ratio": worst_norm_ratio,
            "worst_identity_residual": worst_identity,
            "worst_derivative_residual": worst_derivative,
        },
    )


# ---------------------------------------------------------------- suite 2


def distance_suite(seed: int = 42, samples_per_pair: int = 200) -> CheckReport:
    """Constructive transport certificates at three separations."""
    rng = np.random.default_rng(seed)
    s = AnnulusPoint(math.exp(0.5))
    B = BanachCouple(
        WeightedSpace(2.0, np.exp(rng.uniform(-1.5, 1.5, 2))),
        WeightedSpace(2.0, np.exp(rng.uniform(-1.5, 1.5, 2))),
    )
    P = PseudolatticeCouple(INF, INF)
    sub = []
    passed = True
    for k, sep in enumerate((0.01, 0.05, 0.1)):
        omega = AnnulusPoint(s.value + sep * cmath.exp(0.7j))
        rep = kernel_distance_probe(
            P, B, s, omega, sample_count=samples_per_pair, seed=seed + k, slack=1e-8
        )
        passed = passed and rep.passed
        sub.append(
            {
                "separation": sep,
                "empirical": rep.details["empirical_distance_lower_estimate"],
                "bound": rep.details["delta_times_sep"],
                "passed": rep.passed,
            }
        )
    return CheckReport("distance-suite", passed, {"pairs": sub})


# ---------------------------------------------------------------- suite 3


def rotation_suite(seed: int = 42, samples: int = 500) -> CheckReport:
    rng = np.random.default_rng(seed)
    taus = [0.1, math.pi / 2, math.pi, 5.0]
    worst = 0.0
    for i in range(samples):
        B = random_couple(rng, dim=2, dims=(2, 2), weight_span=2.0)
        P = PseudolatticeCouple(
            [1.0, 2.0, INF][i % 3], [1.0, 2.0, INF][(i + 1) % 3]
        )
        b = random_laurent(rng, 2, -4, 4)
        base = j_norm(b, P, B)
        for tau in taus:
            r = j_norm(rotate(b, tau), P, B)
            worst = max(worst, abs(r - base) / max(base, 1e-300))
    return CheckReport(
        "rotation-isometry", worst <= 1e-14, {"samples": samples, "worst_reldev": worst}
    )


# ---------------------------------------------------------------- suite 4


def radius_factor2_suite(
    seed: int = 42, operators: int = 100, theta_step: float = 0.01
) -> CheckReport:
    rng = np.random.default_rng(seed)
    grid = np.arange(theta_step, 1.0, theta_step)
    grid = grid[(grid > 0) & (grid < 1)]
    families = [
        FunctorFamily("calderon"),
        FunctorFamily("real", 1.0),
        FunctorFamily("real", 2.0),
        FunctorFamily("real", INF),
    ]
    failures = 0
    worst_ratio = 0.0
    for _ in range(operators):
        T = random_invertible_instance(rng, dims=(2, 6), weight_span=4.0)
        for fam in families:
            rep = sweep(T, fam, grid, slack=1e-6)
            for v in rep.verdicts:
                if v.name == "FACTOR2":
                    worst_ratio = max(worst_ratio, v.details["worst_ratio"])
                if not v.passed:
                    failures += 1
    return CheckReport(
        "radius-factor2",
        failures == 0,
        {
            "operators": operators,
            "families": [f.label() for f in families],
            "failures": failures,
            "worst_factor2_ratio": worst_ratio,
        },
    )


# ---------------------------------------------------------------- suite 5


def quadrature_suite() -> CheckReport:
    X = WeightedSpace(1.0, np.ones(2))
    C = BanachCouple(X, X)
    x = [1.0, 0.0]
    passed = True
    worst_width = 0.0
    for theta in (0.1, 0.5, 0.9):
        for q in (1.0, 2.0):
            b = real_norm(x, C, theta, q, rtol=1e-6)
            expected = trivial_couple_constant(theta, q)
            passed = passed and b.contains(expected, slack=1e-9)
            passed = passed and b.relative_width < 1e-6
            worst_width = max(worst_width, b.relative_width)
        b = real_norm(x, C, theta, INF)
        passed = passed and b.contains(1.0, slack=1e-12)
    return CheckReport(
        "quadrature-closed-form", passed, {"worst_relative_width": worst_width}
    )


# ---------------------------------------------------------------- suite 6


def _grid_k(t, x, couple, stages=8, pts=25, margin=3):
    """Independent zooming grid search over coordinatewise shrinkages."""
    m = np.abs(np.asarray(x, dtype=complex))
    d = m.size
    w0, p0 = couple.space0.weights, couple.space0.p
    w1, p1 = couple.space1.weights, couple.space1.p

    def pnorm(vals, w, p):
        wy = w * vals
        if p == INF:
            return np.max(wy, axis=-1)
        return np.sum(wy**p, axis=-1) ** (1.0 / p)

    lo = np.zeros(d)
    hi = np.ones(d)
    best = math.inf
    for _ in range(stages):
        axes = [np.linspace(lo[i], hi[i], pts) for i in range(d)]
        grid = np.array(list(itertools.product(*axes)))
        vals = pnorm(grid * m, w0, p0) + t * pnorm((1.0 - grid) * m, w1, p1)
        k = int(np.argmin(vals))
        best = min(best, float(vals[k]))
        h = (hi - lo) / (pts - 1)
        lo = np.maximum(0.0, grid[k] - margin * h)
        hi = np.minimum(1.0, grid[k] + margin * h)
    return best


def kfunctional_suite(seed: int = 42, cases: int = 100) -> CheckReport:
    rng = np.random.default_rng(seed)
    ps = [1.0, 1.5, 2.0, 4.0, INF]
    worst_oracle = 0.0
    worst_closed = 0.0
    failures = 0
    for i in range(cases):
        d = int(rng.integers(1, 4))
        p0 = ps[i % 5]
        p1 = ps[int(rng.integers(0, 5))]
        C = BanachCouple(
            WeightedSpace(p0, np.exp(rng.uniform(-1.5, 1.5, d))),
            WeightedSpace(p1, np.exp(rng.uniform(-1.5, 1.5, d))),
        )
        x = random_vector(rng, d)
        t = float(np.exp(rng.uniform(-2.0, 2.0)))
        ev = k_functional(t, x, C, tol=1e-8)
        oracle = _grid_k(t, x, C)
        dev = abs(ev.upper - oracle)
        worst_oracle = max(worst_oracle, dev)
        if dev > 1e-4 * max(1.0, oracle):
            failures += 1
    # closed-form agreement at matching exponents
    for i in range(cases // 2):
        d = int(rng.integers(1, 4))
        w0 = np.exp(rng.uniform(-1.5, 1.5, d))
        w1 = np.exp(rng.uniform(-1.5, 1.5, d))
        x = random_vector(rng, d)
        t = float(np.exp(rng.uniform(-2.0, 2.0)))
        C1 = BanachCouple(WeightedSpace(1.0, w0), WeightedSpace(1.0, w1))
        dev1 = abs(k_functional(t, x, C1).value - k_closed_form_l1(t, x, C1))
        Ci = BanachCouple(WeightedSpace(INF, w0), WeightedSpace(INF, w1))
        devi = abs(k_functional(t, x, Ci).value - k_closed_form_linf(t, x, Ci))
        worst_closed = max(worst_closed, dev1, devi)
        if dev1 > 1e-10 or devi > 1e-10:
            failures += 1
    return CheckReport(
        "kfunctional-oracle",
        failures == 0,
        {
            "cases": cases,
            "worst_oracle_deviation": worst_oracle,
            "worst_closed_form_deviation": worst_closed,
            "failures": failures,
        },
    )


# ---------------------------------------------------------------- suite 7


def delta_suite(seed: int = 42, couples: int = 100) -> CheckReport:
    rng = np.random.default_rng(seed)
    qs = [1.0, 2.0, INF]
    failures = 0
    worst = {"factor2": 0.0, "window": 0.0, "logconvex": 0.0}
    for i in range(couples):
        C = random_couple(rng, dims=(1, 6), weight_span=3.0)
        theta0 = float(rng.uniform(0.08, 0.45))
        theta1 = float(rng.uniform(theta0 + 0.15, 0.95))
        samples = [random_vector(rng, C.dim) for _ in range(2)]
        fam = FunctorFamily("real", qs[i % 3])
        rep = delta_condition_check(C, theta0, theta1, fam, samples, grid_count=3)
        if not rep.passed:
            failures += 1
        for k in ("factor2", "window"):
            worst[k] = max(worst[k], rep.details["worst_ratios"][k])
        repc = delta_condition_check(
            C, theta0, theta1, FunctorFamily("calderon"), samples, grid_count=3
        )
        if not repc.passed:
            failures += 1
        worst["logconvex"] = max(worst["logconvex"], repc.details["worst_ratios"]["logconvex"])
    return CheckReport(
        "delta-condition",
        failures == 0,
        {"couples": couples, "failures": failures, "worst_ratios": worst},
    )


# ---------------------------------------------------------------- suite 8


def reiteration_suite(seed: int = 42, draws: int = 100) -> CheckReport:
    rng = np.random.default_rng(seed)
    failures = 0
    worst = 0.0
    for _ in range(draws):
        C = random_couple(rng, dims=(1, 6), weight_span=3.0)
        theta0, theta1, lam = rng.uniform(0.05, 0.95, 3)
        rep = calderon_reiteration_check(C, float(theta0), float(theta1), float(lam))
        worst = max(worst, rep.details["max_weight_reldev"])
        if not rep.passed:
            failures += 1
    return CheckReport(
        "calderon-reiteration-suite",
        failures == 0,
        {"draws": draws, "failures": failures, "worst_weight_reldev": worst},
    )


# ---------------------------------------------------------------- suite 9


def shear_instance(p: float = 2.0) -> CoupleOperator:
    dom = BanachCouple(
        WeightedSpace(p, [1.0, 1.0]), WeightedSpace(p, [math.e**4, math.e**-4])
    )
    return CoupleOperator(np.array([[1.0, 1.0], [0.0, 1.0]]), dom, dom)


def analytic_suite() -> CheckReport:
    T = shear_instance()
    s = AnnulusPoint(math.exp(0.5))
    omega = s.value * cmath.exp(0.02)
    y = np.array([1.0, 1.0])
    k = LaurentElement(1, y[None, :])
    rep = solve_analytic_equation(
        T, k, s, AnalyticSolverConfig(max_terms=30, targets=(omega,))
    )
    target = rep.targets[0]
    nonconstant_ok = min(target.residuals) <= 1e-10

    omegas = tuple(s.value * cmath.exp(z) for z in (0.02, -0.02, 0.02j, -0.015j, 0.01 + 0.01j))
    kc = LaurentElement.constant(y)
    repc = solve_analytic_equation(
        T, kc, s, AnalyticSolverConfig(max_terms=10, targets=omegas)
    )
    finals = np.stack([t.final_gtilde for t in repc.targets])
    spread = float(np.max(np.abs(finals - finals[0])))
    expected = np.linalg.solve(T.matrix, y)
    const_ok = spread <= 1e-9 and bool(np.all(np.abs(finals[0] - expected) <= 1e-9))
    return CheckReport(
        "analytic-equation",
        nonconstant_ok and const_ok,
        {
            "residual_at_30_terms": target.residuals[-1],
            "best_residual": min(target.residuals),
            "constant_k_spread": spread,
            "rho_measured": rep.rho_measured,
        },
    )


# ---------------------------------------------------------------- suite 10


def spectrum_suite(seed: int = 42, operators: int = 10) -> CheckReport:
    rng = np.random.default_rng(seed)
    failures = 0
    worst_match = 0.0
    worst_resolvent_margin = math.inf
    thetas = [0.1, 0.5, 0.9]
    for _ in range(operators):
        T = random_endomorphism_instance(rng, dims=(2, 5), ps=(2.0,), weight_span=2.0)
        base = spectrum(T)
        # eigenvalues recomputed through the theta-space weight similarity
        for th in thetas:
            w_dom = T.domain.space0.weights ** (1 - th) * T.domain.space1.weights**th
            M_th = np.diag(w_dom) @ T.matrix @ np.diag(1.0 / w_dom)
            eig = np.linalg.eigvals(M_th)
            eig = eig[np.lexsort((eig.imag, eig.real))]
            dev = float(np.max(np.abs(eig - base)))
            worst_match = max(worst_match, dev)
            if dev > 1e-10 * max(1.0, float(np.max(np.abs(base)))):
                failures += 1
        lams = [base[0] + 0.5 + 0.5j, 3.0 + 1.0j, -2.0]
        for fam in (FunctorFamily("real", 2.0), FunctorFamily("calderon")):
            prof = resolvent_profile(T, lams, thetas, fam)
            for i, lam in enumerate(lams):
                dist = float(np.min(np.abs(base - lam)))
                for kk in range(len(thetas)):
                    if prof.infinite[i, kk]:
                        continue
                    margin = prof.upper[i, kk] * dist
                    worst_resolvent_margin = min(worst_resolvent_margin, margin)
                    if prof.upper[i, kk] < (1.0 / dist) * (1.0 - 1e-9):
                        failures += 1
    return CheckReport(
        "spectrum-invariance",
        failures == 0,
        {
            "operators": operators,
            "worst_multiset_deviation": worst_match,
            "min_resolvent_margin": worst_resolvent_margin,
            "failures": failures,
        },
    )


# ---------------------------------------------------------------- suite 11


def lattice_suite(
    seed: int = 42,
    power_instances: int = 1000,
    order_iso_operators: int = 50,
    cn_cases: int = 100,
    composite_instances: int = 20,
) -> CheckReport:
    rng = np.random.default_rng(seed)
    failures = {"power": 0, "order_iso": 0, "cn": 0, "composite": 0}
    for _ in range(power_instances):
        d = int(rng.integers(1, 5))
        P = rng.uniform(0.0, 3.0, (d, d))
        x, y = rng.uniform(0.0, 4.0, d), rng.uniform(0.0, 4.0, d)
        theta = float(rng.uniform(0.0, 1.0))
        if not power_inequality_check(P, x, y, theta).passed:
            failures["power"] += 1
    for _ in range(order_iso_operators):
        T = random_positive_instance(rng)
        theta0 = float(rng.uniform(0.15, 0.85))
        grid = np.arange(0.1, 1.0, 0.1)
        if not order_iso_sweep(T, theta0, grid, seed=seed).passed:
            failures["order_iso"] += 1
    for _ in range(cn_cases):
        C = random_couple(rng, dims=(1, 4), weight_span=2.0)
        theta = float(rng.uniform(0.1, 0.9))
        alpha = float(rng.uniform(0.1, 0.9))
        fs = [random_vector(rng, C.dim) for _ in range(2)]
        gs = [np.abs(random_vector(rng, C.dim)) + 1e-3 for _ in range(3)]
        if not cwikel_nilsson_check(C, theta, alpha, fs, gs).passed:
            failures["cn"] += 1
    for _ in range(composite_instances):
        T = random_monomial_instance(rng)
        theta_star = float(rng.uniform(0.2, 0.8))
        if not composite_propagation_check(T, theta_star, np.arange(0.1, 1.0, 0.2), seed=seed).passed:
            failures["composite"] += 1
    return CheckReport(
        "lattice-suite",
        all(v == 0 for v in failures.values()),
        {
            "failures": failures,
            "sizes": {
                "power": power_instances,
                "order_iso": order_iso_operators,
                "cn": cn_cases,
                "composite": composite_instances,
            },
        },
    )


# ---------------------------------------------------------------- driver


def run_all(seed: int = 42, sizes: Optional[VerifySizes] = None) -> List[CheckReport]:
    sizes = sizes or VerifySizes()
    return [
        cancellation_suite(seed, sizes.cancellation_samples),
        distance_suite(seed, sizes.distance_samples_per_pair),
        rotation_suite(seed, sizes.rotation_samples),
        radius_factor2_suite(seed, sizes.radius_operators, sizes.theta_step),
        quadrature_suite(),
        kfunctional_suite(seed, sizes.kfunctional_cases),
        delta_suite(seed, sizes.delta_couples),
        reiteration_suite(seed, sizes.reiteration_draws),
        analytic_suite(),
        spectrum_suite(seed, sizes.spectrum_operators),
        lattice_suite(
            seed,
            sizes.power_instances,
            sizes.order_iso_operators,
            sizes.cn_cases,
            sizes.composite_instances,
        ),
    ]
