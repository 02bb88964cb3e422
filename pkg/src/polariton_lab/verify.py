"""Invariant and oracle suite behind the ``verify`` subcommand.

Each check returns a :class:`CheckResult`; :func:`run_checks` runs them all and
never stops at the first failure, so a broken build reports every symptom.
"""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import dicke, fock_oracle, microscopic, quadratic, quench, two_mode
from .numerics import sym_eigen
from .two_mode import TwoModeParams

SEED = 20240611


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] {self.name}: {self.detail} ({self.seconds:.2f} s)"


def _random_stable(rng: np.random.Generator, n: int) -> list[TwoModeParams]:
    out = []
    while len(out) < n:
        wa = rng.uniform(0.5, 1.5)
        lam = rng.uniform(0.0, 0.4)
        p = TwoModeParams(
            wa, 1.0, lam, rng.uniform(0.0, 0.2), rng.uniform(0.0, 0.05), rng.uniform(-0.05, 0.05)
        )
        if p.is_stable and p.stability_margin > 1e-3:
            out.append(p)
    return out


def _random_model(rng: np.random.Generator, n: int) -> quadratic.QuadraticBosonicModel:
    while True:
        w = rng.uniform(0.5, 2.0, n)
        g = rng.uniform(-0.2, 0.2, (n, n))
        g = np.triu(g, 1)
        g = g + g.T
        s = rng.uniform(0.0, 0.05, n)
        t = rng.uniform(-0.02, 0.05, n)
        model = quadratic.QuadraticBosonicModel(w, g, s, t)
        if np.min(np.linalg.eigvalsh(quadratic.position_form(model))) > 1e-3:
            return model


def check_eigensolver(rng) -> tuple[bool, str]:
    worst = 0.0
    for n in (2, 3, 5, 8, 16, 40, 90):
        a = rng.normal(size=(n, n))
        a = a + a.T
        e, v = sym_eigen(a)
        res = np.max(np.abs(a @ v - v * e)) / max(1.0, np.max(np.abs(a)))
        orth = np.max(np.abs(v.T @ v - np.eye(n)))
        worst = max(worst, res, orth)
    return worst < 1e-10, f"max residual {worst:.2e}"


def _decomps(rng, count: int = 50):
    models = [_random_model(rng, int(rng.integers(2, 7))) for _ in range(count)]
    return [quadratic.diagonalize(m) for m in models]


def check_symplectic(rng) -> tuple[bool, str]:
    worst = max(quadratic.symplectic_residual(d) for d in _decomps(rng))
    return worst < 1e-9, f"max |S J S^+ - J| = {worst:.2e}"


def check_williamson(rng) -> tuple[bool, str]:
    worst = max(quadratic.williamson_residual(d) for d in _decomps(rng))
    return worst < 1e-9, f"max relative residual {worst:.2e}"


def check_normalization(rng) -> tuple[bool, str]:
    worst = max(float(np.max(np.abs(quadratic.mode_normalization(d) - 1))) for d in _decomps(rng))
    return worst < 1e-9, f"max |sum |mu|^2 - |nu|^2 - 1| = {worst:.2e}"


def check_bona_fide(rng) -> tuple[bool, str]:
    reports = [quadratic.vacuum_report(d) for d in _decomps(rng, 20)]
    ok = all(r.is_bona_fide() for r in reports) and all(np.all(r.populations >= 0) for r in reports)
    return ok, "moment matrices positive semidefinite" if ok else "non-physical vacuum moments"


def check_equal_population(rng) -> tuple[bool, str]:
    worst = 0.0
    for lam in np.linspace(0.008, 0.4, 50):
        for d in np.linspace(-0.5, 0.5, 50):
            n_u, n_l = two_mode.populations(TwoModeParams(1 + d, 1.0, lam, lam**2))
            worst = max(worst, abs(n_u - n_l))
    return worst <= 1e-10, f"max |n_U - n_L| under the sum rule = {worst:.2e}"


def product_rule_residuals(p: TwoModeParams) -> tuple[float, float]:
    """Relative residuals of the w_U^2 w_L^2 rule and, at D = lam^2/w_b, eta = u = 0, the w_U w_L rule."""
    w_u, w_l = two_mode.polariton_frequencies(p)
    pred = two_mode.product_rule(p)
    general = abs((w_u * w_l) ** 2 - pred) / pred
    trk = TwoModeParams(p.omega_a, p.omega_b, p.lam, p.lam**2 / p.omega_b)
    w_u, w_l = two_mode.polariton_frequencies(trk)
    pred = two_mode.trk_product_rule(trk)
    return general, abs(w_u * w_l - pred) / pred


def check_product_rules(rng) -> tuple[bool, str]:
    worst = max(max(product_rule_residuals(p)) for p in _random_stable(rng, 2000))
    return worst <= 1e-10, f"max relative residual {worst:.2e}"


def check_sign_classification(rng) -> tuple[bool, str]:
    mismatches = checked = 0
    for p in _random_stable(rng, 3000):
        p = p.replace(eta=0.0, u=0.0)
        if not p.is_stable:
            continue
        c = two_mode.classify_sign(p)
        if not c.theorem_applies:
            continue
        checked += 1
        if c.predicted_sign != two_mode.population_sign(*two_mode.populations(p)):
            mismatches += 1
    return mismatches == 0 and checked > 0, f"{mismatches} mismatches in {checked} classified points"


def check_fock_oracle(rng) -> tuple[bool, str]:
    worst = 0.0
    vac = 0.0
    for lam in (0.05, 0.15, 0.25):
        for D in (0.0, lam**2):
            p = TwoModeParams(1.0, 1.0, lam, D)
            o = fock_oracle.oracle_populations(p)
            n_u, n_l = two_mode.populations(p)
            tol = max(1e-4, o.residual)
            worst = max(worst, abs(o.n_U - n_u) / tol, abs(o.n_L - n_l) / tol)
            vac = max(vac, fock_oracle.polariton_vacuum_check(p, quadratic.diagonalize(p.to_model())))
    return worst <= 1.0 and vac <= 1e-4, f"worst error/tolerance {worst:.2e}, vacuum residual {vac:.2e}"


def check_eta_sum(rng) -> tuple[bool, str]:
    spec = microscopic.build_fabry_perot(1.0, 1.0, 0.2, 25, 5)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", microscopic.WeakDetuningWarning)
        elim = microscopic.adiabatic_eliminate(spec)
    exact = microscopic.eta_partial_sum(25) * 0.04
    lim = microscopic.richardson_limit(microscopic.eta_partial_sum, 25)
    err = abs(lim - microscopic.ETA_LIMIT_COEFF)
    ok = abs(elim.eta - exact) <= 1e-15 and err <= 1e-6
    return ok, f"eta(K=25) = {elim.eta:.10f}, extrapolation error {err:.1e}"


def check_dicke(rng) -> tuple[bool, str]:
    worst_comm, worst_e = 0.0, 0.0
    p = dicke.DickeParams.equal_population(5, 1e-4)
    row = dicke.compare_point(p)
    worst_e = max(abs(a - b) for a, b in zip(row.energies_dicke, row.energies_eff))
    for lam in (0.1, 0.25):
        row = dicke.compare_point(dicke.DickeParams.equal_population(5, lam))
        worst_comm = max(worst_comm, row.commutator)
    ok = worst_comm <= 1e-10 and worst_e <= 1e-4
    return ok, f"parity commutator {worst_comm:.1e}, weak-coupling energy mismatch {worst_e:.1e}"


def check_quench(rng) -> tuple[bool, str]:
    # coarse but complete: normalization and photon count at moderate width
    p = TwoModeParams(1.0, 1.0, 0.1, 0.01)
    decomp = quadratic.diagonalize(p.to_model())
    bath = quench.BathSpec.default(1.0, 0.02, 500, (0.5, 1.55))
    res = quench.propagate_decomposition(decomp, bath)
    cov = quench.propagate_covariance(decomp, bath)
    drift = float(np.max(np.abs(res.normalization() - 1)))
    expected = float(np.sum(two_mode.populations(p)))
    rel = abs(cov.total_photons - expected) / expected
    return drift <= 1e-6 and rel <= 0.01, f"normalization drift {drift:.1e}, photon count error {rel:.1e}"


CHECKS: dict[str, Callable] = {
    "eigensolver": check_eigensolver,
    "symplectic": check_symplectic,
    "symplectic-williamson": check_williamson,
    "normalization": check_normalization,
    "bona-fide": check_bona_fide,
    "equal-population": check_equal_population,
    "product-rules": check_product_rules,
    "sign-classification": check_sign_classification,
    "fock-oracle": check_fock_oracle,
    "eta-sum": check_eta_sum,
    "dicke": check_dicke,
    "quench": check_quench,
}


def run_checks(names=None, seed: int = SEED) -> list[CheckResult]:
    results = []
    for name in names or CHECKS:
        rng = np.random.default_rng(seed)
        t0 = time.perf_counter()
        try:
            passed, detail = CHECKS[name](rng)
        except Exception as exc:  # a crash is a failed check, not an aborted suite
            passed, detail = False, f"{type(exc).__name__}: {exc}"
        results.append(CheckResult(name, bool(passed), detail, time.perf_counter() - t0))
    return results
