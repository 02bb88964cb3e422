import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from polariton_lab.errors import DegenerateSpectrum, InvalidModel, UnstableHamiltonian
from polariton_lab.quadratic import diagonalize, vacuum_report
from polariton_lab.two_mode import (
    TwoModeParams,
    classify_sign,
    d_max_lower_bound,
    d_roots,
    equal_population_u,
    lam_max,
    mixing_angle,
    polariton_frequencies,
    population_sign,
    populations,
    product_rule,
    trk_D,
    trk_product_rule,
)

from strategies import two_mode_params


def hopfield_frequencies(wa, wb, lam, D):
    # textbook biquadratic for eta = u = 0, solved independently
    s = wa * (wa + 4 * D) + wb**2
    prod = wa * wb * math.sqrt(1 + 4 * (D - lam**2 / wb) / wa)
    disc = math.sqrt(s * s - 4 * prod**2)
    return math.sqrt((s + disc) / 2), math.sqrt((s - disc) / 2)


def test_trk_D():
    assert trk_D(0.2, 1) == pytest.approx(0.04)
    assert trk_D(0, 1) == 0
    assert trk_D(0.25, 1) == 0.0625


@pytest.mark.parametrize(
    "args, expected",
    [((1, 1, 0.2, 0.04), (1.21980, 0.81980)), ((1, 1, 0.1, 0.01), (1.10499, 0.90499))],
)
def test_frequency_examples(args, expected):
    assert polariton_frequencies(TwoModeParams(*args)) == pytest.approx(expected, abs=5e-6)
    assert polariton_frequencies(TwoModeParams(*args)) == pytest.approx(hopfield_frequencies(*args), rel=1e-12)


def test_uncoupled_frequencies():
    assert polariton_frequencies(TwoModeParams(0.7, 1.0)) == pytest.approx((1.0, 0.7), rel=1e-15)
    assert polariton_frequencies(TwoModeParams(1.3, 1.0)) == pytest.approx((1.3, 1.0), rel=1e-15)


def test_mixing_angle():
    assert mixing_angle(TwoModeParams(1, 1, 0.2)) == pytest.approx(-math.pi / 4)
    th = mixing_angle(TwoModeParams(1, 1, 0.2, 0.04))
    assert math.cos(2 * th) == pytest.approx(0.19612, abs=5e-6)
    assert mixing_angle(TwoModeParams(1.2, 1, 1e-9)) == pytest.approx(0, abs=1e-8)
    with pytest.raises(DegenerateSpectrum):
        mixing_angle(TwoModeParams(1, 1, 0))


def test_population_examples():
    assert populations(TwoModeParams(1, 1, 0.2, 0.04)) == pytest.approx((0.00990, 0.00990), abs=5e-6)
    assert populations(TwoModeParams(1, 1, 0.2, 0.0)) == pytest.approx((0.00709, 0.01640), abs=5e-6)
    assert populations(TwoModeParams(1.3, 1)) == (0.0, 0.0)


def test_params_validation():
    with pytest.raises(InvalidModel):
        TwoModeParams(0, 1)
    with pytest.raises(InvalidModel):
        TwoModeParams(1, 1, -0.1)
    with pytest.raises(InvalidModel):
        TwoModeParams(1, 1, 0.1, u=-0.3)
    with pytest.raises(UnstableHamiltonian):
        populations(TwoModeParams(1, 1, 0.6))
    assert TwoModeParams(1.2, 1).delta == pytest.approx(0.2)


def test_sign_examples():
    c = classify_sign(TwoModeParams(1, 1, 0.2, 0.02))
    assert (c.case, c.predicted_sign) == ("(i)", -1)
    c = classify_sign(TwoModeParams(1, 1.5, 0.2, 0.0))
    assert c.case == "(ii)"
    assert c.lam_max == pytest.approx(math.sqrt(1.5 * 0.25 / 16))
    assert c.lam_max == pytest.approx(0.15309, abs=5e-6)
    assert classify_sign(TwoModeParams(1, 1, 0.2, 0.04)).predicted_sign == 0
    with pytest.raises(InvalidModel):
        classify_sign(TwoModeParams(1, 1, 0.2, 0.04, eta=0.01))


def test_case_iii_and_d_max_bound():
    wa, wb, lam = 1.0, 1.5, 0.1
    c = classify_sign(TwoModeParams(wa, wb, lam, 0.0))
    assert c.case == "(iii)"
    d_plus, d_minus = d_roots(wa, wb, lam)
    assert d_plus >= d_minus > 0
    assert d_minus >= d_max_lower_bound(wa, wb, lam)
    assert math.isnan(lam_max(1.0, 1.0))


def test_equal_population_examples():
    assert equal_population_u(1, 1, 0.2, trk_D(0.2, 1), 0.0) == 0.0
    u = equal_population_u(1, 1, 0.25, 0.0625, 0.014375)
    assert u == pytest.approx(-1.25 * 0.014375)
    assert u == pytest.approx(-0.01797, abs=5e-6)
    assert equal_population_u(1.3, 1, 0.2, 0.0, 0.0) == pytest.approx(-0.04 / 1.3)
    with pytest.raises(UnstableHamiltonian):
        equal_population_u(1, 1, 0.1, 0.01, 0.3)


@given(two_mode_params())
def test_populations_match_symplectic_route(p):
    n = populations(p)
    assert min(n) >= 0
    assert n == pytest.approx(tuple(vacuum_report(diagonalize(p.to_model())).populations), abs=1e-9)


@given(two_mode_params())
def test_product_rule_general(p):
    w_u, w_l = polariton_frequencies(p)
    pred = product_rule(p)
    assert abs((w_u * w_l) ** 2 - pred) <= 1e-10 * pred


@given(two_mode_params(eta_u=False))
def test_product_rule_eta_u_zero(p):
    w_u, w_l = polariton_frequencies(p)
    assert w_u * w_l == pytest.approx(trk_product_rule(p), rel=1e-10)
    assert w_u >= max(p.omega_a, p.omega_b) * (1 - 1e-12)


def test_product_rule_grid():
    worst = 0.0
    for lam in np.linspace(0, 0.4, 50):
        for D in np.linspace(0, 0.16, 50):
            for d in np.linspace(-0.5, 0.5, 50):
                p = TwoModeParams(1 + d, 1, lam, D)
                if not p.is_stable:
                    continue
                w_u, w_l = polariton_frequencies(p)
                worst = max(worst, abs(w_u * w_l / trk_product_rule(p) - 1))
    assert worst <= 1e-10


@given(two_mode_params(trk=True, eta_u=False))
def test_equal_population_theorem(p):
    n_u, n_l = populations(p)
    assert abs(n_u - n_l) <= 1e-10


@given(two_mode_params(eta_u=False))
def test_sign_theorem(p):
    # inside the 1e-12 zero band around the sum rule the sign is a tie by contract
    assume(abs(p.D - p.lam**2 / p.omega_b) > 1e-9)
    c = classify_sign(p)
    actual = population_sign(*populations(p))
    if c.theorem_applies:
        assert c.predicted_sign == actual
    else:
        # outside the proven cases the reported sign is the exact one
        assert c.predicted_sign == actual


@given(two_mode_params(), st.floats(0.0, 0.05))
def test_equal_population_sufficiency(p, eta):
    try:
        u = equal_population_u(p.omega_a, p.omega_b, p.lam, p.D, eta)
    except UnstableHamiltonian:
        assume(False)
    q = p.replace(eta=eta, u=u)
    n_u, n_l = populations(q)
    assert abs(n_u - n_l) <= 1e-10
