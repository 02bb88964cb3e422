import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from polariton_lab.errors import InvalidModel, InvalidSelection
from polariton_lab.microscopic import (
    ETA_LIMIT_COEFF,
    MultimodeSpec,
    WeakDetuningWarning,
    adiabatic_eliminate,
    build_fabry_perot,
    compare_multimode_vs_effective,
    eta_extrapolated,
    eta_partial_sum,
    multimode_populations,
    richardson_limit,
)
from polariton_lab.two_mode import TwoModeParams, populations


def quiet_eliminate(spec, kept=(0, 0)):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", WeakDetuningWarning)
        return adiabatic_eliminate(spec, kept)


def test_fabry_perot_entries():
    s = build_fabry_perot(1.0, 1.0, 0.2, 3, 2)
    assert s.couplings[0, 0] == pytest.approx(0.2)
    assert s.couplings[0, 1] == pytest.approx(0.2 / math.sqrt(3))
    assert s.cavity_frequencies[1] == 3.0
    assert s.matter_frequencies[1] == 5.0
    assert build_fabry_perot(1, 1, 0.2, 4, 1).diamagnetic[0, 0] == pytest.approx(0.04)


@given(st.integers(1, 30), st.integers(1, 8), st.floats(0.0, 0.4), st.floats(0.5, 1.5))
def test_trk_closure(k, l, lam, wa):
    s = build_fabry_perot(wa, 1.0, lam, k, l)
    d = np.zeros((k, k))
    for i in range(k):
        for j in range(k):
            d[i, j] = sum(s.couplings[m, i] * s.couplings[m, j] / s.matter_frequencies[m] for m in range(l))
    assert np.max(np.abs(s.diamagnetic - d)) <= 1e-15
    elim = quiet_eliminate(s)
    assert elim.params.D == pytest.approx(lam**2, abs=1e-12)
    assert elim.eta >= 0


def test_eta_partial_sum_and_limit():
    direct = sum(1.0 / (2 * k - 1) ** 2 for k in range(2, 26))
    assert eta_partial_sum(25) == pytest.approx(direct, rel=1e-15)
    assert eta_partial_sum(25) == pytest.approx(0.2237, abs=5e-5)
    assert ETA_LIMIT_COEFF == pytest.approx(0.2337, abs=5e-5)
    assert eta_extrapolated(0.2, 1.0) == pytest.approx(ETA_LIMIT_COEFF * 0.04, abs=1e-8)
    s = quiet_eliminate(build_fabry_perot(1.0, 1.0, 0.2))
    assert s.eta == pytest.approx(direct * 0.04, rel=1e-14)


def test_eta_monotone_with_tail_bound():
    values = [eta_partial_sum(k) for k in range(1, 80)]
    assert np.all(np.diff(values) > 0)
    for k in range(1, 80):
        assert ETA_LIMIT_COEFF - eta_partial_sum(k) < 1 / (4 * k - 2)


def test_richardson_on_known_series():
    assert richardson_limit(lambda n: 2.0 + 1 / n + 3 / n**2, 8) == pytest.approx(2.0, abs=1e-12)


def test_single_mode_reduction():
    s = build_fabry_perot(1.0, 1.0, 0.2, 1, 1)
    elim = adiabatic_eliminate(s)
    assert elim.eta == 0.0
    assert elim.params.D == pytest.approx(0.04)
    assert multimode_populations(s) == pytest.approx(populations(elim.params), abs=1e-14)
    assert compare_multimode_vs_effective(1, 1, 0.2, 1, 1).max_discrepancy <= 1e-12


def test_decoupled_harmonics_match_two_mode():
    wa = np.array([1.0, 3.0, 5.0])
    wb = np.array([1.0, 5.0])
    lam = np.zeros((2, 3))
    lam[0, 0] = 0.2
    s = MultimodeSpec(wa, wb, lam)
    assert multimode_populations(s) == pytest.approx(populations(TwoModeParams(1, 1, 0.2, 0.04)), abs=1e-12)


def test_zero_coupling():
    assert multimode_populations(build_fabry_perot(1, 1, 0.0)) == (0.0, 0.0)


def test_invalid_selection_and_spec():
    s = build_fabry_perot(1, 1, 0.1, 3, 2)
    with pytest.raises(InvalidSelection):
        adiabatic_eliminate(s, (3, 0))
    with pytest.raises(InvalidModel):
        MultimodeSpec([1.0], [1.0], [[0.1, 0.2]])
    with pytest.raises(InvalidModel):
        build_fabry_perot(1, 1, 0.1, 0, 1)


def test_weak_detuning_warning():
    # the third cavity harmonic at 5 w_a sits on the second matter transition
    s = build_fabry_perot(1.0, 1.0, 0.3, 3, 2)
    with pytest.warns(WeakDetuningWarning):
        adiabatic_eliminate(s, (0, 1))


def test_truncation_doubling():
    for lam in (0.05, 0.2, 0.3):
        a = multimode_populations(build_fabry_perot(1, 1, lam, 25, 5))
        b = multimode_populations(build_fabry_perot(1, 1, lam, 50, 10))
        assert a == pytest.approx(b, rel=5e-3)


def test_lower_polariton_more_populated():
    c = compare_multimode_vs_effective(1, 1, 0.2)
    assert c.n_mic[1] >= c.n_mic[0]
