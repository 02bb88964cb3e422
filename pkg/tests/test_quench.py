import dataclasses

import numpy as np
import pytest

from polariton_lab import quench
from polariton_lab.errors import InvalidSystem, NotConverged
from polariton_lab.quadratic import diagonalize, vacuum_report
from polariton_lab.two_mode import TwoModeParams, populations

COARSE = dict(gamma_rel=0.02, n_omega=500, window=(0.5, 1.55))


def decomp(lam=0.1, D=None, delta=0.0):
    D = lam**2 if D is None else D
    return diagonalize(TwoModeParams(1 + delta, 1.0, lam, D).to_model())


def coarse_bath(**kw):
    return quench.BathSpec.default(1.0, **{**COARSE, **kw})


@pytest.fixture(scope="module")
def trk_run():
    d = decomp()
    bath = coarse_bath()
    res = quench.propagate_decomposition(d, bath)
    cov = quench.propagate_covariance(d, bath)
    return d, bath, res, cov


@pytest.fixture(scope="module")
def no_a2_run():
    # detuned so that the cross moments do not vanish by symmetry
    d = decomp(D=0.0, delta=0.1)
    bath = coarse_bath(window=(0.45, 1.65))
    res = quench.propagate_decomposition(d, bath)
    cov = quench.propagate_covariance(d, bath)
    return d, bath, res, cov


def test_discretization():
    d = decomp()
    disc = quench.discretize_bath(coarse_bath(), d)
    assert disc.delta == pytest.approx(1.05 / 499)
    for k in range(2):
        assert np.ptp(disc.couplings[k]) == 0.0
    zero = quench.discretize_bath(quench.BathSpec(0.0, 0.5, 1.55, 500), d)
    assert np.all(zero.couplings == 0)
    # cavity weights: J_U ~ cos(theta), J_L ~ sin(theta) < 0
    assert disc.couplings[0, 0] > 0 > disc.couplings[1, 0]


def test_bath_validation():
    with pytest.raises(InvalidSystem):
        quench.BathSpec(0.01, 0.5, 1.6, 100)
    with pytest.raises(InvalidSystem):
        quench.discretize_bath(quench.BathSpec(0.01, 0.95, 1.6, 500), decomp())


def test_free_evolution_without_coupling():
    d = decomp()
    bath = quench.BathSpec(0.0, 0.5, 1.55, 400)
    res = quench.propagate_decomposition(d, bath, t_final=30.0, n_samples=7, require_decay=False)
    for t, v in zip(res.times, res.v):
        assert np.allclose(v, np.diag(np.exp(1j * d.frequencies * t)), atol=1e-7)
    assert np.all(res.phi == 0)
    with pytest.raises(NotConverged):
        quench.asymptotic_amplitudes(res)
    with pytest.raises(NotConverged):
        quench.default_duration(bath)


def test_initial_conditions(trk_run):
    _, _, res, _ = trk_run
    assert np.array_equal(res.v[0], np.eye(2))
    assert np.all(res.phi[0] == 0)


def test_duration_guard():
    bath = coarse_bath()
    with pytest.raises(InvalidSystem):
        quench.propagate_decomposition(decomp(), bath, t_final=5.0 / bath.gamma)
    with pytest.raises(NotConverged):
        quench.propagate_decomposition(decomp(), bath, t_final=10.0 / bath.gamma)


def test_normalization_and_decay(trk_run):
    _, _, res, _ = trk_run
    assert np.max(np.abs(res.normalization() - 1)) <= 1e-6
    assert res.v_norm()[-1] <= quench.DECAY_TOL


def test_wigner_weisskopf_decay(trk_run):
    d, bath, res, _ = trk_run
    rates = quench.wigner_weisskopf_rates(d, bath)
    k = np.searchsorted(res.times, 2.0 / rates[0])
    survival = np.abs(res.v[k, 0, 0]) ** 2
    assert survival == pytest.approx(np.exp(-rates[0] * res.times[k]), rel=0.05)


def test_emission_peaks_and_completeness(trk_run):
    d, _, res, _ = trk_run
    phi = quench.asymptotic_amplitudes(res)
    assert np.sum(np.abs(phi) ** 2, axis=1) == pytest.approx([1.0, 1.0], abs=1e-3)
    peaks = quench.peak_positions(res.bath.omegas, quench.emission_densities(res))
    assert peaks == pytest.approx(d.frequencies, abs=res.bath.delta)


def test_moments_at_start():
    assert np.all(quench.bare_vacuum_polariton_moments(decomp(lam=0.0)).normal == 0)
    m = quench.bare_vacuum_polariton_moments(decomp(lam=0.2))
    assert m.populations == pytest.approx([0.00990195, 0.00990195], abs=1e-8)
    assert vacuum_report(decomp(lam=0.2)).is_bona_fide()


def test_photon_count_and_output_modes(trk_run):
    d, _, res, cov = trk_run
    n = np.array(populations(TwoModeParams(1, 1, 0.1, 0.01)))
    assert cov.total_photons == pytest.approx(n.sum(), rel=0.01)
    out = quench.extract_output_populations(res, cov)
    assert out.populations == pytest.approx(tuple(n), rel=0.02)


def test_cross_moments_recovered(no_a2_run):
    d, _, res, cov = no_a2_run
    out = quench.extract_output_populations(res, cov)
    start = quench.bare_vacuum_polariton_moments(d)
    assert abs(start.normal[0, 1]) > 1e-4
    assert abs(out.normal[0, 1]) == pytest.approx(abs(start.normal[0, 1]), rel=0.02)
    assert out.anomalous == pytest.approx(start.anomalous, abs=0.02 * np.max(np.abs(start.anomalous)))


def test_lower_peak_brighter_without_a2(no_a2_run):
    d, _, _, cov = no_a2_run
    upper, lower = quench.split_weights(cov.omegas, cov.occupations, *d.frequencies)
    assert lower > upper


def test_no_coupling_no_emission():
    d = decomp(lam=0.0)
    cov = quench.propagate_covariance(d, coarse_bath())
    assert np.all(cov.spectrum == 0)


def test_dark_populated_mode_never_converges():
    # detuned, uncoupled matter mode with an A^2-free squeeze from eta
    d = diagonalize(TwoModeParams(1.2, 1.0, 0.0, 0.0, eta=0.02).to_model())
    with pytest.raises(NotConverged):
        quench.propagate_covariance(d, coarse_bath(window=(0.5, 1.7)))


def test_theta_sign_irrelevant(trk_run):
    d, bath, _, cov = trk_run
    flipped = dataclasses.replace(d, rotation=d.rotation * np.array([[1.0], [-1.0]]))
    cov2 = quench.propagate_covariance(flipped, bath)
    assert cov2.occupations == pytest.approx(cov.occupations, abs=1e-12)


def test_grid_convergence(trk_run):
    d, _, res, cov = trk_run
    fine = coarse_bath(n_omega=1000)
    res2 = quench.propagate_decomposition(d, fine)
    cov2 = quench.propagate_covariance(d, fine)
    a = quench.extract_output_populations(res, cov).populations
    b = quench.extract_output_populations(res2, cov2).populations
    assert a == pytest.approx(b, rel=5e-3)
    assert cov.total_photons == pytest.approx(cov2.total_photons, rel=5e-3)


@pytest.mark.slow
def test_width_scales_with_gamma():
    d = decomp()
    widths = []
    for gamma, window in ((0.01, (0.5, 1.6)), (0.001, (0.86, 1.15))):
        bath = quench.BathSpec.default(1.0, gamma, 2000, window)
        res = quench.propagate_decomposition(d, bath)
        dens = quench.emission_densities(res)
        widths.append([quench.full_width_half_max(res.bath.omegas, x) for x in dens])
        rates = quench.wigner_weisskopf_rates(d, bath)
        assert widths[-1] == pytest.approx(rates, rel=0.1)
    ratio = np.array(widths[0]) / np.array(widths[1])
    assert ratio == pytest.approx([10, 10], rel=0.1)
