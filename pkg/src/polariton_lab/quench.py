"""Quench of the coupling followed by emission into a radiation continuum.

After the switch-on, the polaritons p_U, p_L leak into a continuum of output
modes alpha(w) through the cavity component of each polariton,

    H = sum_k w_k p_k^+ p_k + int dw w alpha_w^+ alpha_w
        + sum_k int dw J_k(w) (p_k^+ alpha_w + alpha_w^+ p_k),

with J_U = J cos(theta) sqrt(w_a/w_U) and J_L = J sin(theta) sqrt(w_a/w_L).
On a uniform grid this is c^+ H c with a real symmetric arrowhead matrix H on
c = (p_U, p_L, alpha_1, ..., alpha_N).

Two linear problems share that matrix:

* decomposition rows x_k = (v_k., phi_k(.)) with dx/dt = +iHx, x(0) = e_k,
  which express p_k(0) = sum_k' v_kk'(t) p_k'(t) + sum_j phi_k(w_j, t) alpha_j(t);
* covariance columns W with dW/dt = -iHW, W(0) = (e_U, e_L); since the bath
  starts in vacuum, <alpha_i^+ alpha_j>(t) = sum_kk' conj(W_ik) N0_kk' W_jk'
  is carried exactly by this rank-two factor.

Both run in a frame rotating at the grid centre, which leaves only the
detunings for the integrator to resolve.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import IntegrationFailure, InvalidSystem, NotConverged
from .numerics import OdeSystem, integrate_linear_ode
from .quadratic import NormalModeDecomposition, vacuum_report

DEFAULT_N_OMEGA = 2000
MIN_N_OMEGA = 400
DEFAULT_WINDOW = (0.5, 1.6)  # in units of w_a
DEFAULT_DURATION = 25.0  # in units of 1/gamma
RATE_DURATION = 11.0  # in units of the slowest golden-rule lifetime
MARGIN_WIDTHS = 20.0
DECAY_TOL = 0.01
DRIFT_FAIL = 1e-5


@dataclass(frozen=True)
class BathSpec:
    """Uniform grid of output modes with a flat or tabulated coupling J(w).

    ``gamma`` is the bare cavity decay rate; the flat profile is
    J = sqrt(gamma / 2 pi). ``profile``, if given, is a pair of arrays
    (w, J(w)) interpolated linearly onto the grid.
    """

    gamma: float
    omega_min: float
    omega_max: float
    n_omega: int = DEFAULT_N_OMEGA
    profile: tuple[np.ndarray, np.ndarray] | None = field(default=None, compare=False)

    def __post_init__(self):
        if not (math.isfinite(self.gamma) and self.gamma >= 0):
            raise InvalidSystem("gamma must be finite and non-negative")
        if not (0 < self.omega_min < self.omega_max and math.isfinite(self.omega_max)):
            raise InvalidSystem("need 0 < omega_min < omega_max")
        if self.n_omega < MIN_N_OMEGA:
            raise InvalidSystem(f"n_omega must be >= {MIN_N_OMEGA}")

    @classmethod
    def default(cls, omega_a: float, gamma_rel: float, n_omega: int = DEFAULT_N_OMEGA,
                window: tuple[float, float] = DEFAULT_WINDOW) -> "BathSpec":
        """Grid [0.5, 1.6] w_a with gamma = gamma_rel * w_a."""
        return cls(gamma_rel * omega_a, window[0] * omega_a, window[1] * omega_a, n_omega)

    @property
    def delta(self) -> float:
        return (self.omega_max - self.omega_min) / (self.n_omega - 1)

    def coupling_profile(self, omegas: np.ndarray) -> np.ndarray:
        flat = math.sqrt(self.gamma / (2 * math.pi))
        if self.profile is None:
            return np.full(omegas.shape, flat)
        w, j = (np.asarray(x, dtype=float) for x in self.profile)
        return np.interp(omegas, w, j)


@dataclass(frozen=True)
class DiscreteBath:
    omegas: np.ndarray
    delta: float
    couplings: np.ndarray  # (2, N): J_k(w_j) sqrt(dw)

    @property
    def omega_ref(self) -> float:
        return 0.5 * (self.omegas[0] + self.omegas[-1])


def _check_two_mode(decomp: NormalModeDecomposition) -> None:
    if decomp.n_modes != 2:
        raise InvalidSystem("quench needs a two-mode decomposition")


def discretize_bath(bath: BathSpec, decomp: NormalModeDecomposition) -> DiscreteBath:
    _check_two_mode(decomp)
    w = decomp.frequencies
    margin = MARGIN_WIDTHS * bath.gamma
    if w.min() - margin < bath.omega_min or w.max() + margin > bath.omega_max:
        raise InvalidSystem(
            f"grid [{bath.omega_min:g}, {bath.omega_max:g}] must cover "
            f"[{w.min():g}, {w.max():g}] with margin {margin:g}"
        )
    omegas = np.linspace(bath.omega_min, bath.omega_max, bath.n_omega)
    j = bath.coupling_profile(omegas)
    omega_a = decomp.model.frequencies[0]
    # cavity weight of each polariton times the sqrt(w_a/w_k) field amplitude
    weights = decomp.rotation[:, 0] * np.sqrt(omega_a / w)
    couplings = weights[:, None] * j[None, :] * math.sqrt(bath.delta)
    return DiscreteBath(omegas, bath.delta, couplings)


def quench_generator(decomp: NormalModeDecomposition, disc: DiscreteBath) -> sp.csr_matrix:
    """Real symmetric H on (p_U, p_L, alpha_1..alpha_N), shifted by the grid centre."""
    n = disc.omegas.size
    diag = np.r_[decomp.frequencies, disc.omegas] - disc.omega_ref
    rows = np.r_[np.repeat([0, 1], n), 2 + np.tile(np.arange(n), 2)]
    cols = np.r_[2 + np.tile(np.arange(n), 2), np.repeat([0, 1], n)]
    vals = np.r_[disc.couplings.ravel(), disc.couplings.ravel()]
    off = sp.coo_matrix((vals, (rows, cols)), shape=(n + 2, n + 2))
    return (sp.diags(diag) + off).tocsr()


def _propagate(h: sp.csr_matrix, sign: float, omega_ref: float, t_final: float,
               times: np.ndarray, rtol: float, norm_tol: float) -> np.ndarray:
    x0 = np.zeros((h.shape[0], 2), dtype=complex)
    x0[0, 0] = x0[1, 1] = 1.0
    gen = (sign * 1j) * h
    traj = integrate_linear_ode(OdeSystem(gen, x0, t_final), times, rtol=rtol, norm_tol=norm_tol)
    return traj * np.exp(sign * 1j * omega_ref * times)[:, None, None]


def default_duration(bath: BathSpec, decomp: NormalModeDecomposition | None = None) -> float:
    """25/gamma, stretched so the slowest bright polariton decays to |v| < 0.01."""
    if bath.gamma == 0:
        raise NotConverged("no coupling to the continuum: the polaritons never decay")
    t = DEFAULT_DURATION / bath.gamma
    if decomp is not None:
        rates = wigner_weisskopf_rates(decomp, bath)
        bright = rates[rates > 0]
        if bright.size:
            t = max(t, RATE_DURATION / float(bright.min()))
    return t


@dataclass(frozen=True)
class QuenchResult:
    decomp: NormalModeDecomposition
    bath: DiscreteBath
    times: np.ndarray
    v: np.ndarray  # (n_t, 2, 2): v[t, k, k']
    phi: np.ndarray  # (n_t, 2, N): phi[t, k, j]

    @property
    def t_final(self) -> float:
        return float(self.times[-1])

    def normalization(self) -> np.ndarray:
        """sum_l |v_kl|^2 + sum_j |phi_k(w_j)|^2 per sample and row (should be 1)."""
        return np.sum(np.abs(self.v) ** 2, axis=2) + np.sum(np.abs(self.phi) ** 2, axis=2)

    def v_norm(self) -> np.ndarray:
        """Frobenius norm of v at each sample."""
        return np.sqrt(np.sum(np.abs(self.v) ** 2, axis=(1, 2)))


def propagate_decomposition(
    decomp: NormalModeDecomposition,
    bath: BathSpec,
    t_final: float | None = None,
    n_samples: int = 101,
    *,
    rtol: float = 1e-5,
    norm_tol: float = 1e-7,
    require_decay: bool = True,
) -> QuenchResult:
    disc = discretize_bath(bath, decomp)
    if t_final is None:
        t_final = default_duration(bath, decomp)
    if bath.gamma > 0 and t_final < 10.0 / bath.gamma:
        raise InvalidSystem("t_final must be at least 10/gamma")
    times = np.linspace(0.0, t_final, n_samples)
    h = quench_generator(decomp, disc)
    traj = _propagate(h, +1.0, disc.omega_ref, t_final, times, rtol, norm_tol)
    # column k of the state is row k of the decomposition
    v = np.transpose(traj[:, :2, :], (0, 2, 1))
    phi = np.transpose(traj[:, 2:, :], (0, 2, 1))
    result = QuenchResult(decomp, disc, times, v, phi)
    drift = np.max(np.abs(result.normalization() - 1.0))
    if drift > DRIFT_FAIL:
        raise IntegrationFailure(f"normalization drift {drift:.2e} exceeds {DRIFT_FAIL:g}")
    if require_decay and result.v_norm()[-1] > DECAY_TOL:
        raise NotConverged(f"|v(T)| = {result.v_norm()[-1]:.3g} > {DECAY_TOL}; increase T")
    return result


def asymptotic_amplitudes(result: QuenchResult) -> np.ndarray:
    """phi_k(w_j, T) with the free phase exp(i w_j T) removed; shape (2, N).

    Raises NotConverged unless the polaritons have decayed by T.
    """
    if result.v_norm()[-1] > DECAY_TOL:
        raise NotConverged("polaritons have not decayed; asymptotic amplitudes undefined")
    phase = np.exp(-1j * result.bath.omegas * result.t_final)
    return result.phi[-1] * phase[None, :]


def emission_densities(result: QuenchResult) -> np.ndarray:
    """|phi~_k(w)|^2 per unit frequency; integrates to about 1 for each k."""
    return np.abs(asymptotic_amplitudes(result)) ** 2 / result.bath.delta


@dataclass(frozen=True)
class PolaritonMoments:
    normal: np.ndarray  # <p_k^+ p_k'>
    anomalous: np.ndarray  # <p_k p_k'>

    @property
    def populations(self) -> np.ndarray:
        return np.real(np.diag(self.normal))


def bare_vacuum_polariton_moments(decomp: NormalModeDecomposition) -> PolaritonMoments:
    rep = vacuum_report(decomp)
    return PolaritonMoments(rep.normal, rep.anomalous)


@dataclass(frozen=True)
class CovarianceResult:
    omegas: np.ndarray
    delta: float
    factor: np.ndarray  # W(T) restricted to the bath, (N, 2)
    system_factor: np.ndarray  # W(T) on the polaritons, (2, 2)
    initial: PolaritonMoments

    def bath_normal(self) -> np.ndarray:
        """<alpha_i^+ alpha_j> at T (dense N x N; built on demand)."""
        w = self.factor
        return w.conj() @ self.initial.normal @ w.T

    def bath_anomalous(self) -> np.ndarray:
        """<alpha_i alpha_j> at T."""
        w = self.factor
        return w @ self.initial.anomalous @ w.T

    @property
    def occupations(self) -> np.ndarray:
        """<alpha_j^+ alpha_j> at T without forming the dense matrix."""
        w = self.factor
        return np.real(np.einsum("jk,kl,jl->j", w.conj(), self.initial.normal, w))

    @property
    def spectrum(self) -> np.ndarray:
        return self.occupations / self.delta

    @property
    def total_photons(self) -> float:
        return float(np.sum(self.occupations))

    @property
    def remaining_system_photons(self) -> float:
        w = self.system_factor
        return float(np.real(np.trace(w.conj() @ self.initial.normal @ w.T)))


def propagate_covariance(
    decomp: NormalModeDecomposition,
    bath: BathSpec,
    t_final: float | None = None,
    *,
    rtol: float = 1e-5,
    norm_tol: float = 1e-7,
) -> CovarianceResult:
    disc = discretize_bath(bath, decomp)
    if t_final is None:
        t_final = default_duration(bath, decomp)
    h = quench_generator(decomp, disc)
    times = np.array([t_final])
    w_t = _propagate(h, -1.0, disc.omega_ref, t_final, times, rtol, norm_tol)[-1]
    initial = bare_vacuum_polariton_moments(decomp)
    # a dark, empty polariton (e.g. the matter mode at lam = 0) never decays and never matters
    dark = ~np.any(disc.couplings != 0, axis=1)
    relevant = ~(dark & (initial.populations == 0))
    if np.sqrt(np.sum(np.abs(w_t[:2, relevant]) ** 2)) > DECAY_TOL:
        raise NotConverged("polaritons have not decayed by T; increase T")
    return CovarianceResult(
        omegas=disc.omegas,
        delta=disc.delta,
        factor=w_t[2:],
        system_factor=w_t[:2],
        initial=initial,
    )


@dataclass(frozen=True)
class OutputModes:
    normal: np.ndarray  # <f_k^+ f_k'>
    anomalous: np.ndarray  # <f_k f_k'>

    @property
    def populations(self) -> tuple[float, float]:
        n = np.real(np.diag(self.normal))
        return float(n[0]), float(n[1])


def extract_output_populations(result: QuenchResult, cov: CovarianceResult) -> OutputModes:
    """Moments of f_k = sum_j phi_k(w_j, T) alpha_j(T) from the bath covariance."""
    if result.v_norm()[-1] > DECAY_TOL:
        raise NotConverged("polaritons have not decayed; output modes undefined")
    if not np.array_equal(result.bath.omegas, cov.omegas):
        raise InvalidSystem("decomposition and covariance use different grids")
    phi = result.phi[-1].T  # (N, 2)
    # O[k, m] = sum_j phi_k(w_j) W_jm, so <f^+ f> = conj(O) N0 O^T
    overlap = phi.T @ cov.factor
    normal = overlap.conj() @ cov.initial.normal @ overlap.T
    anomalous = overlap @ cov.initial.anomalous @ overlap.T
    return OutputModes(normal, anomalous)


def split_weights(omegas: np.ndarray, occupations: np.ndarray, w_u: float, w_l: float) -> tuple[float, float]:
    """(upper, lower) photon numbers, split at the midpoint between the peaks."""
    mid = 0.5 * (w_u + w_l)
    upper = float(np.sum(occupations[omegas >= mid]))
    lower = float(np.sum(occupations[omegas < mid]))
    return upper, lower


def peak_positions(omegas: np.ndarray, densities: np.ndarray) -> np.ndarray:
    """Grid abscissa of the maximum of each row."""
    return omegas[np.argmax(densities, axis=-1)]


def full_width_half_max(omegas: np.ndarray, density: np.ndarray) -> float:
    """FWHM of a single peak, linearly interpolated between grid points."""
    k = int(np.argmax(density))
    half = 0.5 * density[k]
    i = k
    while i > 0 and density[i] > half:
        i -= 1
    j = k
    while j < density.size - 1 and density[j] > half:
        j += 1

    def cross(a, b):
        return omegas[a] + (half - density[a]) * (omegas[b] - omegas[a]) / (density[b] - density[a])

    return float(cross(j - 1, j) - cross(i, i + 1))


def wigner_weisskopf_rates(decomp: NormalModeDecomposition, bath: BathSpec) -> np.ndarray:
    """Golden-rule decay rates 2 pi J_k(w_k)^2 of the two polaritons."""
    w = decomp.frequencies
    j = bath.coupling_profile(w)
    omega_a = decomp.model.frequencies[0]
    return 2 * math.pi * (decomp.rotation[:, 0] * j) ** 2 * omega_a / w
