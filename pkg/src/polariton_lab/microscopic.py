"""Multimode cavity/matter model and its reduction to two effective modes.

Cavity modes a_k (k = 1..K) couple to matter modes b_l (l = 1..L) through
lam_lk (a_k + a_k^+)(b_l + b_l^+). The diamagnetic term sum_kn D_kn (a_k + a_k^+)(a_n + a_n^+)
is fixed by the sum rule D_kn = sum_l lam_lk lam_ln / w_bl. Keeping one cavity
and one matter mode and eliminating the rest to second order gives the
effective two-mode parameters (w_a, w_b, lam, D, eta, u).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidModel, InvalidSelection
from .quadratic import QuadraticBosonicModel, diagonalize, vacuum_report
from .two_mode import TwoModeParams, populations

DEFAULT_CAVITY_MODES = 25
DEFAULT_MATTER_MODES = 5
DETUNING_WARN_RATIO = 10.0
ETA_LIMIT_COEFF = math.pi**2 / 8 - 1


class WeakDetuningWarning(UserWarning):
    """An eliminated mode is not far detuned compared with its coupling."""


def _ro(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class MultimodeSpec:
    cavity_frequencies: np.ndarray
    matter_frequencies: np.ndarray
    couplings: np.ndarray  # shape (L, K): lam[l, k]
    u: float = 0.0
    diamagnetic: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        wa = _ro(self.cavity_frequencies)
        wb = _ro(self.matter_frequencies)
        lam = _ro(self.couplings)
        if wa.ndim != 1 or wb.ndim != 1 or wa.size < 1 or wb.size < 1:
            raise InvalidModel("need at least one cavity and one matter mode")
        if lam.shape != (wb.size, wa.size):
            raise InvalidModel(f"couplings must have shape (L, K) = {(wb.size, wa.size)}")
        if np.any(wa <= 0) or np.any(wb <= 0):
            raise InvalidModel("frequencies must be positive")
        if not (np.all(np.isfinite(lam)) and math.isfinite(self.u)):
            raise InvalidModel("couplings and u must be finite")
        if wb[0] + 4 * self.u <= 0:
            raise InvalidModel("w_b1 + 4u must be positive")
        object.__setattr__(self, "cavity_frequencies", wa)
        object.__setattr__(self, "matter_frequencies", wb)
        object.__setattr__(self, "couplings", lam)
        d = (lam / wb[:, None]).T @ lam
        object.__setattr__(self, "diamagnetic", _ro(0.5 * (d + d.T)))

    @property
    def n_cavity(self) -> int:
        return self.cavity_frequencies.size

    @property
    def n_matter(self) -> int:
        return self.matter_frequencies.size

    def to_model(self) -> QuadraticBosonicModel:
        """Quadratic model with the K cavity modes first, then the L matter modes."""
        k, l = self.n_cavity, self.n_matter
        n = k + l
        g = np.zeros((n, n))
        d = self.diamagnetic
        # D_kn (x_k x_n + x_n x_k) for k != n gives a coupling 2 D_kn
        g[:k, :k] = 2 * d
        g[:k, k:] = self.couplings.T
        g[k:, :k] = self.couplings
        np.fill_diagonal(g, 0.0)
        s = np.zeros(n)
        s[:k] = np.diag(d)
        t = np.zeros(n)
        t[k] = self.u
        labels = tuple(f"a{i + 1}" for i in range(k)) + tuple(f"b{j + 1}" for j in range(l))
        freqs = np.r_[self.cavity_frequencies, self.matter_frequencies]
        return QuadraticBosonicModel(freqs, g, s, t, labels)


def build_fabry_perot(
    omega_a: float,
    omega_b: float,
    lam: float,
    n_cavity: int = DEFAULT_CAVITY_MODES,
    n_matter: int = DEFAULT_MATTER_MODES,
    u: float = 0.0,
) -> MultimodeSpec:
    """Odd cavity harmonics coupled to the transitions of a deep square well.

    w_ak = (2k - 1) w_a, w_bj = (4j^2 - 1) w_b / 3 and
    lam_jk = lam * 3j / ((4j^2 - 1) sqrt(2k - 1)).
    """
    if n_cavity < 1 or n_matter < 1:
        raise InvalidModel("need at least one cavity and one matter mode")
    k = np.arange(1, n_cavity + 1)
    j = np.arange(1, n_matter + 1)
    wa = (2 * k - 1) * omega_a
    wb = (4 * j**2 - 1) * omega_b / 3
    couplings = lam * np.outer(3 * j / (4 * j**2 - 1), 1 / np.sqrt(2 * k - 1))
    return MultimodeSpec(wa, wb, couplings, u)


@dataclass(frozen=True)
class EliminationResult:
    params: TwoModeParams
    raw_D: float
    matter_correction: float
    eta: float
    kept: tuple[int, int] = (0, 0)


def adiabatic_eliminate(spec: MultimodeSpec, kept: tuple[int, int] = (0, 0)) -> EliminationResult:
    """Second-order elimination of every mode except cavity ``kept[0]`` and matter ``kept[1]``.

    Eliminated cavity harmonics induce -eta (b + b^+)^2 with
    eta = sum_{k != c} lam_mk^2 / w_ak. Eliminated matter transitions cancel
    their share of the diamagnetic term, D = D_cc - sum_{l != m} lam_lc^2 / w_bl.
    """
    c, m = kept
    if not (0 <= c < spec.n_cavity and 0 <= m < spec.n_matter):
        raise InvalidSelection(f"kept modes {kept} out of range")
    lam = spec.couplings
    wa, wb = spec.cavity_frequencies, spec.matter_frequencies
    other_k = np.arange(spec.n_cavity) != c
    other_l = np.arange(spec.n_matter) != m
    eta = float(np.sum(lam[m, other_k] ** 2 / wa[other_k]))
    correction = float(np.sum(lam[other_l, c] ** 2 / wb[other_l]))
    raw = float(spec.diamagnetic[c, c])
    _warn_detunings(spec, c, m)
    params = TwoModeParams(
        omega_a=float(wa[c]),
        omega_b=float(wb[m]),
        lam=float(abs(lam[m, c])),
        D=max(raw - correction, 0.0),
        eta=eta,
        u=spec.u,
    )
    return EliminationResult(params, raw, correction, eta, (c, m))


def _warn_detunings(spec: MultimodeSpec, c: int, m: int) -> None:
    lam = spec.couplings
    wa, wb = spec.cavity_frequencies, spec.matter_frequencies
    for k in range(spec.n_cavity):
        if k != c and abs(wa[k] - wb[m]) < DETUNING_WARN_RATIO * abs(lam[m, k]):
            warnings.warn(
                f"eliminated cavity mode {k + 1} is within {DETUNING_WARN_RATIO}x its coupling "
                "of the kept matter mode",
                WeakDetuningWarning,
                stacklevel=3,
            )
    for l in range(spec.n_matter):
        if l != m and abs(wb[l] - wa[c]) < DETUNING_WARN_RATIO * abs(lam[l, c]):
            warnings.warn(
                f"eliminated matter mode {l + 1} is within {DETUNING_WARN_RATIO}x its coupling "
                "of the kept cavity mode",
                WeakDetuningWarning,
                stacklevel=3,
            )


def eta_partial_sum(n_cavity: int) -> float:
    """sum_{k=2}^{K} 1/(2k-1)^2, the Fabry-Perot eta in units of lam^2/w_a."""
    k = np.arange(2, n_cavity + 1)
    return float(np.sum(1.0 / (2 * k - 1) ** 2))


def richardson_limit(f, n0: int, levels: int = 5) -> float:
    """Extrapolate f(n) to n -> infinity from n0, 2 n0, 4 n0, ...

    Assumes an asymptotic series in powers of 1/n.
    """
    table = [f(n0 * 2**i) for i in range(levels)]
    for p in range(1, levels):
        factor = 2.0**p
        table = [(factor * table[i + 1] - table[i]) / (factor - 1) for i in range(len(table) - 1)]
    return float(table[0])


def eta_extrapolated(lam: float, omega_a: float, n_cavity: int = DEFAULT_CAVITY_MODES) -> float:
    return richardson_limit(eta_partial_sum, n_cavity) * lam**2 / omega_a


def multimode_populations(spec: MultimodeSpec) -> tuple[float, float]:
    """(n_U, n_L) of the second-lowest and lowest normal modes."""
    decomp = diagonalize(spec.to_model())
    pops = vacuum_report(decomp).populations
    # frequencies are stored descending
    return float(pops[-2]), float(pops[-1])


@dataclass(frozen=True)
class MultimodeComparison:
    n_mic: tuple[float, float]
    n_eff: tuple[float, float]
    discrepancy: tuple[float, float]
    elimination: EliminationResult

    @property
    def max_discrepancy(self) -> float:
        return max(self.discrepancy)


def _rel(mic: float, eff: float) -> float:
    if mic == 0.0:
        return 0.0 if eff == 0.0 else math.inf
    return abs(mic - eff) / mic


def compare_multimode_vs_effective(
    omega_a: float,
    omega_b: float,
    lam: float,
    n_cavity: int = DEFAULT_CAVITY_MODES,
    n_matter: int = DEFAULT_MATTER_MODES,
    u: float = 0.0,
) -> MultimodeComparison:
    spec = build_fabry_perot(omega_a, omega_b, lam, n_cavity, n_matter, u)
    mic = multimode_populations(spec)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", WeakDetuningWarning)
        elim = adiabatic_eliminate(spec)
    eff = populations(elim.params)
    return MultimodeComparison(
        n_mic=mic,
        n_eff=eff,
        discrepancy=(_rel(mic[0], eff[0]), _rel(mic[1], eff[1])),
        elimination=elim,
    )
