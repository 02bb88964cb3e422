"""N-mode quadratic bosonic Hamiltonians and their normal modes.

A model is

    H = sum_i [ w_i a_i^+ a_i + s_i (a_i + a_i^+)^2 + t_i (i(a_i - a_i^+))^2 ]
        + sum_{i<j} g_ij (a_i + a_i^+)(a_j + a_j^+)

Rescaling x_i = (a_i + a_i^+)/sqrt(2 W_i) with W_i = w_i + 4 t_i turns it into
unit-mass oscillators, H = y.y/2 + x.M.x/2 + const, so the squared normal-mode
frequencies are the eigenvalues of M. The annihilation operator of normal mode
k is p_k = sum_i R_ki [mu(w_k/W_i) a_i + nu(w_k/W_i) a_i^+].
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidModel, UnstableHamiltonian
from .numerics import sym_eigen

POSITIVITY_THRESHOLD = 1e-12


def mu(x):
    return 0.5 * (np.sqrt(x) + 1.0 / np.sqrt(x))


def nu(x):
    return 0.5 * (np.sqrt(x) - 1.0 / np.sqrt(x))


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class QuadraticBosonicModel:
    frequencies: np.ndarray
    couplings: np.ndarray
    x_shifts: np.ndarray
    y_shifts: np.ndarray
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        w = _frozen(self.frequencies)
        n = w.size
        if w.ndim != 1 or n < 2:
            raise InvalidModel("need at least two modes")
        g = np.array(self.couplings, dtype=float)
        s = np.array(self.x_shifts, dtype=float)
        t = np.array(self.y_shifts, dtype=float)
        if g.shape != (n, n) or s.shape != (n,) or t.shape != (n,):
            raise InvalidModel("coupling/shift shapes do not match the mode count")
        for name, arr in (("frequencies", w), ("couplings", g), ("x_shifts", s), ("y_shifts", t)):
            if not np.all(np.isfinite(arr)):
                raise InvalidModel(f"{name} must be finite")
        if np.any(w <= 0):
            raise InvalidModel("bare frequencies must be positive")
        if not np.array_equal(g, g.T):
            raise InvalidModel("coupling matrix must be symmetric")
        g = g.copy()
        np.fill_diagonal(g, 0.0)
        if np.any(w + 4 * t <= 0):
            raise InvalidModel("effective position frequencies w_i + 4 t_i must be positive")
        labels = tuple(self.labels) or tuple(f"m{i}" for i in range(n))
        if len(labels) != n:
            raise InvalidModel("one label per mode")
        object.__setattr__(self, "frequencies", w)
        object.__setattr__(self, "couplings", _frozen(g))
        object.__setattr__(self, "x_shifts", _frozen(s))
        object.__setattr__(self, "y_shifts", _frozen(t))
        object.__setattr__(self, "labels", labels)

    @classmethod
    def two_mode(cls, omega_a, omega_b, lam, D=0.0, eta=0.0, u=0.0):
        """Cavity mode a and matter mode b with A^2, eta and u terms."""
        return cls(
            frequencies=[omega_a, omega_b],
            couplings=[[0.0, lam], [lam, 0.0]],
            x_shifts=[D, -eta],
            y_shifts=[0.0, u],
            labels=("a", "b"),
        )

    @property
    def n_modes(self) -> int:
        return self.frequencies.size

    @property
    def position_frequencies(self) -> np.ndarray:
        return self.frequencies + 4 * self.y_shifts


def position_form(model: QuadraticBosonicModel) -> np.ndarray:
    w, s = model.frequencies, model.x_shifts
    big_w = model.position_frequencies
    m = 2.0 * model.couplings * np.sqrt(np.outer(big_w, big_w))
    m[np.diag_indices_from(m)] = (w + 4 * s) * big_w
    return m


def hamiltonian_matrix(model: QuadraticBosonicModel) -> np.ndarray:
    """Matrix K with H = (1/2) A^+ K A + const, A = (a_1..a_N, a_1^+..a_N^+)."""
    n = model.n_modes
    g = model.couplings
    s, t = model.x_shifts, model.y_shifts
    a_blk = np.diag(model.frequencies + 2 * s + 2 * t) + g
    b_blk = np.diag(2 * s - 2 * t) + g
    k = np.zeros((2 * n, 2 * n))
    k[:n, :n] = a_blk
    k[:n, n:] = b_blk
    k[n:, :n] = b_blk
    k[n:, n:] = a_blk
    return k


@dataclass(frozen=True)
class NormalModeDecomposition:
    """Normal modes ordered by descending frequency (index 0 is "U").

    ``rotation`` has one row per normal mode; ``S`` maps (a, a^+) to (p, p^+).
    ``theta`` is the two-mode mixing angle, None for N > 2.
    """

    model: QuadraticBosonicModel
    frequencies: np.ndarray
    rotation: np.ndarray
    S: np.ndarray
    theta: float | None = None
    position_eigenvalues: np.ndarray = field(default=None, repr=False)

    @property
    def n_modes(self) -> int:
        return self.frequencies.size

    @property
    def mu_block(self) -> np.ndarray:
        return self.S[: self.n_modes, : self.n_modes]

    @property
    def nu_block(self) -> np.ndarray:
        return self.S[: self.n_modes, self.n_modes :]


def _fix_signs(r: np.ndarray) -> np.ndarray:
    # rows are eigenvectors; largest-magnitude entry made positive
    r = r.copy()
    for k in range(r.shape[0]):
        j = int(np.argmax(np.abs(r[k])))
        if r[k, j] < 0:
            r[k] = -r[k]
    return r


def diagonalize(model: QuadraticBosonicModel) -> NormalModeDecomposition:
    m = position_form(model)
    evals, evecs = sym_eigen(m)
    scale = np.max(np.abs(m))
    if evals[0] <= POSITIVITY_THRESHOLD * scale:
        raise UnstableHamiltonian(
            f"position-form matrix not positive definite (smallest eigenvalue {evals[0]:.3e})"
        )
    order = np.argsort(-evals, kind="stable")
    evals = evals[order]
    r = evecs[:, order].T
    theta = None
    if model.n_modes == 2:
        ua, ub = r[0]
        if ua < 0 or (ua == 0 and ub < 0):
            ua, ub = -ua, -ub
        theta = float(np.arctan2(-ub, ua))
        # cos/sin straight from the eigenvector keep exact zeros exact
        norm = np.hypot(ua, ub)
        c, s = ua / norm, -ub / norm
        r = np.array([[c, -s], [s, c]])
    else:
        r = _fix_signs(r)
    freqs = np.sqrt(evals)
    ratio = freqs[:, None] / model.position_frequencies[None, :]
    mu_blk = r * mu(ratio)
    nu_blk = r * nu(ratio)
    s_mat = np.block([[mu_blk, nu_blk], [nu_blk.conj(), mu_blk.conj()]])
    return NormalModeDecomposition(
        model=model,
        frequencies=freqs,
        rotation=r,
        S=s_mat,
        theta=theta,
        position_eigenvalues=evals,
    )


def bosonic_metric(n: int) -> np.ndarray:
    return np.diag(np.r_[np.ones(n), -np.ones(n)])


def symplectic_residual(decomp: NormalModeDecomposition) -> float:
    """max |S K S^+ - K| with K = diag(1, -1); zero iff commutators are preserved."""
    k = bosonic_metric(decomp.n_modes)
    s = decomp.S
    return float(np.max(np.abs(s @ k @ s.conj().T - k)))


def williamson_residual(decomp: NormalModeDecomposition) -> float:
    """max |S^+ diag(w, w) S - K_H| relative to max |K_H|."""
    kh = hamiltonian_matrix(decomp.model)
    d = np.diag(np.r_[decomp.frequencies, decomp.frequencies])
    s = decomp.S
    return float(np.max(np.abs(s.conj().T @ d @ s - kh)) / np.max(np.abs(kh)))


def mode_normalization(decomp: NormalModeDecomposition) -> np.ndarray:
    """sum_i |mu_ki|^2 - |nu_ki|^2 for each normal mode (should be 1)."""
    return np.sum(np.abs(decomp.mu_block) ** 2 - np.abs(decomp.nu_block) ** 2, axis=1)


@dataclass(frozen=True)
class VacuumReport:
    """Normal-mode moments in the bare vacuum.

    ``normal[k, l] = <p_k^+ p_l>`` and ``anomalous[k, l] = <p_k p_l>``.
    """

    populations: np.ndarray
    normal: np.ndarray
    anomalous: np.ndarray

    def moment_matrix(self) -> np.ndarray:
        """<xi xi^+> for xi = (p, p^+); positive semidefinite for a physical state."""
        n = self.populations.size
        return np.block(
            [[np.eye(n) + self.normal.T, self.anomalous], [self.anomalous.conj(), self.normal]]
        )

    def is_bona_fide(self, tol: float = 1e-10) -> bool:
        return bool(np.linalg.eigvalsh(self.moment_matrix()).min() >= -tol)


def vacuum_report(decomp: NormalModeDecomposition) -> VacuumReport:
    mu_blk, nu_blk = decomp.mu_block, decomp.nu_block
    normal = nu_blk.conj() @ nu_blk.T
    anomalous = mu_blk @ nu_blk.T
    pops = np.clip(np.real(np.diag(normal)), 0.0, None)
    return VacuumReport(populations=pops, normal=normal, anomalous=anomalous)


def frequency_product_residual(model: QuadraticBosonicModel, decomp: NormalModeDecomposition) -> float:
    """prod_k w_k^2 - det M."""
    return float(np.prod(decomp.frequencies**2) - np.linalg.det(position_form(model)))


def ground_energy(decomp: NormalModeDecomposition) -> float:
    """Ground-state energy measured from the bare vacuum energy of sum_i w_i a_i^+ a_i."""
    return 0.5 * float(np.sum(decomp.frequencies) - np.sum(decomp.model.frequencies))
