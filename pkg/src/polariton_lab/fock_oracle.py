"""Brute-force two-mode oracle in a truncated Fock space.

Independent of the symplectic machinery: the Hamiltonian is written with
truncated ladder matrices and diagonalized in its two parity blocks. Only the
final comparison touches normal-mode data.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ExpansionBreakdown, InvalidModel
from .numerics import sym_eigen
from .quadratic import NormalModeDecomposition
from .two_mode import TwoModeParams

DEFAULT_CUTOFF = 14
BREAKDOWN_RESIDUAL = 0.05
MAX_LABEL_EXCITATIONS = 10


@dataclass(frozen=True)
class FockSpace2:
    """Two truncated modes, basis index n_a * cutoff + n_b."""

    cutoff: int = DEFAULT_CUTOFF

    def __post_init__(self):
        if self.cutoff < 2:
            raise InvalidModel("cutoff must be at least 2")

    @property
    def dim(self) -> int:
        return self.cutoff**2

    @cached_property
    def _ladder(self) -> np.ndarray:
        return np.diag(np.sqrt(np.arange(1.0, self.cutoff)), 1)

    @cached_property
    def a(self) -> np.ndarray:
        return np.kron(self._ladder, np.eye(self.cutoff))

    @cached_property
    def b(self) -> np.ndarray:
        return np.kron(np.eye(self.cutoff), self._ladder)

    @cached_property
    def occupations(self) -> tuple[np.ndarray, np.ndarray]:
        n = np.arange(self.cutoff)
        na, nb = np.meshgrid(n, n, indexing="ij")
        return na.ravel(), nb.ravel()

    @cached_property
    def parity(self) -> np.ndarray:
        na, nb = self.occupations
        return (na + nb) % 2


def build_fock_hamiltonian(p: TwoModeParams, cutoff: int = DEFAULT_CUTOFF) -> np.ndarray:
    fs = FockSpace2(cutoff)
    a, b = fs.a, fs.b
    xa = a + a.T
    xb = b + b.T
    # [i(b - b^+)]^2 = -(b - b^+)^2, real in this basis
    yb = b - b.T
    h = (
        p.omega_a * a.T @ a
        + p.omega_b * b.T @ b
        + p.lam * xa @ xb
        + p.D * xa @ xa
        - p.eta * xb @ xb
        - p.u * yb @ yb
    )
    return 0.5 * (h + h.T)


@dataclass(frozen=True)
class FockDiagonalization:
    space: FockSpace2
    energies: dict[int, np.ndarray]
    vectors: dict[int, np.ndarray]
    indices: dict[int, np.ndarray]

    @property
    def ground_energy(self) -> float:
        return float(self.energies[0][0])

    def full_vector(self, parity: int, k: int) -> np.ndarray:
        v = np.zeros(self.space.dim)
        v[self.indices[parity]] = self.vectors[parity][:, k]
        return v

    def polariton_frequencies(self) -> tuple[float, float]:
        """(w_U, w_L) read off the odd sector: the two lowest single excitations."""
        gaps = self.energies[1] - self.ground_energy
        w_l = gaps[0]
        for g in gaps[1:]:
            # skip a triple excitation of the lower mode if it comes first
            if abs(g - 3 * w_l) > 1e-6 * max(1.0, g):
                return float(g), float(w_l)
        raise ExpansionBreakdown("could not identify the upper polariton in the odd sector")


def diagonalize_fock(p: TwoModeParams, cutoff: int = DEFAULT_CUTOFF) -> FockDiagonalization:
    fs = FockSpace2(cutoff)
    h = build_fock_hamiltonian(p, cutoff)
    energies, vectors, indices = {}, {}, {}
    for par in (0, 1):
        idx = np.flatnonzero(fs.parity == par)
        e, v = sym_eigen(h[np.ix_(idx, idx)])
        energies[par], vectors[par], indices[par] = e, v, idx
    return FockDiagonalization(fs, energies, vectors, indices)


@dataclass(frozen=True)
class OraclePopulations:
    n_U: float
    n_L: float
    residual: float
    omega_U: float
    omega_L: float
    coefficients: dict[tuple[int, int], float]


def oracle_number_operators(diag: FockDiagonalization) -> tuple[np.ndarray, np.ndarray]:
    """(N_U, N_L) built from the oracle's own single-excitation amplitudes.

    For a quadratic Hamiltonian a_i = sum_k conj(mu_ki) p_k - nu_ki p_k^+, so
    <1_k|a_i^+|G> = conj(mu_ki) and <1_k|a_i|G> = -nu_ki.
    """
    fs = diag.space
    g = diag.full_vector(0, 0)
    w_u, w_l = diag.polariton_frequencies()
    odd_gaps = diag.energies[1] - diag.ground_energy
    ops = []
    for w in (w_u, w_l):
        one = diag.full_vector(1, int(np.argmin(np.abs(odd_gaps - w))))
        p_k = np.zeros((fs.dim, fs.dim))
        for a_i in (fs.a, fs.b):
            mu_ki = one @ (a_i.T @ g)
            nu_ki = -(one @ (a_i @ g))
            p_k += mu_ki * a_i + nu_ki * a_i.T
        ops.append(p_k.T @ p_k)
    return ops[0], ops[1]


def _candidates(gap: float, w_u: float, w_l: float, tol: float) -> list[tuple[int, int]]:
    hits = []
    for total in range(0, MAX_LABEL_EXCITATIONS + 1, 2):
        for n_u in range(total + 1):
            n_l = total - n_u
            if abs(n_l * w_l + n_u * w_u - gap) <= tol:
                hits.append((n_l, n_u))
    return hits


def _clusters(gaps: np.ndarray, tol: float) -> list[np.ndarray]:
    groups, start = [], 0
    for i in range(1, gaps.size + 1):
        if i == gaps.size or gaps[i] - gaps[i - 1] > tol:
            groups.append(np.arange(start, i))
            start = i
    return groups


def oracle_populations(
    p: TwoModeParams,
    cutoff: int = DEFAULT_CUTOFF,
    *,
    max_excitations: int | None = None,
    label_tol: float = 1e-4,
) -> OraclePopulations:
    """Populations from the overlaps of the bare vacuum with the exact eigenstates.

    Each even eigenstate is labeled |N_L, N_U> by matching its gap to
    N_L w_L + N_U w_U, with w_U, w_L taken from the oracle's own odd sector.
    Exactly degenerate labels (e.g. 2 w_U = 4 w_L) are separated by
    diagonalizing the oracle's number operator inside the cluster. Then
    n_U = sum_X N_U(X) |<X|0>|^2 and likewise for n_L.

    ``max_excitations=2`` keeps only G, 2_L, 1_L1_U and 2_U, which gives the
    truncated estimates n_U = 2|c_2U|^2 + |c_1L1U|^2, n_L = 2|c_2L|^2 + |c_1L1U|^2.
    ``residual`` is the vacuum weight outside the kept states.
    """
    diag = diagonalize_fock(p, cutoff)
    w_u, w_l = diag.polariton_frequencies()
    limit = MAX_LABEL_EXCITATIONS if max_excitations is None else max_excitations
    vecs = diag.vectors[0]
    # the bare vacuum is basis index 0, the first entry of the even block
    overlaps = vecs[0, :]
    gaps = diag.energies[0] - diag.ground_energy
    even = diag.indices[0]
    n_u_op = None
    coeffs: dict[tuple[int, int], float] = {}
    for group in _clusters(gaps, label_tol):
        gap = float(np.mean(gaps[group]))
        if gap > (limit + 1) * max(w_u, w_l):
            break
        cands = _candidates(gap, w_u, w_l, label_tol)
        if not cands:
            continue
        if len(group) == 1 and len(cands) == 1:
            labeled = [(cands[0], float(overlaps[group[0]]))]
        else:
            if n_u_op is None:
                n_u_op = oracle_number_operators(diag)[0][np.ix_(even, even)]
            sub = vecs[:, group]
            occ, rot = sym_eigen(sub.T @ n_u_op @ sub)
            c_rot = rot.T @ overlaps[group]
            labeled = []
            for nu_val, c in zip(occ, c_rot):
                n_up = int(round(nu_val))
                n_lo = (gap - n_up * w_u) / w_l
                if abs(nu_val - n_up) < 1e-3 and abs(n_lo - round(n_lo)) < 1e-3:
                    labeled.append(((int(round(n_lo)), n_up), float(c)))
        for lab, c in labeled:
            if sum(lab) <= limit and lab not in coeffs:
                coeffs[lab] = c
    n_u = sum(lab[1] * c * c for lab, c in coeffs.items())
    n_l = sum(lab[0] * c * c for lab, c in coeffs.items())
    residual = max(0.0, 1.0 - sum(c * c for c in coeffs.values()))
    if residual > BREAKDOWN_RESIDUAL:
        raise ExpansionBreakdown(f"overlap residual {residual:.3g} exceeds {BREAKDOWN_RESIDUAL}")
    return OraclePopulations(float(n_u), float(n_l), residual, w_u, w_l, coeffs)


def _polariton_operators(decomp: NormalModeDecomposition, fs: FockSpace2) -> list[np.ndarray]:
    ops = []
    mu_blk, nu_blk = decomp.mu_block, decomp.nu_block
    modes = (fs.a, fs.b)
    for k in range(decomp.n_modes):
        op = sum(mu_blk[k, i] * modes[i] + nu_blk[k, i] * modes[i].T for i in range(2))
        ops.append(op)
    return ops


def polariton_vacuum_check(
    p: TwoModeParams, decomp: NormalModeDecomposition, cutoff: int = DEFAULT_CUTOFF
) -> float:
    """max_k ||p_k |G>|| for the truncated ground state; zero for exact polariton operators."""
    diag = diagonalize_fock(p, cutoff)
    g = diag.full_vector(0, 0)
    return float(max(np.linalg.norm(op @ g) for op in _polariton_operators(decomp, diag.space)))


def single_excitation_overlaps(
    p: TwoModeParams, decomp: NormalModeDecomposition, cutoff: int = DEFAULT_CUTOFF
) -> tuple[float, float]:
    """(|<1_U|p_U^+|G>|, |<1_L|p_L^+|G>|); both 1 for exact polariton operators."""
    diag = diagonalize_fock(p, cutoff)
    g = diag.full_vector(0, 0)
    w_u, w_l = diag.polariton_frequencies()
    odd_gaps = diag.energies[1] - diag.ground_energy
    k_u = int(np.argmin(np.abs(odd_gaps - w_u)))
    k_l = int(np.argmin(np.abs(odd_gaps - w_l)))
    p_u, p_l = _polariton_operators(decomp, diag.space)
    one_u = diag.full_vector(1, k_u)
    one_l = diag.full_vector(1, k_l)
    return float(abs(one_u @ (p_u.conj().T @ g))), float(abs(one_l @ (p_l.conj().T @ g)))
