"""Generalized Dicke model: one cavity mode and a spin n/2 with A^2-like terms.

    H = w_a a^+a + w_b J_z + 2 lam J_x (a + a^+)/sqrt(n) + D (a + a^+)^2
        - eta (2 J_x)^2 / n + u (2 J_y)^2 / n

With J_x ~ sqrt(n)(b + b^+)/2, J_z ~ b^+b - n/2 this reduces to the effective
two-mode model as n -> infinity. The alternative ``convention="half"``
uses w_b J_z / 2 and lam J_x (a + a^+)/sqrt(n) instead, whose large-n limit
has matter frequency w_b/2 and coupling lam/2.

Basis index: N_a * (n + 1) + k, where k = m + n/2 counts spin excitations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ExpansionBreakdown, InvalidModel, ParityMixing
from .numerics import sym_eigen
from .two_mode import TwoModeParams, equal_population_u, polariton_frequencies, populations

DEFAULT_CUTOFF = 10
COMMUTATOR_TOL = 1e-10
BREAKDOWN_RESIDUAL = 0.05
LABELS = ("G", "1L", "1U", "2L", "1L1U", "2U")
CONVENTIONS = ("hp", "half")


def spin_matrices(n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(J_x, J_y, J_z) for spin n/2 in the J_z basis m = -n/2 .. n/2."""
    if n < 1:
        raise InvalidModel("spin size n must be >= 1")
    j = n / 2
    m = np.arange(-j, j + 1)
    jp = np.diag(np.sqrt(j * (j + 1) - m[:-1] * (m[:-1] + 1)), -1)
    jx = 0.5 * (jp + jp.T)
    jy = (jp - jp.T) / 2j
    return jx, jy, np.diag(m)


@dataclass(frozen=True)
class DickeParams:
    n: int
    omega_a: float = 1.0
    omega_b: float = 1.0
    lam: float = 0.0
    D: float = 0.0
    eta: float = 0.0
    u: float = 0.0
    cutoff: int = DEFAULT_CUTOFF
    convention: str = "hp"

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise InvalidModel("n must be a positive integer")
        if int(self.cutoff) != self.cutoff or self.cutoff < DEFAULT_CUTOFF:
            raise InvalidModel(f"cavity cutoff must be an integer >= {DEFAULT_CUTOFF}")
        if self.convention not in CONVENTIONS:
            raise InvalidModel(f"convention must be one of {CONVENTIONS}")
        if self.omega_a <= 0 or self.omega_b <= 0:
            raise InvalidModel("bare frequencies must be positive")

    @property
    def dim(self) -> int:
        return self.cutoff * (self.n + 1)

    def effective(self) -> TwoModeParams:
        """The bilinear two-mode model this Hamiltonian approaches for large n."""
        return TwoModeParams(self.omega_a, self.omega_b, self.lam, self.D, self.eta, self.u)

    @classmethod
    def equal_population(cls, n: int, lam: float, *, omega_a: float = 1.0, omega_b: float = 1.0,
                         eta_coeff: float = 0.23, cutoff: int = DEFAULT_CUTOFF) -> "DickeParams":
        """D = lam^2/w_b, eta = eta_coeff lam^2/w_a and u chosen so that n_U = n_L for large n."""
        D = lam**2 / omega_b
        eta = eta_coeff * lam**2 / omega_a
        u = equal_population_u(omega_a, omega_b, lam, D, eta)
        return cls(n, omega_a, omega_b, lam, D, eta, u, cutoff)


def _operators(p: DickeParams):
    ladder = np.diag(np.sqrt(np.arange(1.0, p.cutoff)), 1)
    jx, jy, jz = spin_matrices(p.n)
    i_a, i_s = np.eye(p.cutoff), np.eye(p.n + 1)
    a = np.kron(ladder, i_s)
    jx_, jz_ = np.kron(i_a, jx), np.kron(i_a, jz)
    # J_y^2 is real: -(J+ - J-)^2 / 4
    jy2 = np.kron(i_a, np.real(jy @ jy))
    return a, jx_, jy2, jz_


def parity_labels(p: DickeParams) -> np.ndarray:
    n_a = np.repeat(np.arange(p.cutoff), p.n + 1)
    k = np.tile(np.arange(p.n + 1), p.cutoff)
    return (n_a + k) % 2


def parity_operator(p: DickeParams) -> np.ndarray:
    return np.diag(1.0 - 2.0 * parity_labels(p))


def build_hamiltonian(p: DickeParams) -> np.ndarray:
    a, jx, jy2, jz = _operators(p)
    x = a + a.T
    if p.convention == "hp":
        matter, coupling = p.omega_b * jz, 2 * p.lam * jx @ x / math.sqrt(p.n)
    else:
        matter, coupling = 0.5 * p.omega_b * jz, p.lam * jx @ x / math.sqrt(p.n)
    h = (
        p.omega_a * a.T @ a
        + matter
        + coupling
        + p.D * x @ x
        - p.eta * 4 * jx @ jx / p.n
        + p.u * 4 * jy2 / p.n
    )
    return 0.5 * (h + h.T)


def parity_commutator_residual(h: np.ndarray, p: DickeParams) -> float:
    pi = parity_operator(p)
    return float(np.max(np.abs(h @ pi - pi @ h)))


@dataclass(frozen=True)
class DickeDiagonalization:
    params: DickeParams
    energies: np.ndarray
    vectors: np.ndarray
    parity: np.ndarray
    labeled: dict[str, int]

    @property
    def ground_energy(self) -> float:
        return float(self.energies[self.labeled["G"]])

    def labeled_energies(self, relative: bool = True) -> dict[str, float]:
        e0 = self.ground_energy if relative else 0.0
        return {k: float(self.energies[i]) - e0 for k, i in self.labeled.items()}


def diagonalize_with_parity(h: np.ndarray, p: DickeParams) -> DickeDiagonalization:
    """Diagonalize H inside each parity sector and label the six lowest states."""
    if parity_commutator_residual(h, p) > COMMUTATOR_TOL * max(1.0, float(np.max(np.abs(h)))):
        raise ParityMixing("Hamiltonian does not commute with parity")
    par = parity_labels(p)
    pi_diag = 1.0 - 2.0 * par
    energies, vectors, parities = [], [], []
    for sector in (0, 1):
        idx = np.flatnonzero(par == sector)
        e, v = sym_eigen(h[np.ix_(idx, idx)])
        full = np.zeros((p.dim, e.size))
        full[idx, :] = v
        expect = np.einsum("ik,i,ik->k", full, pi_diag, full)
        if np.any(np.abs(np.abs(expect) - 1.0) > 1e-6):
            raise ParityMixing("eigenstate without definite parity")
        energies.append(e)
        vectors.append(full)
        parities.append(np.full(e.size, sector))
    energies_all = np.concatenate(energies)
    order = np.argsort(energies_all, kind="stable")
    vecs = np.concatenate(vectors, axis=1)[:, order]
    pars = np.concatenate(parities)[order]
    energies_all = energies_all[order]
    even = np.flatnonzero(pars == 0)
    odd = np.flatnonzero(pars == 1)
    if even.size < 4 or odd.size < 2:
        raise ParityMixing("too few states in a parity sector to label")
    if energies_all[odd[0]] < energies_all[even[0]]:
        raise ParityMixing("ground state is not even")
    labeled = {
        "G": int(even[0]),
        "1L": int(odd[0]),
        "1U": int(odd[1]),
        "2L": int(even[1]),
        "1L1U": int(even[2]),
        "2U": int(even[3]),
    }
    return DickeDiagonalization(p, energies_all, vecs, pars, labeled)


@dataclass(frozen=True)
class OverlapCoefficients:
    c0: float
    c2U: float
    c2L: float
    c1L1U: float
    odd_max: float

    @property
    def residual(self) -> float:
        return 1.0 - (abs(self.c0) ** 2 + abs(self.c2U) ** 2 + abs(self.c2L) ** 2 + abs(self.c1L1U) ** 2)


def bare_ground_overlaps(diag: DickeDiagonalization) -> OverlapCoefficients:
    """Overlaps of the labeled states with |0> (cavity vacuum, J_z = -n/2)."""
    row = diag.vectors[0, :]
    lab = diag.labeled
    odd = np.flatnonzero(diag.parity == 1)
    c = OverlapCoefficients(
        c0=float(row[lab["G"]]),
        c2U=float(row[lab["2U"]]),
        c2L=float(row[lab["2L"]]),
        c1L1U=float(row[lab["1L1U"]]),
        odd_max=float(np.max(np.abs(row[odd]))) if odd.size else 0.0,
    )
    if c.residual > BREAKDOWN_RESIDUAL:
        raise ExpansionBreakdown(f"overlap residual {c.residual:.3g} exceeds {BREAKDOWN_RESIDUAL}")
    return c


def dicke_populations(c: OverlapCoefficients) -> tuple[float, float]:
    n_u = 2 * abs(c.c2U) ** 2 + abs(c.c1L1U) ** 2
    n_l = 2 * abs(c.c2L) ** 2 + abs(c.c1L1U) ** 2
    return n_u, n_l


def effective_energies(p: TwoModeParams) -> dict[str, float]:
    w_u, w_l = polariton_frequencies(p)
    return {"G": 0.0, "1L": w_l, "1U": w_u, "2L": 2 * w_l, "1L1U": w_l + w_u, "2U": 2 * w_u}


def _effective_ranks_ok(p: TwoModeParams, max_exc: int = 6) -> bool:
    # do the labeled combinations sit at the expected rank within their parity sector?
    w_u, w_l = polariton_frequencies(p)
    combos = [(nl, nu) for nl in range(max_exc + 1) for nu in range(max_exc + 1 - nl)]
    for sector, expected in ((0, [(0, 0), (2, 0), (1, 1), (0, 2)]), (1, [(1, 0), (0, 1)])):
        states = sorted((nl * w_l + nu * w_u, (nl, nu)) for nl, nu in combos if (nl + nu) % 2 == sector)
        if [lab for _, lab in states[: len(expected)]] != expected:
            return False
    return True


@dataclass(frozen=True)
class DickeComparisonRow:
    lam: float
    energies_dicke: tuple[float, ...]
    energies_eff: tuple[float, ...]
    n_dicke: tuple[float, float]
    n_eff: tuple[float, float]
    residual: float
    commutator: float
    crossing: bool


def compare_point(p: DickeParams) -> DickeComparisonRow:
    h = build_hamiltonian(p)
    diag = diagonalize_with_parity(h, p)
    c = bare_ground_overlaps(diag)
    e_d = diag.labeled_energies()
    eff = p.effective()
    e_e = effective_energies(eff)
    return DickeComparisonRow(
        lam=p.lam,
        energies_dicke=tuple(e_d[k] for k in LABELS),
        energies_eff=tuple(e_e[k] for k in LABELS),
        n_dicke=dicke_populations(c),
        n_eff=populations(eff),
        residual=c.residual,
        commutator=parity_commutator_residual(h, p),
        crossing=not _effective_ranks_ok(eff),
    )


def compare_with_effective(
    lams,
    n: int = 5,
    *,
    omega_a: float = 1.0,
    omega_b: float = 1.0,
    eta_coeff: float = 0.23,
    cutoff: int = DEFAULT_CUTOFF,
) -> list[DickeComparisonRow]:
    """Dicke vs effective model along a coupling sweep at the equal-population u.

    States are matched by parity and rank only. A row is flagged when the
    effective model puts another level among the labeled ranks, or when the
    labeled Dicke levels swap order relative to the previous row.
    """
    rows = []
    prev_order = None
    for lam in lams:
        p = DickeParams.equal_population(n, float(lam), omega_a=omega_a, omega_b=omega_b,
                                         eta_coeff=eta_coeff, cutoff=cutoff)
        row = compare_point(p)
        order = tuple(np.argsort(row.energies_dicke, kind="stable"))
        if prev_order is not None and order != prev_order:
            row = DickeComparisonRow(**{**row.__dict__, "crossing": True})
        prev_order = order
        rows.append(row)
    return rows
