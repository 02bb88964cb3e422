"""Closed forms for the two-mode cavity/matter Hamiltonian.

    H = w_a a^+a + w_b b^+b + lam (a + a^+)(b + b^+) + D (a + a^+)^2
        - eta (b + b^+)^2 + u [i(b - b^+)]^2

With eta = u = 0 this is the Hopfield-type model with an A^2 term; the Thomas-Reiche-Kuhn
(TRK) sum rule fixes D = lam^2 / w_b.
"""

from __future__ import annotations

import dataclasses
import math
import sys
from dataclasses import dataclass

from .errors import DegenerateSpectrum, InvalidModel, UnstableHamiltonian
from .quadratic import QuadraticBosonicModel

SIGN_ZERO_RTOL = 1e-12
TRK_ATOL = 1e-12
_EPS = sys.float_info.epsilon


@dataclass(frozen=True)
class TwoModeParams:
    omega_a: float
    omega_b: float = 1.0
    lam: float = 0.0
    D: float = 0.0
    eta: float = 0.0
    u: float = 0.0

    def __post_init__(self):
        vals = (self.omega_a, self.omega_b, self.lam, self.D, self.eta, self.u)
        if not all(math.isfinite(float(v)) for v in vals):
            raise InvalidModel("parameters must be finite")
        if self.omega_a <= 0 or self.omega_b <= 0:
            raise InvalidModel("bare frequencies must be positive")
        if self.lam < 0 or self.D < 0 or self.eta < 0:
            raise InvalidModel("lam, D and eta must be non-negative")
        if self.omega_b + 4 * self.u <= 0:
            raise InvalidModel("w_b + 4u must be positive")

    @property
    def delta(self) -> float:
        return self.omega_a - self.omega_b

    @property
    def stability_margin(self) -> float:
        """(w_a + 4D)(w_b - 4 eta) - 4 lam^2; positive iff a ground state exists."""
        return (self.omega_a + 4 * self.D) * (self.omega_b - 4 * self.eta) - 4 * self.lam**2

    @property
    def is_stable(self) -> bool:
        return self.stability_margin > 0

    def check_stable(self) -> "TwoModeParams":
        if not self.stability_margin > 0:
            raise UnstableHamiltonian(
                f"unstable parameters: (w_a+4D)(w_b-4eta)-4lam^2 = {self.stability_margin:.6g} <= 0"
            )
        return self

    def to_model(self) -> QuadraticBosonicModel:
        return QuadraticBosonicModel.two_mode(
            self.omega_a, self.omega_b, self.lam, self.D, self.eta, self.u
        )

    def replace(self, **changes) -> "TwoModeParams":
        return dataclasses.replace(self, **changes)


def trk_D(lam: float, omega_b: float = 1.0) -> float:
    if omega_b <= 0:
        raise InvalidModel("w_b must be positive")
    return lam * lam / omega_b


def _m_entries(p: TwoModeParams):
    big_b = p.omega_b + 4 * p.u
    m_aa = p.omega_a * (p.omega_a + 4 * p.D)
    m_bb = (p.omega_b - 4 * p.eta) * big_b
    m_ab = 2 * p.lam * math.sqrt(p.omega_a * big_b)
    return m_aa, m_bb, m_ab


def _squared_frequencies(p: TwoModeParams):
    p.check_stable()
    m_aa, m_bb, m_ab = _m_entries(p)
    split = math.hypot(2 * m_ab, m_aa - m_bb)
    upper = 0.5 * (m_aa + m_bb + split)
    det = p.omega_a * (p.omega_b + 4 * p.u) * p.stability_margin
    # lower root from the product avoids cancellation in (M0 - split)/2
    return upper, det / upper, split


def polariton_frequencies(p: TwoModeParams) -> tuple[float, float]:
    up2, lo2, _ = _squared_frequencies(p)
    return math.sqrt(up2), math.sqrt(lo2)


def _angle(p: TwoModeParams) -> float:
    m_aa, m_bb, m_ab = _m_entries(p)
    return 0.5 * math.atan2(-2 * m_ab, m_aa - m_bb)


def mixing_angle(p: TwoModeParams) -> float:
    """theta in [-pi/2, 0]; -pi/2 only in the uncoupled limit with w_a < w_b."""
    _, _, split = _squared_frequencies(p)
    if split == 0.0:
        raise DegenerateSpectrum("w_U == w_L: mixing angle undefined")
    return _angle(p)


def _cos2_sin2(p: TwoModeParams) -> tuple[float, float]:
    # cos^2, sin^2 of theta from cos(2 theta) = d/split, without cancellation
    m_aa, m_bb, m_ab = _m_entries(p)
    d, q = m_aa - m_bb, 2 * m_ab
    split = math.hypot(q, d)
    if split == 0.0:
        return 1.0, 0.0
    if d >= 0:
        s2 = 0.5 * (q / split) * (q / (split + d))
        return 1.0 - s2, s2
    c2 = 0.5 * (q / split) * (q / (split - d))
    return c2, 1.0 - c2


def _nu2(x: float) -> float:
    # (sqrt(x) - 1/sqrt(x))^2 / 4 = (x - 1)^2 / (4x); ratios within rounding of 1 are exact
    d = x - 1.0
    if abs(d) <= 8 * _EPS:
        return 0.0
    return d * d / (4.0 * x)


def populations(p: TwoModeParams) -> tuple[float, float]:
    """Bare-vacuum populations (n_U, n_L)."""
    w_u, w_l = polariton_frequencies(p)
    c2, s2 = _cos2_sin2(p)
    big_b = p.omega_b + 4 * p.u
    n_u = c2 * _nu2(w_u / p.omega_a) + s2 * _nu2(w_u / big_b)
    n_l = s2 * _nu2(w_l / p.omega_a) + c2 * _nu2(w_l / big_b)
    return n_u, n_l


def product_rule(p: TwoModeParams) -> float:
    """w_U^2 w_L^2 as predicted by the determinant of the position form."""
    return (
        p.omega_a
        * (p.omega_b + 4 * p.u)
        * ((p.omega_a + 4 * p.D) * (p.omega_b - 4 * p.eta) - 4 * p.lam**2)
    )


def trk_product_rule(p: TwoModeParams) -> float:
    """w_U w_L for eta = u = 0: w_a w_b sqrt(1 + 4(D - lam^2/w_b)/w_a)."""
    return p.omega_a * p.omega_b * math.sqrt(1 + 4 * (p.D - p.lam**2 / p.omega_b) / p.omega_a)


def population_sign(n_u: float, n_l: float) -> int:
    diff = n_u - n_l
    if abs(diff) <= SIGN_ZERO_RTOL * (n_u + n_l + 1e-300):
        return 0
    return 1 if diff > 0 else -1


@dataclass(frozen=True)
class SignClassification:
    case: str
    F: float
    D_plus: float
    D_minus: float
    lam_max: float
    D_max: float
    predicted_sign: int

    @property
    def theorem_applies(self) -> bool:
        return self.case != "outside"


def F_of_D(p: TwoModeParams) -> float:
    w_u, w_l = polariton_frequencies(p)
    wa, wb = p.omega_a, p.omega_b
    return 4 * p.D * wa * wb - (w_u * w_l - wa * wb) * (wa + wb)


def d_roots(omega_a: float, omega_b: float, lam: float) -> tuple[float, float]:
    """Roots D_+ >= D_- of F(D); NaN when they are complex."""
    disc = (omega_b - omega_a) ** 2 - 16 * omega_a * lam**2 / omega_b
    if disc < 0:
        return math.nan, math.nan
    pref = (omega_a + omega_b) / (8 * omega_a)
    r = math.sqrt(disc)
    return pref * ((omega_b - omega_a) + r), pref * ((omega_b - omega_a) - r)


def lam_max(omega_a: float, omega_b: float) -> float:
    """Coupling above which F(D) has no real root; NaN unless w_b > w_a."""
    if omega_b <= omega_a:
        return math.nan
    return math.sqrt(omega_b * (omega_b - omega_a) ** 2 / (16 * omega_a))


def d_max_lower_bound(omega_a: float, omega_b: float, lam: float) -> float:
    return (omega_b + omega_a) / (omega_b - omega_a) * lam**2 / omega_b


def _sign(x: float, tol: float) -> int:
    if abs(x) <= tol:
        return 0
    return 1 if x > 0 else -1


def classify_sign(p: TwoModeParams) -> SignClassification:
    """Predict sign(n_U - n_L) from the sign of D - lam^2/w_b.

    The prediction is guaranteed in three regimes: (i) w_b <= w_a; (ii) w_b > w_a
    and lam >= lam_max; (iii) w_b > w_a, lam < lam_max and D < D_max. Outside
    them the exact sign sign(D - lam^2/w_b) * sign(F) is reported instead.
    """
    if p.eta != 0 or p.u != 0:
        raise InvalidModel("sign classification requires eta = u = 0")
    wa, wb, lam = p.omega_a, p.omega_b, p.lam
    f = F_of_D(p)
    d_plus, d_minus = d_roots(wa, wb, lam)
    lmax = lam_max(wa, wb)
    trk = lam * lam / wb
    trk_sign = _sign(p.D - trk, TRK_ATOL)
    if wb <= wa:
        case = "(i)"
    else:
        disc = (wb - wa) ** 2 - 16 * wa * lam**2 / wb
        if disc <= 0:
            case = "(ii)"
        elif p.D < d_minus:
            case = "(iii)"
        else:
            case = "outside"
    if case == "outside":
        scale = 4 * max(p.D, trk) * wa * wb
        predicted = trk_sign * _sign(f, TRK_ATOL * max(scale, 1e-300))
    else:
        predicted = trk_sign
    return SignClassification(
        case=case,
        F=f,
        D_plus=d_plus,
        D_minus=d_minus,
        lam_max=lmax,
        D_max=d_minus,
        predicted_sign=predicted,
    )


def equal_population_u(omega_a: float, omega_b: float, lam: float, D: float, eta: float) -> float:
    """Image-term strength u that makes n_U = n_L."""
    u = -(omega_a + 4 * D) * eta / omega_a + (omega_b / omega_a) * (D - lam**2 / omega_b)
    try:
        TwoModeParams(omega_a, omega_b, lam, D, eta, u).check_stable()
    except InvalidModel as exc:
        raise UnstableHamiltonian(f"equal-population u={u:.6g} gives an unstable model: {exc}") from exc
    return u


def frequencies_and_populations(p: TwoModeParams) -> dict[str, float]:
    w_u, w_l = polariton_frequencies(p)
    n_u, n_l = populations(p)
    return {"omega_U": w_u, "omega_L": w_l, "n_U": n_u, "n_L": n_l}


def relative_difference(p: TwoModeParams) -> float:
    """(n_U - n_L) / (n_U + n_L); 0 when both vanish."""
    n_u, n_l = populations(p)
    tot = n_u + n_l
    return 0.0 if tot == 0 else (n_u - n_l) / tot


__all__ = [
    "TwoModeParams",
    "SignClassification",
    "trk_D",
    "polariton_frequencies",
    "mixing_angle",
    "populations",
    "product_rule",
    "trk_product_rule",
    "population_sign",
    "F_of_D",
    "d_roots",
    "lam_max",
    "d_max_lower_bound",
    "classify_sign",
    "equal_population_u",
    "frequencies_and_populations",
    "relative_difference",
]
