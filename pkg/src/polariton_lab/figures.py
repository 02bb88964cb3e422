"""Table builders for the figure-reproduction and sweep commands.

Every builder takes a frozen config dataclass and returns a list of
:class:`Table`. Grid points are independent and evaluated through a
caller-supplied ``mapper`` (``map`` by default), so parallel execution keeps
the output order fixed by grid index.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, fields
from functools import partial
from typing import Any, Callable, Iterable

import numpy as np

from . import dicke, microscopic, quench
from .errors import ConfigError, InvalidModel, UnstableHamiltonian
from .quadratic import diagonalize
from .two_mode import (
    TwoModeParams,
    equal_population_u,
    polariton_frequencies,
    populations,
    relative_difference,
)

Mapper = Callable[[Callable, Iterable], Iterable]


@dataclass(frozen=True)
class Table:
    name: str
    columns: tuple[str, ...]
    rows: list[tuple]


def grid(lo: float, hi: float, steps: int) -> np.ndarray:
    if steps < 2:
        raise ConfigError("grid steps must be >= 2")
    return np.linspace(lo, hi, steps)


# --- configs -----------------------------------------------------------------


class _Config:
    @classmethod
    def from_dict(cls, data: dict[str, Any]):
        names = {f.name for f in fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ConfigError(f"unknown parameter(s) for {cls.__name__}: {sorted(unknown)}")
        return cls(**data)


@dataclass(frozen=True)
class Fig1Config(_Config):
    omega_b: float = 1.0
    lam_max: float = 0.5
    lam_steps: int = 51
    delta_min: float = -0.5
    delta_max: float = 0.5
    delta_steps: int = 51
    lam_fixed: float = 0.2

    def __post_init__(self):
        grid(0, self.lam_max, self.lam_steps)
        grid(self.delta_min, self.delta_max, self.delta_steps)
        if self.omega_b <= 0 or self.lam_max < 0 or self.lam_fixed < 0:
            raise ConfigError("omega_b > 0 and non-negative couplings required")
        if self.omega_b + self.delta_min <= 0:
            raise ConfigError("delta_min must keep omega_a positive")


@dataclass(frozen=True)
class Fig2Config(_Config):
    lam: float = 0.1
    delta: float = 0.0
    gamma: float = 0.01  # in units of omega_a
    n_omega: int = quench.DEFAULT_N_OMEGA
    window: tuple[float, float] = quench.DEFAULT_WINDOW
    duration: float | None = None  # in units of 1/gamma; None picks it from the decay rates
    trk: bool = True
    n_samples: int = 101

    def __post_init__(self):
        object.__setattr__(self, "window", tuple(self.window))
        if self.gamma <= 0:
            raise ConfigError("gamma must be positive")
        if self.duration is not None and self.duration < 10:
            raise ConfigError("duration must be at least 10/gamma")
        self.params().check_stable()

    def params(self) -> TwoModeParams:
        omega_a = 1.0 + self.delta
        return TwoModeParams(omega_a, 1.0, self.lam, self.lam**2 if self.trk else 0.0)


@dataclass(frozen=True)
class Fig3Config(_Config):
    n_cavity: int = microscopic.DEFAULT_CAVITY_MODES
    n_matter: int = microscopic.DEFAULT_MATTER_MODES
    u: float = 0.0
    lam_min: float = 0.05
    lam_max: float = 0.3
    lam_steps: int = 26
    delta_min: float = -0.5
    delta_max: float = 0.5
    delta_steps: int = 21
    lam_fixed: float = 0.2

    def __post_init__(self):
        grid(self.lam_min, self.lam_max, self.lam_steps)
        grid(self.delta_min, self.delta_max, self.delta_steps)
        if self.n_cavity < 1 or self.n_matter < 1:
            raise ConfigError("need at least one cavity and one matter mode")


@dataclass(frozen=True)
class Fig4Config(_Config):
    lam: float = 0.25
    eta_coeff: float = 0.23
    u_steps: int = 41
    eta_steps: int = 41
    delta_min: float = -0.5
    delta_max: float = 0.5
    delta_steps: int = 41

    def __post_init__(self):
        grid(0, 1, self.u_steps)
        grid(0, 1, self.eta_steps)
        grid(self.delta_min, self.delta_max, self.delta_steps)
        if self.lam <= 0:
            raise ConfigError("lam must be positive")


@dataclass(frozen=True)
class Fig5Config(_Config):
    n: int = 5
    cutoff: int = dicke.DEFAULT_CUTOFF
    eta_coeff: float = 0.23
    lam_max: float = 0.3
    lam_steps: int = 31

    def __post_init__(self):
        grid(0, self.lam_max, self.lam_steps)
        dicke.DickeParams(self.n, cutoff=self.cutoff)


SWEEP_PARAMS = ("omega_a", "omega_b", "lam", "D", "eta", "u", "delta")


@dataclass(frozen=True)
class SweepAxis:
    name: str
    min: float
    max: float
    steps: int

    def __post_init__(self):
        if self.name not in SWEEP_PARAMS:
            raise ConfigError(f"unknown sweep parameter {self.name!r}; choose from {SWEEP_PARAMS}")
        grid(self.min, self.max, self.steps)

    def values(self) -> np.ndarray:
        return grid(self.min, self.max, self.steps)


@dataclass(frozen=True)
class SweepConfig(_Config):
    """Two-mode sweep. ``base`` holds fixed parameters; ``trk`` ties D to lam."""

    axes: tuple[SweepAxis, ...] = ()
    base: dict = field(default_factory=dict)
    trk: bool = False
    equal_population: bool = False

    def __post_init__(self):
        axes = tuple(a if isinstance(a, SweepAxis) else SweepAxis(**a) for a in self.axes)
        if not axes:
            raise ConfigError("sweep needs at least one axis")
        object.__setattr__(self, "axes", axes)
        bad = set(self.base) - set(SWEEP_PARAMS)
        if bad:
            raise ConfigError(f"unknown base parameter(s) {sorted(bad)}")
        # reject unstable points before any computation
        for point in self.points():
            self.params_at(point).check_stable()

    def points(self):
        return itertools.product(*(a.values() for a in self.axes))

    def params_at(self, point) -> TwoModeParams:
        values = {"omega_b": 1.0, "omega_a": 1.0, "lam": 0.0, "D": 0.0, "eta": 0.0, "u": 0.0}
        values.update(self.base)
        values.update({a.name: float(v) for a, v in zip(self.axes, point)})
        delta = values.pop("delta", None)
        if delta is not None:
            values["omega_a"] = values["omega_b"] + delta
        if self.trk:
            values["D"] = values["lam"] ** 2 / values["omega_b"]
        if self.equal_population:
            values["u"] = equal_population_u(
                values["omega_a"], values["omega_b"], values["lam"], values["D"], values["eta"]
            )
        try:
            return TwoModeParams(**values)
        except UnstableHamiltonian:
            raise
        except InvalidModel as exc:
            raise ConfigError(f"invalid parameters at {dict(zip([a.name for a in self.axes], point))}: {exc}") from exc


CONFIGS = {
    "fig1": Fig1Config,
    "fig2": Fig2Config,
    "fig3": Fig3Config,
    "fig4": Fig4Config,
    "fig5": Fig5Config,
    "sweep": SweepConfig,
}


# --- point functions (top level so they can cross process boundaries) ---------


def _pops_or_nan(p: TwoModeParams) -> tuple[float, float]:
    try:
        return populations(p)
    except UnstableHamiltonian:
        return math.nan, math.nan


def _fig1_point(omega_a: float, omega_b: float, lam: float) -> tuple[float, ...]:
    trk = _pops_or_nan(TwoModeParams(omega_a, omega_b, lam, lam**2 / omega_b))
    bare = _pops_or_nan(TwoModeParams(omega_a, omega_b, lam, 0.0))
    return (*trk, *bare)


def build_fig1(cfg: Fig1Config, mapper: Mapper = map) -> list[Table]:
    wb = cfg.omega_b
    cols = ("nU_trk", "nL_trk", "nU_noA2", "nL_noA2")
    lams = grid(0, cfg.lam_max, cfg.lam_steps)
    a = list(mapper(partial(_fig1_point, wb, wb), lams))
    deltas = grid(cfg.delta_min, cfg.delta_max, cfg.delta_steps)
    b = list(mapper(_fig1_delta_point, [(wb + d, wb, cfg.lam_fixed) for d in deltas]))
    return [
        Table("fig1a", ("lambda",) + cols, [(x, *r) for x, r in zip(lams, a)]),
        Table("fig1b", ("delta",) + cols, [(x, *r) for x, r in zip(deltas, b)]),
    ]


def _fig1_delta_point(args) -> tuple[float, ...]:
    return _fig1_point(*args)


def build_fig2(cfg: Fig2Config, mapper: Mapper = map) -> list[Table]:
    p = cfg.params()
    decomp = diagonalize(p.to_model())
    bath = quench.BathSpec.default(p.omega_a, cfg.gamma, cfg.n_omega, cfg.window)
    t_final = quench.default_duration(bath, decomp) if cfg.duration is None else cfg.duration / bath.gamma
    res = quench.propagate_decomposition(decomp, bath, t_final, cfg.n_samples)
    cov = quench.propagate_covariance(decomp, bath, t_final)
    out = quench.extract_output_populations(res, cov)
    dens = quench.emission_densities(res)
    w = res.bath.omegas
    n_u, n_l = populations(p)
    w_u, w_l = polariton_frequencies(p)
    up, lo = quench.split_weights(w, cov.occupations, w_u, w_l)
    peaks = quench.peak_positions(w, dens)
    summary = [
        ("t_final", t_final),
        ("omega_U", w_u),
        ("omega_L", w_l),
        ("peak_U", float(peaks[0])),
        ("peak_L", float(peaks[1])),
        ("nU_closed", n_u),
        ("nL_closed", n_l),
        ("nU_output", out.populations[0]),
        ("nL_output", out.populations[1]),
        ("weight_upper", up),
        ("weight_lower", lo),
        ("total_photons", cov.total_photons),
        ("max_normalization_error", float(np.max(np.abs(res.normalization() - 1)))),
        ("v_norm_final", float(res.v_norm()[-1])),
    ]
    v = np.abs(res.v)
    return [
        Table("fig2_amplitudes", ("omega", "phiU_sq", "phiL_sq"),
              [(x, a, b) for x, a, b in zip(w, dens[0], dens[1])]),
        Table("fig2_spectrum", ("omega", "S_omega"), list(zip(w, cov.spectrum))),
        Table("fig2_trajectory", ("t", "abs_vUU", "abs_vUL", "abs_vLU", "abs_vLL"),
              [(t, *m.ravel()) for t, m in zip(res.times, v)]),
        Table("fig2_summary", ("quantity", "value"), summary),
    ]


def _fig3_point(args) -> tuple[float, ...]:
    omega_a, lam, k, l, u = args
    c = microscopic.compare_multimode_vs_effective(omega_a, 1.0, lam, k, l, u)
    return (*c.n_mic, *c.n_eff, *c.discrepancy, c.elimination.eta)


def build_fig3(cfg: Fig3Config, mapper: Mapper = map) -> list[Table]:
    cols = ("nU_mic", "nL_mic", "nU_eff", "nL_eff", "rel_U", "rel_L", "eta")
    lams = grid(cfg.lam_min, cfg.lam_max, cfg.lam_steps)
    deltas = grid(cfg.delta_min, cfg.delta_max, cfg.delta_steps)
    a = list(mapper(_fig3_point, [(1.0, x, cfg.n_cavity, cfg.n_matter, cfg.u) for x in lams]))
    b = list(mapper(_fig3_point,
                    [(1.0 + d, cfg.lam_fixed, cfg.n_cavity, cfg.n_matter, cfg.u) for d in deltas]))
    return [
        Table("fig3a", ("lambda",) + cols, [(x, *r) for x, r in zip(lams, a)]),
        Table("fig3b", ("delta",) + cols, [(x, *r) for x, r in zip(deltas, b)]),
    ]


def _rel_or_nan(p_args) -> float:
    try:
        return relative_difference(TwoModeParams(*p_args))
    except (UnstableHamiltonian, InvalidModel):
        return math.nan


def _locus_u(omega_a, lam, D, eta) -> float:
    try:
        return equal_population_u(omega_a, 1.0, lam, D, eta)
    except UnstableHamiltonian:
        return math.nan


def build_fig4(cfg: Fig4Config, mapper: Mapper = map) -> list[Table]:
    lam = cfg.lam
    D = lam**2
    us = grid(-D, D, cfg.u_steps)
    etas = grid(0.0, D, cfg.eta_steps)
    deltas = grid(cfg.delta_min, cfg.delta_max, cfg.delta_steps)
    pts_a = [(1.0, 1.0, lam, D, eta, u) for eta in etas for u in us]
    field_a = list(mapper(_rel_or_nan, pts_a))
    pts_b = []
    for d in deltas:
        wa = 1.0 + d
        eta = cfg.eta_coeff * lam**2 / wa
        pts_b.extend((wa, 1.0, lam, D, eta, u) for u in us)
    field_b = list(mapper(_rel_or_nan, pts_b))
    locus_a = []
    for eta in etas:
        u0 = _locus_u(1.0, lam, D, eta)
        locus_a.append((eta, u0, _rel_or_nan((1.0, 1.0, lam, D, eta, u0))))
    locus_b = []
    for d in deltas:
        wa = 1.0 + d
        eta = cfg.eta_coeff * lam**2 / wa
        u0 = _locus_u(wa, lam, D, eta)
        locus_b.append((d, eta, u0, _rel_or_nan((wa, 1.0, lam, D, eta, u0))))
    return [
        Table("fig4a", ("eta", "u", "rel_diff", "u_locus"),
              [(pt[4], pt[5], f, _locus_u(1.0, lam, D, pt[4])) for pt, f in zip(pts_a, field_a)]),
        Table("fig4b", ("delta", "u", "rel_diff", "u_locus"),
              [(pt[0] - 1.0, pt[5], f, _locus_u(pt[0], lam, D, pt[4])) for pt, f in zip(pts_b, field_b)]),
        Table("fig4a_locus", ("eta", "u_locus", "rel_diff"), locus_a),
        Table("fig4b_locus", ("delta", "eta", "u_locus", "rel_diff"), locus_b),
    ]


def _fig5_point(args) -> dicke.DickeComparisonRow:
    n, lam, eta_coeff, cutoff = args
    p = dicke.DickeParams.equal_population(n, lam, eta_coeff=eta_coeff, cutoff=cutoff)
    return dicke.compare_point(p)


def build_fig5(cfg: Fig5Config, mapper: Mapper = map) -> list[Table]:
    lams = grid(0.0, cfg.lam_max, cfg.lam_steps)
    rows = list(mapper(_fig5_point, [(cfg.n, float(x), cfg.eta_coeff, cfg.cutoff) for x in lams]))
    # flag rank swaps between neighbouring couplings
    flags, prev = [], None
    for r in rows:
        order = tuple(np.argsort(r.energies_dicke, kind="stable"))
        flags.append(r.crossing or (prev is not None and order != prev))
        prev = order
    e_cols = tuple(f"E_{k}" for k in dicke.LABELS)
    return [
        Table("fig5_spectrum_dicke", ("lambda",) + e_cols,
              [(r.lam, *r.energies_dicke) for r in rows]),
        Table("fig5_spectrum_eff", ("lambda",) + e_cols,
              [(r.lam, *r.energies_eff) for r in rows]),
        Table("fig5_populations",
              ("lambda", "nU_dicke", "nL_dicke", "nU_eff", "nL_eff", "residual", "crossing"),
              [(r.lam, *r.n_dicke, *r.n_eff, r.residual, int(f)) for r, f in zip(rows, flags)]),
    ]


def _sweep_point(p: TwoModeParams) -> tuple[float, ...]:
    w_u, w_l = polariton_frequencies(p)
    n_u, n_l = populations(p)
    tot = n_u + n_l
    return (p.omega_a, p.omega_b, p.lam, p.D, p.eta, p.u, w_u, w_l, n_u, n_l,
            0.0 if tot == 0 else (n_u - n_l) / tot)


def build_sweep(cfg: SweepConfig, mapper: Mapper = map) -> list[Table]:
    points = list(cfg.points())
    params = [cfg.params_at(pt) for pt in points]
    rows = list(mapper(_sweep_point, params))
    cols = ("omega_a", "omega_b", "lam", "D", "eta", "u", "omega_U", "omega_L", "n_U", "n_L", "rel_diff")
    axis_cols = tuple(f"axis_{a.name}" for a in cfg.axes)
    return [Table("sweep", axis_cols + cols, [(*pt, *r) for pt, r in zip(points, rows)])]


BUILDERS = {
    "fig1": build_fig1,
    "fig2": build_fig2,
    "fig3": build_fig3,
    "fig4": build_fig4,
    "fig5": build_fig5,
    "sweep": build_sweep,
}
