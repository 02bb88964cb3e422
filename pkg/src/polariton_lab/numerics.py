"""Dense symmetric eigensolver and linear ODE propagation.

Both kernels are small and self-contained: a cyclic Jacobi eigensolver
(round-robin ordering, so every sweep is a handful of dense products) and a
classic RK4 integrator whose step is doubled or halved by a local-error test
and, for norm-preserving generators, a norm-conservation test.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Any

import numpy as np
import scipy.sparse as sp

from .errors import IntegrationFailure, InvalidMatrix, InvalidSystem

JACOBI_MAX_DIM = 64
_EPS = np.finfo(float).eps


def as_symmetric(m: Any) -> np.ndarray:
    """Return ``m`` as a float array with exactly equal mirrored entries."""
    a = np.array(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise InvalidMatrix(f"expected a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidMatrix("matrix has non-finite entries")
    return 0.5 * (a + a.T)


@lru_cache(maxsize=None)
def _round_robin(n: int) -> tuple[tuple[np.ndarray, np.ndarray], ...]:
    # Circle-method tournament: n-1 rounds of n/2 disjoint pairs (n even).
    players = list(range(n))
    rounds = []
    for _ in range(n - 1):
        half = n // 2
        p = np.array(players[:half])
        q = np.array(players[half:][::-1])
        rounds.append((np.minimum(p, q), np.maximum(p, q)))
        players = [players[0], players[-1]] + players[1:-1]
    return tuple(rounds)


def _jacobi(a: np.ndarray, max_sweeps: int = 60) -> tuple[np.ndarray, np.ndarray]:
    n = a.shape[0]
    a = a.copy()
    v = np.eye(n)
    if n == 1:
        return a.diagonal().copy(), v
    padded = n + (n % 2)
    schedule = []
    for p, q in _round_robin(padded):
        keep = q < n
        schedule.append((p[keep], q[keep]))

    scale = np.linalg.norm(a)
    if scale == 0.0:
        return np.zeros(n), v
    floor = 4 * n * _EPS * scale
    off_prev = np.inf
    for _ in range(max_sweeps):
        off = np.linalg.norm(a - np.diag(a.diagonal()))
        if off <= floor or off >= off_prev:
            break
        off_prev = off
        a = 0.5 * (a + a.T)
        for p, q in schedule:
            apq = a[p, q]
            active = apq != 0.0
            if not np.any(active):
                continue
            p, q, apq = p[active], q[active], apq[active]
            tau = (a[q, q] - a[p, p]) / (2.0 * apq)
            t = np.sign(tau) / (np.abs(tau) + np.sqrt(1.0 + tau * tau))
            t[tau == 0.0] = 1.0
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            # A <- J^T A J with J = [[c, s], [-s, c]] on each (p, q) block.
            ap, aq = a[p, :], a[q, :]
            a[p, :], a[q, :] = c[:, None] * ap - s[:, None] * aq, s[:, None] * ap + c[:, None] * aq
            ap, aq = a[:, p], a[:, q]
            a[:, p], a[:, q] = ap * c - aq * s, ap * s + aq * c
            a[p, q] = 0.0
            a[q, p] = 0.0
            vp, vq = v[:, p], v[:, q]
            v[:, p], v[:, q] = vp * c - vq * s, vp * s + vq * c
    return a.diagonal().copy(), v


def sym_eigen(m: Any) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decompose a real symmetric matrix.

    Returns ``(eigenvalues, eigenvectors)`` with eigenvalues ascending and
    eigenvectors as orthonormal columns. Ties keep their original column
    order. Cyclic Jacobi handles dimensions up to ``JACOBI_MAX_DIM``; larger
    matrices go to LAPACK.
    """
    a = as_symmetric(m)
    if a.shape[0] <= JACOBI_MAX_DIM:
        w, v = _jacobi(a)
    else:
        w, v = np.linalg.eigh(a)
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


@dataclass(frozen=True)
class OdeSystem:
    """Linear system dx/dt = G x on [0, t_final].

    ``generator`` may be a dense array or a scipy sparse matrix. The state may
    be a vector or a matrix whose columns evolve independently.
    """

    generator: Any
    initial_state: np.ndarray
    t_final: float

    def __post_init__(self):
        g = self.generator
        data = g.data if sp.issparse(g) else np.asarray(g)
        if not np.all(np.isfinite(data)):
            raise InvalidSystem("generator has non-finite entries")
        if len(g.shape) != 2 or g.shape[0] != g.shape[1]:
            raise InvalidSystem(f"generator must be square, got {g.shape}")
        x0 = np.asarray(self.initial_state)
        if x0.shape[0] != g.shape[0]:
            raise InvalidSystem("generator and state dimensions differ")
        if not np.all(np.isfinite(x0)):
            raise InvalidSystem("initial state has non-finite entries")
        if not (np.isfinite(self.t_final) and self.t_final > 0):
            raise InvalidSystem("t_final must be finite and positive")


def _max_abs(g) -> float:
    if sp.issparse(g):
        return float(abs(g).max()) if g.nnz else 0.0
    return float(np.max(np.abs(g))) if g.size else 0.0


def _row_norm(g) -> float:
    if sp.issparse(g):
        return float(abs(g).sum(axis=1).max()) if g.nnz else 0.0
    return float(np.abs(g).sum(axis=1).max())


def is_norm_preserving(g, tol: float = 1e-12) -> bool:
    """True when G is anti-Hermitian, i.e. exp(tG) is unitary."""
    if sp.issparse(g):
        defect = _max_abs(g + g.conj().T)
    else:
        g = np.asarray(g)
        defect = float(np.max(np.abs(g + g.conj().T)))
    return defect <= tol * max(_max_abs(g), 1.0)


def _column_norms(y: np.ndarray) -> np.ndarray:
    return np.sqrt(np.sum(np.abs(y) ** 2, axis=0))


def integrate_linear_ode(
    system: OdeSystem,
    sample_times,
    *,
    rtol: float = 1e-9,
    norm_tol: float = 1e-10,
    max_steps: int = 10_000_000,
) -> np.ndarray:
    """Propagate ``system`` and return the state at each sample time.

    The result has shape ``(len(sample_times),) + initial_state.shape``.
    ``rtol`` bounds the accumulated local error relative to the state norm and
    ``norm_tol`` bounds the accumulated norm drift (only enforced for
    anti-Hermitian generators). Both budgets are spread over [0, t_final] in
    proportion to step length.
    """
    g = system.generator
    if not sp.issparse(g):
        g = np.asarray(g, dtype=complex)
    t_final = float(system.t_final)
    times = np.asarray(sample_times, dtype=float)
    if times.ndim != 1 or times.size == 0:
        raise InvalidSystem("sample_times must be a non-empty vector")
    if np.any(np.diff(times) < 0) or times[0] < 0 or times[-1] > t_final * (1 + 1e-12):
        raise InvalidSystem("sample_times must be ascending within [0, t_final]")

    conserve = is_norm_preserving(g)
    y = np.array(system.initial_state, dtype=complex)
    out = np.empty((times.size,) + y.shape, dtype=complex)
    cols = y.shape[0], -1

    rho = _row_norm(g)
    h = t_final if rho == 0.0 else min(t_final, 0.5 / rho)
    h_min = 1e-13 * t_final
    t = 0.0
    steps = 0
    n0 = _column_norms(y.reshape(cols))
    for i, target in enumerate(times):
        while target - t > 1e-14 * t_final:
            h_try = min(h, target - t)
            k1 = g @ y
            k2 = g @ (y + 0.5 * h_try * k1)
            k3 = g @ (y + 0.5 * h_try * k2)
            k4 = g @ (y + h_try * k3)
            y_new = y + (h_try / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            # For linear autonomous G the RK4 stages give h^4 G^4 y / 24
            # exactly; one more product gives the leading local error term.
            z4 = (h_try / 6.0) * (k1 + k4 - 2.0 * k3)
            err_vec = (h_try / 5.0) * (g @ z4)
            ynorm = max(float(np.sqrt(np.sum(n0**2))), np.finfo(float).tiny)
            err = np.linalg.norm(err_vec) / ynorm
            allowed = rtol * h_try / t_final
            drift = 0.0
            allowed_drift = norm_tol * h_try / t_final
            n1 = _column_norms(y_new.reshape(cols))
            if conserve:
                live = n0 > 0
                if np.any(live):
                    drift = float(np.max(np.abs(n1[live] - n0[live]) / n0[live]))
            if err > allowed or drift > allowed_drift:
                h = 0.5 * h_try
                if h < h_min:
                    raise IntegrationFailure(f"step-size underflow at t={t:.6g}")
                continue
            y = y_new
            n0 = n1
            t += h_try
            steps += 1
            if steps > max_steps:
                raise IntegrationFailure("maximum number of steps exceeded")
            # doubling h scales err by 32 and drift by 64 while budgets double
            if h_try == h and err <= allowed / 16 and drift <= allowed_drift / 32:
                h = min(2.0 * h, t_final)
        out[i] = y
    return out
