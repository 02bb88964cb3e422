import numpy as np
import pytest
import scipy.linalg as sla
import scipy.sparse as sp
from hypothesis import given
from hypothesis import strategies as st

from polariton_lab.errors import IntegrationFailure, InvalidMatrix, InvalidSystem
from polariton_lab.numerics import OdeSystem, as_symmetric, integrate_linear_ode, sym_eigen


def test_identity_and_diagonal():
    e, v = sym_eigen(np.eye(2))
    assert np.array_equal(e, [1.0, 1.0])
    assert np.array_equal(v, np.eye(2))
    e, v = sym_eigen(np.diag([4.0, 9.0]))
    assert np.allclose(e, [4, 9], atol=0, rtol=0)
    assert np.allclose(np.abs(v), np.eye(2), atol=1e-15)


def test_two_mode_position_form_eigenvalues():
    # (2.16 -+ sqrt(0.16^2 + 0.64)) / 2
    e, _ = sym_eigen([[1.16, 0.4], [0.4, 1.0]])
    r = np.sqrt(0.16**2 + 4 * 0.16)
    assert e == pytest.approx([(2.16 - r) / 2, (2.16 + r) / 2], abs=1e-14)
    assert e == pytest.approx([0.67208, 1.48792], abs=5e-6)
    # characteristic polynomial roots as an independent check
    assert np.sort(np.roots([1, -2.16, 1.16 - 0.16])) == pytest.approx(e, abs=1e-12)


def test_symmetrization_and_bad_input():
    a = as_symmetric([[1.0, 2.0], [2.0 + 1e-15, 3.0]])
    assert a[0, 1] == a[1, 0]
    with pytest.raises(InvalidMatrix):
        sym_eigen([[1.0, np.nan], [np.nan, 1.0]])
    with pytest.raises(InvalidMatrix):
        sym_eigen(np.ones((2, 3)))


def test_random_symmetric_batch(rng):
    for _ in range(1000):
        n = int(rng.integers(2, 65))
        a = rng.uniform(-10, 10, (n, n))
        a = 0.5 * (a + a.T)
        e, v = sym_eigen(a)
        scale = np.max(np.abs(a))
        assert np.max(np.abs(a - (v * e) @ v.T)) <= 1e-10 * scale
        assert np.max(np.abs(v.T @ v - np.eye(n))) <= 1e-12
        assert np.all(np.diff(e) >= 0)


def test_large_matrices_use_lapack(rng):
    a = rng.normal(size=(100, 100))
    a = a + a.T
    e, v = sym_eigen(a)
    assert e == pytest.approx(np.linalg.eigvalsh(a), abs=1e-10)


@given(st.integers(2, 12), st.integers(0, 2**31))
def test_eigen_matches_lapack(n, seed):
    r = np.random.default_rng(seed)
    a = r.normal(size=(n, n))
    a = a + a.T
    assert sym_eigen(a)[0] == pytest.approx(np.linalg.eigvalsh(a), abs=1e-10)


def test_pure_phase():
    out = integrate_linear_ode(OdeSystem(np.array([[1j]]), np.array([1.0]), 2 * np.pi), [2 * np.pi])
    assert abs(out[-1, 0] - 1.0) < 1e-8


def test_zero_generator_constant():
    x0 = np.array([1.0, -2.0 + 1j, 3.0])
    out = integrate_linear_ode(OdeSystem(np.zeros((3, 3)), x0, 5.0), [0.0, 1.0, 5.0])
    assert np.array_equal(out, np.tile(x0, (3, 1)))


def test_rotation_norm_and_expm_oracle():
    g = np.array([[0.0, -1.0], [1.0, 0.0]])
    x0 = np.array([0.6, 0.8])
    t = 7.3
    out = integrate_linear_ode(OdeSystem(g, x0, t), [t])[-1]
    assert abs(np.linalg.norm(out) - 1.0) < 1e-8
    assert np.max(np.abs(out - sla.expm(g * t) @ x0)) < 1e-7


def test_random_anti_hermitian_vs_expm(rng):
    for _ in range(10):
        n = int(rng.integers(2, 33))
        h = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        h = 0.5 * (h + h.conj().T)
        x0 = rng.normal(size=n) + 1j * rng.normal(size=n)
        x0 /= np.linalg.norm(x0)
        t = 3.0
        times = np.linspace(0, t, 4)
        out = integrate_linear_ode(OdeSystem(1j * h, x0, t), times)
        for k, tk in enumerate(times):
            exact = sla.expm(1j * h * tk) @ x0
            assert np.linalg.norm(out[k] - exact) <= 1e-7
            assert abs(np.linalg.norm(out[k]) - 1) <= 1e-8


def test_sparse_generator_and_matrix_state():
    h = sp.diags([1.0, 2.0, 3.0]).tocsr()
    x0 = np.eye(3)
    out = integrate_linear_ode(OdeSystem(1j * h, x0, 1.0), [1.0])[-1]
    assert np.allclose(out, np.diag(np.exp(1j * np.array([1.0, 2.0, 3.0]))), atol=1e-8)


def test_ode_validation():
    with pytest.raises(InvalidSystem):
        OdeSystem(np.array([[np.inf]]), np.array([1.0]), 1.0)
    with pytest.raises(InvalidSystem):
        OdeSystem(np.eye(2), np.ones(3), 1.0)
    with pytest.raises(InvalidSystem):
        OdeSystem(np.eye(2), np.ones(2), 0.0)
    sys_ = OdeSystem(np.eye(2), np.ones(2), 1.0)
    with pytest.raises(InvalidSystem):
        integrate_linear_ode(sys_, [0.5, 0.2])
    with pytest.raises(InvalidSystem):
        integrate_linear_ode(sys_, [2.0])


def test_step_underflow():
    # a budget no step can meet
    sys_ = OdeSystem(np.array([[0.0, -50.0], [50.0, 0.0]]), np.array([1.0, 0.0]), 10.0)
    with pytest.raises(IntegrationFailure):
        integrate_linear_ode(sys_, [10.0], rtol=1e-30, norm_tol=1e-30)
