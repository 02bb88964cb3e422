import numpy as np

from polariton_lab import cli, quadratic, verify


def test_pristine_build_passes(capsys):
    assert cli.main(["verify"]) == 0
    out = capsys.readouterr().out
    assert "[FAIL]" not in out
    assert out.count("[PASS]") == len(verify.CHECKS)


def test_nu_sign_error_is_reported_as_symplectic(monkeypatch, capsys):
    # sign slip inside nu: sqrt(x) + 1/sqrt(x) instead of the difference
    monkeypatch.setattr(quadratic, "nu", lambda x: 0.5 * (np.sqrt(x) + 1.0 / np.sqrt(x)))
    code = cli.main(["verify", "--set", 'checks=["symplectic", "symplectic-williamson", "normalization"]'])
    out = capsys.readouterr().out
    assert code == 1
    failed = [line for line in out.splitlines() if line.startswith("[FAIL]")]
    assert any("symplectic" in line for line in failed)


def test_global_nu_flip_is_caught(monkeypatch):
    original = quadratic.nu
    monkeypatch.setattr(quadratic, "nu", lambda x: -original(x))
    results = {r.name: r for r in verify.run_checks(["symplectic-williamson"])}
    assert not results["symplectic-williamson"].passed


def test_crashing_check_is_a_failure(monkeypatch):
    def boom(rng):
        raise RuntimeError("kaput")

    monkeypatch.setitem(verify.CHECKS, "eigensolver", boom)
    (r,) = verify.run_checks(["eigensolver"])
    assert not r.passed and "RuntimeError" in r.detail
    assert r.line().startswith("[FAIL] eigensolver")


def test_product_rule_residuals_small():
    rng = np.random.default_rng(0)
    for p in verify._random_stable(rng, 200):
        assert max(verify.product_rule_residuals(p)) < 1e-10
