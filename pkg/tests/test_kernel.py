import numpy as np
import pytest

from colgibbs import build_kernel


def test_entries_p2():
    k = build_kernel(0.9, 2)
    assert np.allclose(k.matrix, [[0.9, 0.81], [0.81, 0.81]])


def test_scalar_case():
    k = build_kernel(0.5, 1)
    assert np.allclose(k.matrix, [[0.5]])
    assert np.allclose(k.inverse, [[2.0]])


def test_positive_definite_p50():
    k = build_kernel(0.9, 50)
    # independent check: dense symmetric eigensolve on the built matrix
    eigs = np.linalg.eigvalsh(k.matrix)
    assert eigs.min() > 0


def test_inverse_identity():
    for alpha, p in [(0.5, 5), (0.9, 50), (0.99, 30)]:
        k = build_kernel(alpha, p)
        resid = np.linalg.norm(k.matrix @ k.inverse - np.eye(p))
        assert resid / np.linalg.norm(k.matrix @ k.inverse) < 1e-10


@pytest.mark.parametrize("alpha", [0.0, 1.0, -0.5, 1.5])
def test_alpha_domain(alpha):
    with pytest.raises(ValueError):
        build_kernel(alpha, 5)


def test_p_domain():
    with pytest.raises(ValueError):
        build_kernel(0.9, 0)


def test_symmetry_and_decay():
    k = build_kernel(0.8, 12)
    assert np.array_equal(k.matrix, k.matrix.T)
    diag = np.diag(k.matrix)
    assert np.all(np.diff(diag) < 0)
    assert np.allclose(diag, 0.8 ** np.arange(1, 13))


def test_quadratic_form_positive():
    k = build_kernel(0.85, 8)
    rng = np.random.default_rng(0)
    for _ in range(20):
        v = rng.standard_normal(8)
        assert k.quad_inverse(v) > 0
    assert k.quad_inverse(np.zeros(8)) == 0.0
