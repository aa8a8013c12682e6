"""
Power iteration on operators with known norms.
"""

import logging

import numpy as np
import pytest

from pydyadic.power import ConvergenceError, power_iteration


def test_diagonal_operator():
    """
    The norm of a diagonal matrix is its largest entry.
    """
    A = np.diag([3.0, 2.0, 0.5])
    result = power_iteration(lambda x: A.T @ (A @ x), np.ones(3), tol=1e-14, max_iter=2000)
    assert result.converged
    assert result.value == pytest.approx(3.0, rel=1e-6)
    assert result.as_dict() == {
        "value": result.value,
        "iterations": result.iterations,
        "converged": True,
    }


def test_residual_criterion_on_complex_vectors():
    """
    Complex operators converge under the residual criterion.
    """
    rng = np.random.default_rng(0)
    A = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
    x0 = rng.standard_normal(6) + 1j * rng.standard_normal(6)
    result = power_iteration(
        lambda x: A.conj().T @ (A @ x), x0, max_iter=20000, tol=1e-10, residual=True
    )
    assert result.converged
    assert result.value == pytest.approx(np.linalg.norm(A, 2), rel=1e-8)


def test_value_is_a_lower_bound():
    """
    Every reported value is a Rayleigh quotient, hence below the norm.
    """
    rng = np.random.default_rng(4)
    A = rng.standard_normal((10, 10))
    result = power_iteration(lambda x: A.T @ (A @ x), rng.standard_normal(10), max_iter=3)
    assert result.value <= np.linalg.norm(A, 2) + 1e-12


def test_non_convergence(caplog):
    """
    Running out of iterations warns, or raises when strict.
    """
    # tol=0 is only met by an exact fixed point
    A = np.array([[1.0, 0.0], [0.0, 0.999]])
    normal = lambda x: A.T @ (A @ x)
    with caplog.at_level(logging.WARNING, logger="pydyadic.power"):
        result = power_iteration(normal, np.array([0.0001, 1.0]), max_iter=2, tol=0.0)
    assert not result.converged
    assert "did not converge" in caplog.text
    with pytest.raises(ConvergenceError):
        power_iteration(normal, np.array([0.0001, 1.0]), max_iter=2, tol=0.0, strict=True)


def test_zero_operator_and_start():
    """
    The zero operator converges at once; a zero start is refused.
    """
    result = power_iteration(lambda x: 0 * x, np.ones(3))
    assert result.converged
    assert result.value == 0.0
    with pytest.raises(ValueError):
        power_iteration(lambda x: x, np.zeros(3))
