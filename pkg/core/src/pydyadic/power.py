"""
Power iteration for the largest singular value of an operator that is only
available as a black box.
"""

import logging
from dataclasses import dataclass

import numpy as np

logger = logging.getLogger(__name__)

TOLERANCE = 1e-8
MAX_ITERATIONS = 500


class ConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class PowerResult:
    value: float
    iterations: int
    converged: bool
    vector: np.ndarray

    def as_dict(self):
        return {"value": self.value, "iterations": self.iterations, "converged": self.converged}


def power_iteration(
    normal,
    x0,
    max_iter=MAX_ITERATIONS,
    tol=TOLERANCE,
    residual=False,
    strict=False,
    label="power iteration",
):
    """
    Estimate the norm of A from `normal`, a callable applying A*A.

    Iterates x <- A*A x / |A*A x| and tracks the largest Rayleigh quotient
    seen, which is a lower bound for |A|^2 at every step. Stops when the
    quotient changes by less than `tol` (relative), or, with residual=True,
    when |A*A x - r x| <= tol |A*A x|.

    Non-convergence is logged and reported through `converged`; strict=True
    raises ConvergenceError instead.
    """
    x = np.array(x0, dtype=complex if np.iscomplexobj(x0) else float).ravel()
    size = np.linalg.norm(x)
    if size == 0:
        raise ValueError("The starting vector must be nonzero")
    x = x / size

    best, best_vector = 0.0, x
    previous = None
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        y = normal(x)
        ynorm = np.linalg.norm(y)
        rayleigh = float(np.real(np.vdot(x, y)))
        if rayleigh > best:
            best, best_vector = rayleigh, x
        if ynorm == 0:
            converged = True
            break
        if residual:
            done = np.linalg.norm(y - rayleigh * x) <= tol * ynorm
        else:
            done = previous is not None and abs(rayleigh - previous) <= tol * abs(rayleigh)
        logger.debug("%s: iteration %d, quotient %.16g", label, iterations, rayleigh)
        if done:
            converged = True
            break
        previous = rayleigh
        x = y / ynorm

    if not converged:
        message = f"{label} did not converge within {max_iter} iterations"
        if strict:
            raise ConvergenceError(message)
        logger.warning(message)
    return PowerResult(float(np.sqrt(max(best, 0.0))), iterations, converged, best_vector)
