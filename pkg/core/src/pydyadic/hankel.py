"""
A finite model of the Hardy-space picture on the circle: trigonometric
polynomials, the projections onto frequencies >= 0 and < 0, the Hilbert
transform H = P+ - P-, Hankel operators phi -> P+(b conj(phi)) and the two
sides of Nehari's theorem.

Frequency 0 belongs to P+. The Hankel operator is antilinear; it is stored
through its linear matrix A[n][m] = b(n + m), acting on conjugated
coefficient vectors.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg, optimize

from pydyadic.power import ConvergenceError, power_iteration

logger = logging.getLogger(__name__)

HANKEL_TOLERANCE = 1e-10
HANKEL_MAX_ITERATIONS = 20000


class SpectralPolynomial:
    """
    sum of c_k e^{ik theta} for |k| <= band, stored as an array of length
    2 band + 1 indexed by k + band.
    """

    __slots__ = ("band", "coeffs")

    def __init__(self, coeffs, band=None):
        coeffs = np.array(coeffs, dtype=complex).ravel()
        if coeffs.size % 2 != 1:
            raise ValueError(f"Expected 2 band + 1 coefficients, got {coeffs.size}")
        if band is not None and coeffs.size != 2 * band + 1:
            raise ValueError(f"Band {band} needs {2 * band + 1} coefficients, got {coeffs.size}")
        coeffs.setflags(write=False)
        object.__setattr__(self, "band", coeffs.size // 2)
        object.__setattr__(self, "coeffs", coeffs)

    def __setattr__(self, attr, value):
        raise AttributeError("SpectralPolynomial is immutable")

    def __reduce__(self):
        return SpectralPolynomial, (self.coeffs,)

    @classmethod
    def from_dict(cls, coeffs, band=None):
        if band is None:
            band = max((abs(int(k)) for k in coeffs), default=0)
        out = np.zeros(2 * band + 1, dtype=complex)
        for k, c in coeffs.items():
            if abs(int(k)) > band:
                raise ValueError(f"Frequency {k} lies outside band {band}")
            out[int(k) + band] = c
        return cls(out)

    @classmethod
    def monomial(cls, k, value=1.0):
        return cls.from_dict({k: value})

    @classmethod
    def constant(cls, value):
        return cls([value])

    @classmethod
    def from_analytic(cls, coeffs):
        """
        sum of coeffs[m] e^{im theta}, m >= 0.
        """
        coeffs = np.asarray(coeffs, dtype=complex)
        return cls(np.concatenate([np.zeros(coeffs.size - 1, dtype=complex), coeffs]))

    @classmethod
    def random(cls, band, rng):
        n = 2 * band + 1
        return cls((rng.standard_normal(n) + 1j * rng.standard_normal(n)) / 2**0.5)

    def __repr__(self):
        return f"SpectralPolynomial(band={self.band}, coeffs={dict(self.items())!r})"

    @property
    def frequencies(self):
        return np.arange(-self.band, self.band + 1)

    def items(self):
        return zip(self.frequencies.tolist(), self.coeffs.tolist())

    def coefficient(self, k):
        return complex(self.coeffs[k + self.band]) if abs(k) <= self.band else 0j

    def padded(self, band):
        if band < self.band:
            raise ValueError(f"Cannot pad band {self.band} down to {band}")
        extra = band - self.band
        return SpectralPolynomial(np.pad(self.coeffs, extra))

    @property
    def effective_band(self):
        nonzero = np.flatnonzero(self.coeffs)
        if nonzero.size == 0:
            return 0
        return int(np.max(np.abs(nonzero - self.band)))

    @property
    def analytic_degree(self):
        """
        The largest k >= 0 with c_k != 0, or -1 when P+ f = 0.
        """
        nonzero = np.flatnonzero(self.coeffs[self.band :])
        return int(nonzero[-1]) if nonzero.size else -1

    def analytic(self):
        return self.coeffs[self.band :]

    def _aligned(self, other):
        band = max(self.band, other.band)
        return self.padded(band).coeffs, other.padded(band).coeffs

    def __eq__(self, other):
        if not isinstance(other, SpectralPolynomial):
            return NotImplemented
        a, b = self._aligned(other)
        return bool(np.array_equal(a, b))

    __hash__ = None

    def __add__(self, other):
        a, b = self._aligned(other)
        return SpectralPolynomial(a + b)

    def __sub__(self, other):
        a, b = self._aligned(other)
        return SpectralPolynomial(a - b)

    def __neg__(self):
        return SpectralPolynomial(-self.coeffs)

    def __mul__(self, other):
        if isinstance(other, SpectralPolynomial):
            return multiply(self, other)
        return SpectralPolynomial(self.coeffs * other)

    __rmul__ = __mul__

    def conj(self):
        """
        The pointwise conjugate: coefficient conj(c_-k) at k.
        """
        return SpectralPolynomial(np.conj(self.coeffs[::-1]))

    def norm(self):
        return float(np.linalg.norm(self.coeffs))

    def __call__(self, theta):
        theta = np.asarray(theta, dtype=float)
        out = np.exp(1j * np.multiply.outer(theta, self.frequencies)) @ self.coeffs
        return complex(out) if out.ndim == 0 else out


def multiply(f, g):
    return SpectralPolynomial(np.convolve(f.coeffs, g.coeffs))


def proj_plus(f):
    out = f.coeffs.copy()
    out[: f.band] = 0
    return SpectralPolynomial(out)


def proj_minus(f):
    out = f.coeffs.copy()
    out[f.band :] = 0
    return SpectralPolynomial(out)


def hilbert_alg(f):
    return proj_plus(f) - proj_minus(f)


@dataclass(frozen=True)
class HankelMatrix:
    size: int
    entries: np.ndarray
    truncated: bool = False

    def apply(self, phi):
        """
        P+(b conj(phi)) for analytic phi of degree < size.
        """
        if phi.analytic_degree >= self.size or np.any(phi.coeffs[: phi.band]):
            raise ValueError(f"phi must be analytic of degree < {self.size}")
        vector = np.zeros(self.size, dtype=complex)
        analytic = phi.analytic()
        vector[: analytic.size] = analytic
        return SpectralPolynomial.from_analytic(self.entries @ np.conj(vector))


def hankel_matrix(b, M=None):
    """
    A[n][m] = b(n + m) for 0 <= n, m < M. M defaults to the analytic degree of
    b plus one, the smallest size that loses nothing.
    """
    exact = max(b.analytic_degree + 1, 1)
    M = exact if M is None else M
    if M < 1:
        raise ValueError(f"M must be positive, got {M}")
    values = [b.coefficient(k) for k in range(2 * M - 1)]
    entries = linalg.hankel(values[:M], values[M - 1 :])
    truncated = M < exact
    if truncated:
        logger.warning(
            "Hankel matrix of size %d truncates a symbol of analytic degree %d", M, exact - 1
        )
    return HankelMatrix(M, entries, truncated)


def hankel_apply(b, phi):
    return proj_plus(multiply(b, phi.conj()))


def _hankel_power(b, M=None, seed=0, strict=False):
    A = hankel_matrix(b, M).entries
    rng = np.random.default_rng(seed)
    x0 = rng.standard_normal(A.shape[1]) + 1j * rng.standard_normal(A.shape[1])
    return power_iteration(
        lambda x: A.conj().T @ (A @ x),
        x0,
        max_iter=HANKEL_MAX_ITERATIONS,
        tol=HANKEL_TOLERANCE,
        residual=True,
        strict=strict,
        label="Hankel norm",
    )


def hankel_norm(b, M=None, seed=0, strict=False):
    """
    The largest singular value of the Hankel matrix, by power iteration on
    A^H A.
    """
    return _hankel_power(b, M, seed, strict).value


def _require_guard(n_guard, *polys):
    needed = sum(p.effective_band for p in polys)
    if needed > n_guard:
        raise ValueError(f"Products need band {needed}, above the guard band {n_guard}")


def commutator_identity_check(b, f, n_guard):
    """
    |[b, H] f - (2 P-(b P+ f) - 2 P+(b P- f))|_2.
    """
    _require_guard(n_guard, b, f)
    lhs = b * hilbert_alg(f) - hilbert_alg(b * f)
    rhs = 2 * proj_minus(b * proj_plus(f)) - 2 * proj_plus(b * proj_minus(f))
    return (lhs - rhs).norm()


def block_identity_residuals(b, f, n_guard):
    """
    The four blocks of [b, H] between the two spectral halves:
    P+[b,H]P- = -2 P+ b P-, P-[b,H]P- = 0, P-[b,H]P+ = 2 P- b P+,
    P+[b,H]P+ = 0.
    """
    _require_guard(n_guard, b, f)

    def commutator(g):
        return b * hilbert_alg(g) - hilbert_alg(b * g)

    plus, minus = proj_plus(f), proj_minus(f)
    return {
        "plus_minus": (proj_plus(commutator(minus)) + 2 * proj_plus(b * minus)).norm(),
        "minus_minus": proj_minus(commutator(minus)).norm(),
        "minus_plus": (proj_minus(commutator(plus)) - 2 * proj_minus(b * plus)).norm(),
        "plus_plus": proj_plus(commutator(plus)).norm(),
    }


def dual_pairing(b, psi, phi):
    """
    <P+ b, psi phi> = sum over k of (P+ b)_k conj((psi phi)_k).
    """
    a, c = proj_plus(b)._aligned(multiply(psi, phi))
    return complex(np.vdot(c, a))


def nehari_lower_bound(b, samples, seed, M=None):
    """
    max of |<P+ b, psi phi>| over sampled unit analytic psi, with phi the
    unit partner A conj(psi) / |A conj(psi)| that maximizes the pairing for
    that psi. The constant psi = 1 comes first, then a seeded stream, so the
    bound never decreases as samples grows.
    """
    A = hankel_matrix(b, M).entries
    size = A.shape[0]
    rng = np.random.default_rng(seed)
    best = 0.0
    for index in range(samples):
        if index == 0:
            vector = np.zeros(size, dtype=complex)
            vector[0] = 1.0
        else:
            vector = rng.standard_normal(size) + 1j * rng.standard_normal(size)
            vector /= np.linalg.norm(vector)
        partner = A @ np.conj(vector)
        length = np.linalg.norm(partner)
        if length == 0:
            continue
        psi = SpectralPolynomial.from_analytic(vector)
        phi = SpectralPolynomial.from_analytic(partner / length)
        best = max(best, abs(dual_pairing(b, psi, phi)))
    return best


def sup_norm(p, points=None):
    """
    max |p| on the circle: the maximum over an equispaced grid, polished by a
    bounded scalar search around each grid local maximum.
    """
    n = points or 8 * max(2 * p.band + 1, 8)
    theta = 2 * np.pi * np.arange(n) / n
    values = np.abs(p(theta))
    best = float(values.max())
    peaks = np.flatnonzero((values >= np.roll(values, 1)) & (values >= np.roll(values, -1)))
    step = 2 * np.pi / n
    for index in peaks[np.argsort(values[peaks])[::-1][:16]]:
        centre = theta[index]
        result = optimize.minimize_scalar(
            lambda t: -abs(p(t)),
            bounds=(centre - step, centre + step),
            method="bounded",
            options={"xatol": 1e-12},
        )
        best = max(best, -float(result.fun))
    return best


def _lp_step(bvals, basis, directions):
    """
    min t subject to Re(e^{-i w}(b - a)) <= t at every grid point and
    direction w, a = basis @ (alpha + i beta).
    """
    Er, Ei = basis.real, basis.imag
    rows, rhs = [], []
    for w in directions:
        c, s = math.cos(w), math.sin(w)
        rows.append(np.hstack([-(c * Er + s * Ei), -(s * Er - c * Ei), -np.ones((len(bvals), 1))]))
        rhs.append(-(c * bvals.real + s * bvals.imag))
    width = 2 * basis.shape[1] + 1
    objective = np.zeros(width)
    objective[-1] = 1.0
    return optimize.linprog(
        objective,
        A_ub=np.vstack(rows),
        b_ub=np.concatenate(rhs),
        bounds=[(None, None)] * width,
        method="highs",
    )


def nehari_inf_estimate(b, degree_budget, iterations=6, seed=0, strict=False):
    """
    Minimize max |b - a| over a grid, a anti-analytic of degree <= budget, as
    a sequence of linear programmes with finer and finer polygonal moduli.

    The best iterate is kept, so the objective never increases; the loop
    stops once an iterate improves it by less than 1e-8. inf_estimate is the
    refined sup norm of the best b - a.
    """
    band = b.effective_band
    if degree_budget < band:
        raise ValueError(f"degree_budget {degree_budget} is below the band {band} of b")
    sigma0 = _hankel_power(b, seed=seed, strict=strict).value
    points = 8 * max(band + degree_budget, 1)
    theta = 2 * np.pi * np.arange(points) / points
    bvals = b(theta)
    ks = np.arange(1, degree_budget + 1)
    basis = np.exp(-1j * np.outer(theta, ks))

    best_a = np.zeros(degree_budget, dtype=complex)
    best = float(np.max(np.abs(bvals)))
    converged = degree_budget == 0
    steps = 0
    while not converged and steps < iterations:
        steps += 1
        directions = 2 * np.pi * np.arange(8 << (steps - 1)) / (8 << (steps - 1))
        result = _lp_step(bvals, basis, directions)
        if result.status != 0:
            logger.warning("Linear programme failed at step %d: %s", steps, result.message)
            break
        a = result.x[:degree_budget] + 1j * result.x[degree_budget : 2 * degree_budget]
        value = float(np.max(np.abs(bvals - basis @ a)))
        logger.debug(
            "Nehari step %d: %d directions, objective %.12g", steps, directions.size, value
        )
        improvement = best - value
        if value < best:
            best, best_a = value, a
        if steps > 1 and improvement < 1e-8:
            converged = True
    if not converged:
        message = f"Nehari minimization did not stagnate within {iterations} iterations"
        if strict:
            raise ConvergenceError(message)
        logger.warning(message)

    a = SpectralPolynomial.from_dict(
        {-int(k): c for k, c in zip(ks, best_a)}, band=max(band, degree_budget)
    )
    beta = b.padded(max(b.band, degree_budget)) - a
    inf_estimate = sup_norm(beta, points=4 * points)
    return {
        "operation": "nehari_inf_estimate",
        "sigma0": sigma0,
        "inf_estimate": inf_estimate,
        "gap": inf_estimate - sigma0,
        "budget": degree_budget,
        "seed": seed,
        "iterations": steps,
        "converged": converged,
        "grid_points": points,
    }


def nehari_report(b, degree_budget, samples, seed, iterations=6):
    """
    lower <= sigma0 <= inf_estimate for one symbol.
    """
    report = nehari_inf_estimate(b, degree_budget, iterations, seed)
    lower = nehari_lower_bound(b, samples, seed)
    report.update(
        operation="nehari_report",
        lower=lower,
        sandwich=bool(
            lower <= report["sigma0"] + 1e-10 and report["sigma0"] <= report["inf_estimate"] + 1e-6
        ),
    )
    return report
