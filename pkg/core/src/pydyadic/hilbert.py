"""
The principal-value Hilbert transform of step functions, the kernels of the
averaged Haar shift, and the translation/dilation average itself.

The Hilbert transform here is Hf(x) = p.v. integral of f(x - y) / y dy, with
no 1/pi factor. Averaging Tr_y Dil_lam H Dil_1/lam Tr_-y f over y uniform on
[0, Y] and lam in [1, 2] with density proportional to dlam/lam tends to
LIMIT_CONSTANT * Hf.
"""

import logging
import math
from dataclasses import dataclass
from functools import cache, partial

import numpy as np
from scipy import integrate

from pydyadic.dyadic import G, H0, UNIT, PiecewiseConstant, haar_function, inner_product, translate
from pydyadic.workers import ensemble_map

logger = logging.getLogger(__name__)

# integral of gamma0 over (0, inf), divided by the dlam/lam mass of [1, 2].
LIMIT_CONSTANT = -1.0 / (8.0 * math.log(2.0))
CHUNK = 1 << 18


class FitError(ValueError):
    pass


class PiecewiseLinear:
    """
    A continuous, compactly supported, piecewise linear function through the
    nodes (breakpoints[i], values[i]), zero outside.
    """

    __slots__ = ("breakpoints", "values")

    def __init__(self, breakpoints, values):
        breakpoints = np.array(breakpoints, dtype=float).ravel()
        values = np.array(values, dtype=float).ravel()
        if breakpoints.size != values.size:
            raise ValueError("Expected one value per breakpoint")
        if np.any(np.diff(breakpoints) <= 0):
            raise ValueError("Breakpoints must be strictly increasing")
        breakpoints.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "breakpoints", breakpoints)
        object.__setattr__(self, "values", values)

    def __setattr__(self, attr, value):
        raise AttributeError("PiecewiseLinear is immutable")

    def __reduce__(self):
        return PiecewiseLinear, (self.breakpoints, self.values)

    def __repr__(self):
        return f"PiecewiseLinear(breakpoints={self.breakpoints!r}, values={self.values!r})"

    def __call__(self, x):
        out = np.interp(np.asarray(x, dtype=float), self.breakpoints, self.values, 0.0, 0.0)
        return float(out) if np.ndim(out) == 0 else out

    def dilate(self, lam, p=1.0):
        """
        lam^(-1/p) F(x / lam); p = 1 preserves integrals.
        """
        if not lam > 0:
            raise ValueError(f"The dilation scale must be positive, got {lam}")
        return PiecewiseLinear(self.breakpoints * lam, self.values * lam ** (-1.0 / p))

    def integral(self, left=-math.inf, right=math.inf):
        bp = self.breakpoints
        lo, hi = max(left, bp[0]), min(right, bp[-1])
        if lo >= hi:
            return 0.0
        nodes = np.concatenate([[lo], bp[(bp > lo) & (bp < hi)], [hi]])
        values = self(nodes)
        return float(np.sum(np.diff(nodes) * (values[1:] + values[:-1]) / 2))


def hilbert_pv(f, x):
    """
    Hf(x) = sum v_i ln |(x - x_{i-1}) / (x - x_i)| over the pieces of f.
    """
    x = np.asarray(x, dtype=float)
    bp = f.breakpoints
    if np.any(np.isin(x, bp)):
        raise ValueError(
            "hilbert_pv is evaluated off the breakpoints; offset x, e.g. by half a cell"
        )
    if f.values.size == 0:
        return np.zeros_like(x) if x.ndim else 0.0
    logs = np.log(np.abs(x[..., None] - bp))
    out = np.sum(f.values * (logs[..., :-1] - logs[..., 1:]), axis=-1)
    return float(out) if out.ndim == 0 else out


def hilbert_truncated(f, x, eps):
    """
    The integral of (f(x - y) - f(x + y)) / y over y > eps, by adaptive
    quadrature; tends to Hf(x) as eps -> 0.
    """
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")
    support = f.support
    if support is None:
        return 0.0
    reach = max(abs(x - support[0]), abs(x - support[1])) + 1.0
    if eps >= reach:
        return 0.0
    points = np.abs(x - f.breakpoints)
    points = np.unique(points[(points > eps) & (points < reach)])

    def integrand(y):
        return (f(x - y) - f(x + y)) / y

    value, _ = integrate.quad(
        integrand, eps, reach, points=points, limit=100 + 4 * points.size, epsabs=1e-12
    )
    return value


@cache
def gamma0():
    """
    gamma0(y) = integral of g(u + y) h(u) du, h and g the Haar function and
    its shifted companion on [-1/2, 1/2); nodes on the quarters of [-1, 1].

    The node values on (0, 1] are -3/4, 0, 1/4, 0, so gamma0(1/2) = 0 and the
    extremum sits at 1/4, not the magnitude 1/2 at 1/2 that is often drawn.
    """
    h = translate(haar_function(UNIT, H0), -0.5)
    g = translate(haar_function(UNIT, G), -0.5)
    nodes = np.arange(-4, 5) / 4.0
    return PiecewiseLinear(nodes, [inner_product(translate(g, -y), h) for y in nodes])


def gamma_sum(x, j_min, j_max):
    """
    sum over j_min <= j <= j_max of gamma_j(x) = 2^-j gamma0(x / 2^j).
    """
    if j_min > j_max:
        raise ValueError(f"j_min {j_min} exceeds j_max {j_max}")
    kernel = gamma0()
    x = np.asarray(x, dtype=float)
    out = sum(kernel.dilate(math.ldexp(1.0, j))(x) for j in range(j_min, j_max + 1))
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class AveragingConfig:
    Y: float = 1024.0
    n_y: int = 256
    n_lambda: int = 256
    scales: tuple = (-8, 12)
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "scales", tuple(int(s) for s in self.scales))
        if not self.Y > 0:
            raise ValueError(f"Y must be positive, got {self.Y}")
        if self.n_y < 1 or self.n_lambda < 1:
            raise ValueError(f"Sample counts must be positive, got {self.n_y}, {self.n_lambda}")
        if len(self.scales) != 2 or self.scales[0] > self.scales[1]:
            raise ValueError(f"scales must be a pair a <= b, got {self.scales}")


@dataclass(frozen=True)
class AveragingSamples:
    """
    The (y, lam) product grid one average is taken over.
    """

    y: np.ndarray
    lam: np.ndarray

    def pairs(self):
        y, lam = np.meshgrid(self.y, self.lam, indexing="ij")
        return y.ravel(), lam.ravel()

    def shifted(self, s):
        return AveragingSamples(self.y + s, self.lam)

    def __len__(self):
        return self.y.size * self.lam.size


def draw_samples(cfg):
    """
    Stratified samples: y uniform on [0, Y], log2(lam) uniform on [0, 1].
    """
    rng = np.random.default_rng(cfg.seed)
    y = cfg.Y * (np.arange(cfg.n_y) + rng.random(cfg.n_y)) / cfg.n_y
    lam = np.exp2((np.arange(cfg.n_lambda) + rng.random(cfg.n_lambda)) / cfg.n_lambda)
    return AveragingSamples(y, lam)


def _check_window(f, cfg):
    support = f.support
    if support is None:
        return
    width = support[1] - support[0]
    if math.ldexp(1.0, cfg.scales[1]) < 2 * width:
        raise ValueError(
            f"The coarsest scale 2**{cfg.scales[1]} is too small for a support of width {width:g}"
        )


def _window_shift(primitive, t, scales):
    """
    sum over the scale window of <u, h_I> g_I(t), I the interval of each scale
    containing t, with u given through its primitive.
    """
    total = np.zeros(np.shape(t))
    for k in range(scales[0], scales[1] + 1):
        length = math.ldexp(1.0, k)
        left = np.floor(t / length) * length
        quarter = np.floor((t - left) / (length / 4))
        sign = np.where((quarter == 1) | (quarter == 2), 1.0, -1.0)
        second = primitive(left + length) - 2 * primitive(left + length / 2) + primitive(left)
        total += second * sign / length
    return total


def haar_shift_window(f, scales):
    """
    The Haar shift over the whole line, restricted to the scales a..b: the sum
    of <f, h_I> g_I over every dyadic I with a <= scale(I) <= b.
    """
    support = f.support
    if support is None:
        return PiecewiseConstant()
    breakpoints = [_quarter_points(support, k) for k in range(scales[0], scales[1] + 1)]
    bp = np.unique(np.concatenate(breakpoints))
    values = _window_shift(f.cumulative, (bp[:-1] + bp[1:]) / 2, scales)
    return PiecewiseConstant(bp, values).simplify()


def _quarter_points(support, k):
    length = math.ldexp(1.0, k)
    first = math.floor(support[0] / length)
    last = math.ceil(support[1] / length)
    return np.arange(4 * first, 4 * last + 1) * (length / 4)


def _chunk_values(f, x, scales, chunk):
    y, lam = chunk
    y, lam = y[:, None], lam[:, None]

    def primitive(s):
        return f.cumulative(lam * s + y)

    return np.sum(_window_shift(primitive, (x - y) / lam, scales) / lam, axis=0)


def averaged_shift_values(f, cfg, x, samples=None, workers=1):
    """
    The sample average of Tr_y Dil_lam H Dil_1/lam Tr_-y f at the points x,
    H the windowed Haar shift; exact for every sample.
    """
    _check_window(f, cfg)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    samples = draw_samples(cfg) if samples is None else samples
    y, lam = samples.pairs()
    step = max(1, CHUNK // max(x.size, 1))
    chunks = [(y[i : i + step], lam[i : i + step]) for i in range(0, y.size, step)]
    partials = ensemble_map(partial(_chunk_values, f, x, cfg.scales), chunks, workers)
    total = np.zeros_like(x)
    for part in partials:
        total += part
    return total / y.size


def averaged_shift(f, cfg, samples=None):
    """
    The sample average as an exact step function. Meant for small sample
    sets; large ones go through averaged_shift_values at chosen points.
    """
    _check_window(f, cfg)
    support = f.support
    if support is None:
        return PiecewiseConstant()
    samples = draw_samples(cfg) if samples is None else samples
    points = []
    for y, lam in zip(*samples.pairs()):
        local = ((support[0] - y) / lam, (support[1] - y) / lam)
        for k in range(cfg.scales[0], cfg.scales[1] + 1):
            points.append(lam * _quarter_points(local, k) + y)
    bp = np.unique(np.concatenate(points))
    values = averaged_shift_values(f, cfg, (bp[:-1] + bp[1:]) / 2, samples)
    return PiecewiseConstant(bp, values).simplify()


TEST_FUNCTIONS = {
    "box": PiecewiseConstant([0.0, 1.0], [1.0]),
    "bump": PiecewiseConstant([0.0, 0.25, 0.75, 1.0], [1.0, 2.0, 1.0]),
    "ramp": PiecewiseConstant([0.0, 0.25, 0.5, 0.75, 1.0], [0.25, 0.5, 0.75, 1.0]),
    "haar": haar_function(UNIT, H0),
}


def comparison_points(f, cfg, points=512):
    """
    Equispaced points over the support and one support width on each side,
    away from the breakpoints of f by more than 2**(a + 1).
    """
    f = f.simplify()
    lo, hi = f.support
    width = hi - lo
    spacing = 3 * width / points
    x = lo - width + (np.arange(points) + 0.5) * spacing
    radius = math.ldexp(1.0, cfg.scales[0] + 1)
    far = np.all(np.abs(x[:, None] - f.breakpoints) > radius, axis=1)
    return x[far]


def fit_constant(test_functions, cfg, points=512, samples=None, workers=1, keep_series=False):
    """
    Least-squares ratio between the averaged shift and the Hilbert transform,
    per test function, under one shared sample set. The cosine is taken
    against LIMIT_CONSTANT * Hf, so it is close to 1 when the averages line up.
    """
    test_functions = list(test_functions)
    if len(test_functions) < 2:
        raise ValueError("fit_constant needs at least two test functions")
    samples = draw_samples(cfg) if samples is None else samples
    c_hat, cosine, series = [], [], []
    for index, f in enumerate(test_functions):
        if f.support is None:
            raise FitError(f"Test function {index} is zero")
        x = comparison_points(f, cfg, points)
        exact = hilbert_pv(f, x)
        averaged = averaged_shift_values(f, cfg, x, samples, workers)
        energy = float(np.dot(exact, exact))
        if energy <= 1e-12 * x.size:
            raise FitError(f"Test function {index} has a vanishing Hilbert transform")
        c_hat.append(float(np.dot(averaged, exact)) / energy)
        reference = LIMIT_CONSTANT * exact
        norm = float(np.linalg.norm(averaged)) * float(np.linalg.norm(reference))
        cosine.append(float(np.dot(averaged, reference)) / norm if norm else 0.0)
        logger.info("Test function %d: c_hat %.6g, cosine %.6g", index, c_hat[-1], cosine[-1])
        if keep_series:
            series.append({"x": x, "averaged": averaged, "exact": exact})

    centre = float(np.mean(c_hat))
    if abs(centre) <= 1e-12:
        raise FitError("Fitted constants average to zero")
    report = {
        "operation": "fit_constant",
        "c_hat": c_hat,
        "cosine": cosine,
        "dispersion": (max(c_hat) - min(c_hat)) / abs(centre),
        "limit_constant": LIMIT_CONSTANT,
        "exclusion_radius": math.ldexp(1.0, cfg.scales[0] + 1),
        "samples": len(samples),
    }
    if keep_series:
        report["series"] = series
    return report
