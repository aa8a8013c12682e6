"""
Dyadic intervals, step functions and the Haar system.

Conventions used throughout the package:

* intervals are half open, [left, right), and step functions are evaluated
  through their right-continuous representative;
* h_I is -|I|^-1/2 on the left half of I and +|I|^-1/2 on the right half;
* h1_I = |I|^-1/2 1_I;
* g_I is -|I|^-1/2 on the outer quarters of I and +|I|^-1/2 on the middle
  half, i.e. g_I = 2^-1/2 (h_{I_left} - h_{I_right}).

A window is a root interval plus a minimum scale: it holds every dyadic
I inside the root with min_scale <= scale(I) <= scale(root), the root
included.
"""

import logging
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from pydyadic import grid

logger = logging.getLogger(__name__)

H0 = "h0"
H1 = "h1"
G = "g"
VARIANTS = (H0, H1, G)


@dataclass(frozen=True, order=True)
class DyadicInterval:
    """
    The dyadic interval [j 2**k, (j + 1) 2**k) with k = scale, j = position.
    """

    scale: int
    position: int

    def __post_init__(self):
        object.__setattr__(self, "scale", int(self.scale))
        object.__setattr__(self, "position", int(self.position))

    @property
    def length(self):
        return math.ldexp(1.0, self.scale)

    @property
    def left(self):
        return math.ldexp(float(self.position), self.scale)

    @property
    def right(self):
        return math.ldexp(float(self.position + 1), self.scale)

    @property
    def center(self):
        return math.ldexp(self.position + 0.5, self.scale)

    @property
    def parent(self):
        return DyadicInterval(self.scale + 1, self.position // 2)

    @property
    def left_child(self):
        return DyadicInterval(self.scale - 1, 2 * self.position)

    @property
    def right_child(self):
        return DyadicInterval(self.scale - 1, 2 * self.position + 1)

    @property
    def children(self):
        return self.left_child, self.right_child

    @property
    def sgn(self):
        # +1 for the left half of the parent.
        return 1 if self.position % 2 == 0 else -1

    @property
    def key(self):
        return f"{self.scale}:{self.position}"

    @classmethod
    def from_key(cls, key):
        scale, _, position = key.partition(":")
        if not position:
            raise ValueError(f"Interval keys look like 'k:j', not {key!r}")
        return cls(int(scale), int(position))

    @classmethod
    def containing(cls, x, scale):
        return cls(scale, math.floor(math.ldexp(x, -scale)))

    def contains(self, x):
        return self.left <= x < self.right

    def contains_interval(self, other):
        shift = self.scale - other.scale
        return shift >= 0 and other.position >> shift == self.position

    def ancestors(self, max_scale):
        current = self
        while current.scale < max_scale:
            current = current.parent
            yield current

    def subintervals(self, min_scale):
        """
        Every dyadic subinterval with scale >= min_scale, self included, coarse
        to fine and left to right within a scale.
        """
        for depth in range(self.scale - min_scale + 1):
            base = self.position << depth
            for offset in range(2**depth):
                yield DyadicInterval(self.scale - depth, base + offset)

    def __str__(self):
        return f"[{self.left:g}, {self.right:g})"


UNIT = DyadicInterval(0, 0)


class PiecewiseConstant:
    """
    A compactly supported step function: values[i] on
    [breakpoints[i], breakpoints[i + 1]), zero elsewhere.

    Instances are immutable; every operation returns a new function.
    """

    __slots__ = ("breakpoints", "values")

    def __init__(self, breakpoints=(), values=()):
        values = np.array(values, dtype=float).ravel()
        breakpoints = np.array(breakpoints, dtype=float).ravel()
        if values.size == 0:
            breakpoints = np.empty(0)
        elif breakpoints.size != values.size + 1:
            raise ValueError(
                f"Expected {values.size + 1} breakpoints for {values.size} values, "
                f"got {breakpoints.size}"
            )
        if not (np.all(np.isfinite(values)) and np.all(np.isfinite(breakpoints))):
            raise ValueError("Breakpoints and values must be finite")
        if np.any(np.diff(breakpoints) <= 0):
            raise ValueError("Breakpoints must be strictly increasing")
        breakpoints.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "breakpoints", breakpoints)
        object.__setattr__(self, "values", values)

    def __setattr__(self, attr, value):
        raise AttributeError("PiecewiseConstant is immutable")

    def __reduce__(self):
        return PiecewiseConstant, (self.breakpoints, self.values)

    @classmethod
    def zero(cls):
        return cls()

    @classmethod
    def indicator(cls, left, right, value=1.0):
        return cls([left, right], [value])

    @classmethod
    def from_cells(cls, left, width, values):
        values = np.asarray(values, dtype=float)
        return cls(left + np.arange(values.size + 1) * width, values)

    def __repr__(self):
        return f"PiecewiseConstant(breakpoints={self.breakpoints!r}, values={self.values!r})"

    def __len__(self):
        return self.values.size

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.values.size == 0:
            out = np.zeros_like(x)
        else:
            index = np.searchsorted(self.breakpoints, x, side="right") - 1
            inside = (index >= 0) & (index < self.values.size)
            out = np.where(inside, self.values[np.clip(index, 0, self.values.size - 1)], 0.0)
        return float(out) if out.ndim == 0 else out

    @property
    def support(self):
        """
        The smallest [a, b) outside of which the function vanishes, or None.
        """
        nonzero = np.flatnonzero(self.values)
        if nonzero.size == 0:
            return None
        return float(self.breakpoints[nonzero[0]]), float(self.breakpoints[nonzero[-1] + 1])

    @property
    def widths(self):
        return np.diff(self.breakpoints)

    def integral(self):
        return float(np.sum(self.values * self.widths))

    def cumulative(self, x):
        """
        The primitive F(x) = integral of f over (-inf, x), exact (F is piecewise
        linear with nodes at the breakpoints).
        """
        x = np.asarray(x, dtype=float)
        if self.values.size == 0:
            return np.zeros_like(x)
        nodes = np.concatenate([[0.0], np.cumsum(self.values * self.widths)])
        return np.interp(x, self.breakpoints, nodes, left=0.0, right=nodes[-1])

    def integrals(self, edges):
        return np.diff(self.cumulative(edges))

    def simplify(self):
        """
        Drop zero pieces at the ends and merge equal neighbours.
        """
        if self.values.size == 0:
            return self
        keep = np.concatenate([[True], self.values[1:] != self.values[:-1]])
        bp = np.concatenate([self.breakpoints[:-1][keep], self.breakpoints[-1:]])
        vals = self.values[keep]
        nonzero = np.flatnonzero(vals)
        if nonzero.size == 0:
            return PiecewiseConstant()
        first, last = nonzero[0], nonzero[-1]
        return PiecewiseConstant(bp[first : last + 2], vals[first : last + 1])

    def _merged(self, other):
        bp = np.union1d(self.breakpoints, other.breakpoints)
        if bp.size < 2:
            return bp, np.empty(0), np.empty(0)
        left = bp[:-1]
        return bp, np.asarray(self(left)), np.asarray(other(left))

    def _combine(self, other, op):
        if not isinstance(other, PiecewiseConstant):
            return NotImplemented
        bp, a, b = self._merged(other)
        return PiecewiseConstant(bp, op(a, b))

    def __add__(self, other):
        return self._combine(other, np.add)

    def __sub__(self, other):
        return self._combine(other, np.subtract)

    def __mul__(self, other):
        if isinstance(other, PiecewiseConstant):
            return self._combine(other, np.multiply)
        return PiecewiseConstant(self.breakpoints, self.values * float(other))

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return PiecewiseConstant(self.breakpoints, self.values / float(scalar))

    def __neg__(self):
        return PiecewiseConstant(self.breakpoints, -self.values)

    def __abs__(self):
        return PiecewiseConstant(self.breakpoints, np.abs(self.values))

    def translate(self, y):
        return translate(self, y)

    def dilate(self, lam, p=2.0):
        return dilate(self, lam, p)

    def is_resolved(self, root, cell_scale):
        """
        True when every breakpoint inside the root lies on the cell grid of
        width 2**cell_scale.
        """
        bp = self.breakpoints
        inner = bp[(bp > root.left) & (bp < root.right)]
        ticks = np.ldexp(inner - root.left, -cell_scale)
        return bool(np.all(ticks == np.round(ticks)))


def translate(f, y):
    """
    Tr_y f(x) = f(x - y).
    """
    return PiecewiseConstant(f.breakpoints + y, f.values)


def dilate(f, lam, p=2.0):
    """
    Dil_lam^(p) f(x) = lam^(-1/p) f(x / lam); an isometry of L^p.
    """
    if not lam > 0:
        raise ValueError(f"The dilation scale must be positive, got {lam}")
    if not p > 0:
        raise ValueError(f"The exponent p must be positive, got {p}")
    return PiecewiseConstant(f.breakpoints * lam, f.values * lam ** (-1.0 / p))


def inner_product(f, g):
    bp, a, b = f._merged(g)
    if bp.size < 2:
        return 0.0
    return float(np.sum(a * b * np.diff(bp)))


def lp_norm(f, p=2.0):
    """
    The L^p norm for p in [1, inf]; values of p in (0, 1) return the L^p
    quasi-norm by the same formula.
    """
    if f.values.size == 0:
        return 0.0
    if p == math.inf:
        return float(np.max(np.abs(f.values)))
    if not p > 0:
        raise ValueError(f"The exponent p must be positive, got {p}")
    return float(np.sum(np.abs(f.values) ** p * f.widths) ** (1.0 / p))


def haar_eval(interval, variant, x):
    """
    Value at x of h_I (variant "h0"), h1_I ("h1") or g_I ("g").
    """
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}, not {variant!r}")
    x = np.asarray(x, dtype=float)
    t = (x - interval.left) / interval.length
    inside = (t >= 0) & (t < 1)
    amp = interval.length**-0.5
    if variant == H0:
        shape = np.where(t < 0.5, -1.0, 1.0)
    elif variant == H1:
        shape = np.ones_like(t)
    else:
        quarter = np.floor(4 * t)
        shape = np.where((quarter == 1) | (quarter == 2), 1.0, -1.0)
    out = np.where(inside, amp * shape, 0.0)
    return float(out) if out.ndim == 0 else out


def haar_function(interval, variant):
    """
    h_I, h1_I or g_I as an exact step function.
    """
    left, length = interval.left, interval.length
    amp = length**-0.5
    if variant == H0:
        return PiecewiseConstant([left, interval.center, interval.right], [-amp, amp])
    if variant == H1:
        return PiecewiseConstant([left, interval.right], [amp])
    if variant == G:
        q = length / 4
        return PiecewiseConstant(
            [left, left + q, left + 3 * q, interval.right], [-amp, amp, -amp]
        )
    raise ValueError(f"variant must be one of {VARIANTS}, not {variant!r}")


def haar_system(root, min_scale):
    """
    The normalized indicator of the root followed by h_I for every I in the
    window, as step functions.
    """
    system = [haar_function(root, H1)]
    system.extend(haar_function(I, H0) for I in root.subintervals(min_scale))
    return system


def gram_matrix(functions, root, cell_scale):
    """
    Gram matrix of functions resolved on the cells of width 2**cell_scale of
    the root, evaluated cell by cell at the cell centres.
    """
    n = 2 ** (root.scale - cell_scale)
    width = math.ldexp(1.0, cell_scale)
    centres = root.left + (np.arange(n) + 0.5) * width
    rows = np.array([f(centres) for f in functions])
    return (rows * width) @ rows.T


def check_window(root, min_scale):
    if min_scale > root.scale + 1:
        raise ValueError(
            f"min_scale {min_scale} lies above the root scale {root.scale} by more than one"
        )


def check_support(f, root):
    support = f.support
    if support is None:
        return
    a, b = support
    if a < root.left or b > root.right:
        raise ValueError(f"Support [{a:g}, {b:g}) of f escapes the root {root}")


def cell_scale(root, min_scale):
    """
    Width exponent of the cells a window resolves: half the finest Haar
    interval.
    """
    return min(min_scale, root.scale + 1) - 1


def cell_integrals(f, root, scale):
    n = 2 ** (root.scale - scale)
    return f.integrals(grid.cell_edges(root.left, scale, n))


@dataclass(frozen=True)
class HaarExpansion:
    """
    Haar coefficients of a function on a window.

    `levels[l]` holds <f, h_I> for the 2**l intervals of scale
    domain.scale - l, left to right; `mean` is <f, |domain|^-1/2 1_domain>.
    """

    domain: DyadicInterval
    min_scale: int
    mean: float = 0.0
    levels: tuple = ()

    def __post_init__(self):
        check_window(self.domain, self.min_scale)
        depth = self.domain.scale - self.min_scale + 1
        levels = tuple(np.array(c, dtype=float).ravel() for c in self.levels)
        if not levels:
            levels = tuple(np.zeros(2**level) for level in range(depth))
        if len(levels) != depth:
            raise ValueError(f"Expected {depth} levels of coefficients, got {len(levels)}")
        for level, c in enumerate(levels):
            if c.size != 2**level:
                raise ValueError(f"Level {level} needs {2**level} coefficients, got {c.size}")
            c.setflags(write=False)
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "mean", float(self.mean))

    @classmethod
    def from_coeffs(cls, domain, coeffs, min_scale, mean=0.0):
        depth = domain.scale - min_scale + 1
        levels = [np.zeros(2**level) for level in range(max(depth, 0))]
        for interval, value in coeffs.items():
            if isinstance(interval, str):
                interval = DyadicInterval.from_key(interval)
            if not domain.contains_interval(interval) or interval.scale < min_scale:
                raise ValueError(f"{interval.key} lies outside the window of {domain.key}")
            level = domain.scale - interval.scale
            levels[level][interval.position - (domain.position << level)] = value
        return cls(domain, min_scale, mean, tuple(levels))

    @property
    def depth(self):
        return len(self.levels)

    @property
    def cell_scale(self):
        return cell_scale(self.domain, self.min_scale)

    @cached_property
    def coeffs(self):
        out = {}
        for level, c in enumerate(self.levels):
            base = self.domain.position << level
            scale = self.domain.scale - level
            for offset, value in enumerate(c):
                out[DyadicInterval(scale, base + offset)] = float(value)
        return out

    def coefficient(self, interval):
        level = self.domain.scale - interval.scale
        if not (0 <= level < self.depth and self.domain.contains_interval(interval)):
            return 0.0
        return float(self.levels[level][interval.position - (self.domain.position << level)])

    def energy(self):
        return self.mean**2 + sum(float(np.sum(c * c)) for c in self.levels)

    def with_levels(self, levels, mean=0.0, min_scale=None):
        if min_scale is None:
            min_scale = self.domain.scale - len(levels) + 1
        return HaarExpansion(self.domain, min_scale, mean, tuple(levels))

    def __add__(self, other):
        if not isinstance(other, HaarExpansion):
            return NotImplemented
        if (self.domain, self.min_scale) != (other.domain, other.min_scale):
            raise ValueError("Expansions must share domain and window")
        levels = [a + b for a, b in zip(self.levels, other.levels)]
        return self.with_levels(levels, self.mean + other.mean, self.min_scale)

    def __mul__(self, scalar):
        return self.with_levels(
            [c * float(scalar) for c in self.levels], self.mean * float(scalar), self.min_scale
        )

    __rmul__ = __mul__


def analyze(f, root, min_scale):
    """
    Haar coefficients of f on the window (root, min_scale). Exact for any
    step function supported in the root.
    """
    check_window(root, min_scale)
    check_support(f, root)
    scale = cell_scale(root, min_scale)
    mean, coeffs = grid.analysis(cell_integrals(f, root, scale), root.scale)
    return HaarExpansion(root, min_scale, mean, tuple(coeffs))


def synthesize(expansion):
    """
    The step function mean |root|^-1/2 1_root + sum coeffs[I] h_I, on the
    cells of the window.
    """
    root = expansion.domain
    values = grid.synthesis(expansion.mean, expansion.levels, root.scale)
    return PiecewiseConstant.from_cells(root.left, math.ldexp(1.0, expansion.cell_scale), values)


def average(f, interval):
    return float(np.diff(f.cumulative([interval.left, interval.right]))[0]) / interval.length


def avg_via_haar(expansion, interval):
    """
    The average of the synthesized function over a dyadic I inside the root,
    telescoped from the coefficients of the strict ancestors of I.
    """
    root = expansion.domain
    total = expansion.mean / root.length**0.5
    for ancestor in interval.ancestors(root.scale):
        total += expansion.coefficient(ancestor) * haar_eval(ancestor, H0, interval.center)
    return total


def dyadic_maximal(f, root, min_scale):
    """
    Mf(x) = max over dyadic I containing x, min_scale <= scale(I) <=
    scale(root), of the average of |f| over I; constant on the cells of
    width 2**min_scale.
    """
    if min_scale > root.scale:
        raise ValueError(f"min_scale {min_scale} must not exceed the root scale {root.scale}")
    check_support(f, root)
    levels = root.scale - min_scale
    cells = cell_integrals(abs(f), root, min_scale)
    averages = grid.level_averages(cells, root.scale, levels)
    return PiecewiseConstant.from_cells(
        root.left, math.ldexp(1.0, min_scale), grid.descend(averages, levels)
    )


def bmo_norm(expansion):
    """
    Dyadic BMO norm: sup over J in the window of
    (|J|^-1 sum_{I in J} <f, h_I>^2)^1/2. The mean coefficient is excluded.
    """
    if not expansion.depth:
        return 0.0
    squares = [c * c for c in expansion.levels]
    sums = grid.subtree_sums(squares)
    root_scale = expansion.domain.scale
    best = max(
        float(np.max(s)) / math.ldexp(1.0, root_scale - level) for level, s in enumerate(sums)
    )
    return best**0.5


def random_expansion(root, depth, rng, mean_zero=False):
    """
    i.i.d. standard normal Haar coefficients on the depth-`depth` window of
    the root (min_scale = scale(root) - depth).
    """
    if depth < 0:
        raise ValueError(f"depth must be nonnegative, got {depth}")
    levels = tuple(rng.standard_normal(2**level) for level in range(depth + 1))
    mean = 0.0 if mean_zero else float(rng.standard_normal())
    return HaarExpansion(root, root.scale - depth, mean, levels)


def random_step_function(root, depth, rng, mean_zero=False, nonnegative=False):
    f = synthesize(random_expansion(root, depth, rng, mean_zero=mean_zero))
    return abs(f) if nonnegative else f
