"""
Paraproducts on a dyadic window, the product identity, and the estimates
that compare paraproduct norms with the dyadic BMO norm.

With coefficients a_I = <f1, h_I^e1> |I|^-1/2 and b_I = <f2, h_I^e2>, the
paraproduct of signature (e1, e2, e3) is sum a_I b_I h_I^e3 over the window,
where h^0 = h and h^1 is the normalized indicator.
"""

import logging
import math
from dataclasses import dataclass, field
from functools import partial

import numpy as np

from pydyadic import dyadic, grid
from pydyadic.dyadic import PiecewiseConstant, UNIT, lp_norm
from pydyadic.power import power_iteration
from pydyadic.util import NotSupported, member_rng, summarize
from pydyadic.workers import ensemble_map

logger = logging.getLogger(__name__)

MEAN_TOLERANCE = 1e-12
PERTURBATION = 1e-3


@dataclass(frozen=True)
class Signature:
    e1: int
    e2: int
    e3: int

    def __post_init__(self):
        for letter in self:
            if letter not in (0, 1):
                raise ValueError(f"Signature letters must be 0 or 1, got {tuple(self)}")
        if self.means == 3:
            logger.info("Signature (1,1,1) is the fractional-integral case; no bound applies")

    def __iter__(self):
        return iter((self.e1, self.e2, self.e3))

    def __str__(self):
        return f"({self.e1},{self.e2},{self.e3})"

    @property
    def means(self):
        return self.e1 + self.e2 + self.e3

    @classmethod
    def parse(cls, text):
        letters = [c for c in text if c in "01"]
        if len(letters) != 3:
            raise ValueError(f"A signature needs three letters from {{0,1}}, got {text!r}")
        return cls(*(int(c) for c in letters))


def _lengths(root, levels):
    return [math.ldexp(1.0, root.scale - level) for level in range(levels)]


def _letters(f, root, min_scale):
    """
    Coefficients of f against h_I and h1_I for every I in the window, per
    level.
    """
    dyadic.check_window(root, min_scale)
    dyadic.check_support(f, root)
    scale = dyadic.cell_scale(root, min_scale)
    levels = root.scale - scale
    cells = dyadic.cell_integrals(f, root, scale)
    _, oscillation = grid.analysis(cells, root.scale)
    sums = grid.level_integrals(cells, levels)[:levels]
    means = [s / length**0.5 for s, length in zip(sums, _lengths(root, levels))]
    return oscillation, means


def paraproduct(sig, f1, f2, root, min_scale):
    o1, m1 = _letters(f1, root, min_scale)
    o2, m2 = _letters(f2, root, min_scale)
    first = m1 if sig.e1 else o1
    second = m2 if sig.e2 else o2
    levels = len(first)
    lengths = _lengths(root, levels)
    weights = [a * b / length**0.5 for a, b, length in zip(first, second, lengths)]
    if sig.e3:
        values = grid.indicator_synthesis(
            [w / length**0.5 for w, length in zip(weights, lengths)], levels
        )
    else:
        values = grid.synthesis(0.0, weights, root.scale, levels)
    width = math.ldexp(1.0, dyadic.cell_scale(root, min_scale))
    return PiecewiseConstant.from_cells(root.left, width, values)


def tilde_paraproduct(b, f, root, min_scale, alpha=1.0, c=1.0):
    """
    alpha sum (<b, h_I> / |I|^1/2) <f, h_I> (h_{I_left} + c h_{I_right}).

    The output lives one scale finer than the window.
    """
    ob, _ = _letters(b, root, min_scale)
    of, _ = _letters(f, root, min_scale)
    lengths = _lengths(root, len(ob))
    weights = [alpha * x * y / length**0.5 for x, y, length in zip(ob, of, lengths)]
    values = grid.synthesis(0.0, grid.children_coefficients(weights, 1.0, c), root.scale)
    width = math.ldexp(1.0, dyadic.cell_scale(root, min_scale) - 1)
    return PiecewiseConstant.from_cells(root.left, width, values)


def require_mean_zero(f, name):
    if abs(f.integral()) > MEAN_TOLERANCE * max(1.0, lp_norm(f, 1)):
        raise ValueError(f"{name} must have mean zero on the root, got integral {f.integral():.3g}")


def require_resolved(f, root, scale, name):
    if not f.is_resolved(root, scale):
        raise ValueError(
            f"{name} must be constant on the cells of width 2**{scale} of {root}"
        )


@dataclass(frozen=True)
class ProductDecomposition:
    p100: PiecewiseConstant
    p001: PiecewiseConstant
    p010: PiecewiseConstant
    residual: float
    correction: PiecewiseConstant = field(default_factory=PiecewiseConstant)

    @property
    def terms(self):
        return self.p100, self.p001, self.p010

    def total(self):
        return self.p100 + self.p001 + self.p010 + self.correction


def _three_terms(f1, f2, root, min_scale):
    return (
        paraproduct(Signature(1, 0, 0), f1, f2, root, min_scale),
        paraproduct(Signature(0, 0, 1), f1, f2, root, min_scale),
        paraproduct(Signature(0, 1, 0), f1, f2, root, min_scale),
    )


def product_decomposition(f1, f2, root, min_scale):
    """
    f1 f2 = P(1,0,0) + P(0,0,1) + P(0,1,0), for mean-zero inputs resolved in
    the window; the residual is the exact sup-norm defect.
    """
    scale = dyadic.cell_scale(root, min_scale)
    for f, name in ((f1, "f1"), (f2, "f2")):
        dyadic.check_support(f, root)
        require_mean_zero(f, name)
        require_resolved(f, root, scale, name)
    terms = _three_terms(f1, f2, root, min_scale)
    residual = lp_norm(f1 * f2 - (terms[0] + terms[1] + terms[2]), math.inf)
    return ProductDecomposition(*terms, residual)


def product_decomposition_general(f1, f2, root, min_scale):
    """
    The product identity for inputs with nonzero means: the paraproducts of
    the mean-free parts plus the correction
    m1 f2 + m2 f1 - m1 m2 1_root, m the average over the root.
    """
    indicator = PiecewiseConstant.indicator(root.left, root.right)
    m1, m2 = dyadic.average(f1, root), dyadic.average(f2, root)
    terms = _three_terms(f1 - m1 * indicator, f2 - m2 * indicator, root, min_scale)
    correction = m1 * f2 + m2 * f1 - (m1 * m2) * indicator
    residual = lp_norm(f1 * f2 - (terms[0] + terms[1] + terms[2] + correction), math.inf)
    return ProductDecomposition(*terms, residual, correction)


def _holder_member(sig, p1, p2, q, root, depth, seed, index):
    rng = member_rng(seed, index)
    f1 = dyadic.random_step_function(root, depth, rng)
    f2 = dyadic.random_step_function(root, depth, rng)
    denominator = lp_norm(f1, p1) * lp_norm(f2, p2)
    if denominator == 0:
        return math.nan
    return lp_norm(paraproduct(sig, f1, f2, root, root.scale - depth), q) / denominator


def _holder_estimate(sig, p1, p2, ensemble_size, depth, seed, root=UNIT, workers=1):
    for name, p in (("p1", p1), ("p2", p2)):
        if not 1 < p < math.inf:
            raise ValueError(f"{name} must lie in (1, inf), got {p}")
    if ensemble_size < 1:
        raise ValueError(f"ensemble_size must be positive, got {ensemble_size}")
    q = 1.0 / (1.0 / p1 + 1.0 / p2)
    member = partial(_holder_member, sig, p1, p2, q, root, depth, seed)
    ratios = np.array(ensemble_map(member, range(ensemble_size), workers))
    skipped = int(np.sum(np.isnan(ratios)))
    summary = summarize(ratios)
    logger.info(
        "Holder estimate %s: max ratio %s over %d pairs", sig, summary["max"], ensemble_size
    )
    return {
        "operation": "holder_estimate",
        "signature": list(sig),
        "p1": p1,
        "p2": p2,
        "q": q,
        "ensemble": ensemble_size,
        "depth": depth,
        "seed": seed,
        "max_ratio": summary["max"],
        "ratios": summary,
        "skipped": skipped,
    }


def holder_estimator(sig):
    if sig.means > 1:
        return NotSupported(
            "holder_estimate",
            f"No Holder bound is offered for signature {sig}: at most one letter may be 1",
        )
    return _holder_estimate


def holder_estimate(sig, p1, p2, ensemble_size, depth, seed, root=UNIT, workers=1):
    """
    Empirical constants |P(f1, f2)|_q / (|f1|_p1 |f2|_p2), 1/q = 1/p1 + 1/p2,
    over a seeded ensemble of random pairs.
    """
    return holder_estimator(sig)(sig, p1, p2, ensemble_size, depth, seed, root, workers)


class _EmbeddingOperator:
    """
    f -> P(0,1,0)(b, f) in orthonormal coordinates: f is constant on the cells
    of width 2**min_scale, the output is taken in Haar coordinates.
    """

    def __init__(self, b, root, min_scale):
        if min_scale > root.scale:
            raise ValueError(f"min_scale {min_scale} must not exceed the root scale {root.scale}")
        expansion = dyadic.analyze(b, root, min_scale)
        self.root, self.min_scale = root, min_scale
        self.expansion = expansion
        self.levels = expansion.depth
        self.cells = 2 ** (self.levels - 1)
        width = math.ldexp(1.0, min_scale)
        self.factors = [
            c * width**0.5 / length
            for c, length in zip(expansion.levels, _lengths(root, self.levels))
        ]

    def forward(self, x):
        sums = grid.level_integrals(x, self.levels - 1)
        return [t * s for t, s in zip(self.factors, sums)]

    def adjoint(self, ys):
        return grid.indicator_synthesis(
            [t * y for t, y in zip(self.factors, ys)], self.levels - 1
        )

    def normal(self, x):
        return self.adjoint(self.forward(x))

    def testing(self):
        """
        |P(0,1,0)(b, |J|^-1/2 1_J)|_2^2 for every J, per level.
        """
        lengths = _lengths(self.root, self.levels)
        squares = [c * c for c in self.expansion.levels]
        inside = grid.subtree_sums(squares)
        above = grid.ancestor_sums([s / length**2 for s, length in zip(squares, lengths)])
        return [i / length + length * a for i, a, length in zip(inside, above, lengths)]

    def indicator(self, level, index):
        span = 2 ** (self.levels - 1 - level)
        x = np.zeros(self.cells)
        x[index * span : (index + 1) * span] = 1.0
        return x


def _testing_sup_p(b, p, root, min_scale):
    best, where = 0.0, root
    for J in root.subintervals(min_scale):
        test = PiecewiseConstant.indicator(J.left, J.right, J.length ** (-1.0 / p))
        value = lp_norm(paraproduct(Signature(0, 1, 0), b, test, root, min_scale), p)
        if value > best:
            best, where = value, J
    return best, where


def embedding_report(b, p, root, min_scale, power_iters=500, seed=0, strict=False):
    """
    Compare |f -> P(0,1,0)(b, f)|, its testing constant over normalized
    indicators and the dyadic BMO norm of b.

    For p = 2 the testing supremum is computed in closed form and bounds the
    BMO norm from above, and the power iteration starts from the maximizing
    indicator. Other p are reported empirically, without a norm estimate.
    """
    operator = _EmbeddingOperator(b, root, min_scale)
    bmo = dyadic.bmo_norm(operator.expansion)
    report = {"operation": "embedding_report", "p": p, "bmo": bmo, "certified": p == 2}
    if p != 2:
        testing_sup, where = _testing_sup_p(b, p, root, min_scale)
        report.update(testing_sup=testing_sup, testing_interval=where.key, op_norm_estimate=None)
        return report

    testing = operator.testing()
    level = int(np.argmax([t.max() for t in testing]))
    index = int(np.argmax(testing[level]))
    testing_sup = float(testing[level][index]) ** 0.5

    x0 = operator.indicator(level, index)
    x0 /= np.linalg.norm(x0)
    noise = np.random.default_rng(seed).standard_normal(x0.size)
    x0 = x0 + PERTURBATION * noise / np.linalg.norm(noise)
    result = power_iteration(
        operator.normal, x0, max_iter=power_iters, strict=strict, label="embedding norm"
    )
    # Both are norms of the operator applied to unit vectors.
    op_norm = max(result.value, testing_sup)
    J = dyadic.DyadicInterval(root.scale - level, (root.position << level) + index)
    report.update(
        testing_sup=testing_sup,
        testing_interval=J.key,
        op_norm_estimate=op_norm,
        power=result.as_dict(),
    )
    return report


def _embedding_member(root, depth, power_iters, seed, index):
    b = dyadic.random_step_function(root, depth, member_rng(seed, index))
    return embedding_report(b, 2.0, root, root.scale - depth, power_iters, seed=index)


def embedding_ensemble(ensemble_size, depth, seed, root=UNIT, workers=1, power_iters=500):
    """
    op_norm / bmo and testing_sup / bmo over random symbols of the given depth.
    """
    if depth < 1:
        raise ValueError(f"Embedding ensembles need depth >= 1, got {depth}")
    member = partial(_embedding_member, root, depth, power_iters, seed)
    reports = ensemble_map(member, range(ensemble_size), workers)
    op_ratios = [r["op_norm_estimate"] / r["bmo"] for r in reports if r["bmo"] > 0]
    testing_ok = all(r["testing_sup"] >= r["bmo"] - 1e-10 for r in reports)
    return {
        "operation": "embedding_ensemble",
        "ensemble": ensemble_size,
        "depth": depth,
        "seed": seed,
        "op_norm_over_bmo": summarize(op_ratios),
        "testing_dominates_bmo": testing_ok,
        "converged": all(r["power"]["converged"] for r in reports),
    }


@dataclass(frozen=True)
class StoppingDecomposition:
    classes: dict
    maximal: dict
    carleson_sum: float

    def as_dict(self):
        return {
            "classes": {k: [I.key for I in v] for k, v in sorted(self.classes.items())},
            "maximal": {k: [I.key for I in v] for k, v in sorted(self.maximal.items())},
            "carleson_sum": self.carleson_sum,
        }


def stopping_decomposition(f, root=None):
    """
    Sort intervals by the dyadic size 2**k <= |<f, h_I>| |I|^-1/2 < 2**(k+1)
    of their normalized coefficient, and keep the inclusion-maximal ones.
    """
    root = f.domain if root is None else root
    if root != f.domain:
        raise ValueError(f"The expansion lives on {f.domain}, not on {root}")
    classes = {}
    for interval, c in f.coeffs.items():
        if c:
            k = math.frexp(abs(c) / interval.length**0.5)[1] - 1
            classes.setdefault(k, []).append(interval)
    maximal = {}
    for k, members in classes.items():
        present = set(members)
        maximal[k] = tuple(
            I for I in members if not any(A in present for A in I.ancestors(root.scale))
        )
    carleson_sum = math.fsum(
        math.ldexp(1.0, 2 * k) * sum(I.length for I in tops) for k, tops in maximal.items()
    )
    return StoppingDecomposition(
        {k: tuple(v) for k, v in classes.items()}, maximal, carleson_sum
    )


def _maximal_member(root, depth, seed, index):
    rng = member_rng(seed, index)
    expansion = dyadic.random_expansion(root, depth, rng)
    f = dyadic.synthesize(expansion)
    energy = lp_norm(f, 2) ** 2
    nonnegative = abs(f)
    maximal = dyadic.dyadic_maximal(nonnegative, root, root.scale - depth - 1)
    stopping = stopping_decomposition(expansion)
    return (
        lp_norm(maximal, 2) / lp_norm(nonnegative, 2),
        stopping.carleson_sum / energy if energy else math.nan,
    )


def maximal_ensemble(ensemble_size, depth, seed, root=UNIT, workers=1):
    """
    |Mf|_2 / |f|_2 for nonnegative random f, and carleson_sum / |f|_2^2 for
    random f, over one ensemble.
    """
    member = partial(_maximal_member, root, depth, seed)
    pairs = ensemble_map(member, range(ensemble_size), workers)
    maximal, carleson = zip(*pairs) if pairs else ((), ())
    return {
        "operation": "maximal_ensemble",
        "ensemble": ensemble_size,
        "depth": depth,
        "seed": seed,
        "maximal_ratio": summarize(maximal),
        "carleson_constant": summarize(carleson),
    }
