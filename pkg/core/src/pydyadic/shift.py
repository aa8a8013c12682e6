"""
The Haar shift sum <f, h_I> g_I on a window and its commutators with
multiplication by a symbol b.

The shift moves coefficients one scale down, so its output lives one level
finer than its input: a window (root, min_scale) maps functions resolved on
cells of width 2**(min_scale - 1) to functions resolved on cells of width
2**(min_scale - 2).
"""

import logging
import math
from dataclasses import dataclass
from functools import partial

import numpy as np

from pydyadic import calibration, dyadic, grid
from pydyadic.dyadic import HaarExpansion, PiecewiseConstant, UNIT, lp_norm
from pydyadic.paraproduct import (
    Signature,
    paraproduct,
    require_mean_zero,
    require_resolved,
    tilde_paraproduct,
)
from pydyadic.power import power_iteration
from pydyadic.util import member_rng, summarize
from pydyadic.workers import ensemble_map

logger = logging.getLogger(__name__)

G_PATTERN = (-1.0, 1.0, 1.0, -1.0)


def _shift_cells(values, root_scale):
    """
    Cell values of the shift of a function given by its values on 2**L cells.
    """
    n = len(values)
    width = math.ldexp(1.0, root_scale - int(round(math.log2(n))))
    _, coeffs = grid.analysis(np.asarray(values) * width, root_scale)
    return grid.quarter_synthesis(coeffs, root_scale, G_PATTERN)


def _shift_adjoint_cells(values, root_scale):
    """
    Cell values of sum <u, g_I> h_I for u given on 2**(L + 1) cells.
    """
    n = len(values)
    width = math.ldexp(1.0, root_scale - int(round(math.log2(n))))
    _, coeffs = grid.analysis(np.asarray(values) * width, root_scale)
    pairings = grid.parent_pairings(coeffs, calibration.KAPPA, -calibration.KAPPA)
    return grid.synthesis(0.0, pairings, root_scale)


def haar_shift(f, root, min_scale):
    dyadic.check_window(root, min_scale)
    dyadic.check_support(f, root)
    scale = dyadic.cell_scale(root, min_scale)
    cells = dyadic.cell_integrals(f, root, scale)
    _, coeffs = grid.analysis(cells, root.scale)
    values = grid.quarter_synthesis(coeffs, root.scale, G_PATTERN)
    return PiecewiseConstant.from_cells(root.left, math.ldexp(1.0, scale - 1), values)


def haar_shift_coeffs(e):
    """
    The shift in Haar coordinates: coefficient kappa sgn(I) e[Par(I)] on I,
    one level deeper than e, and no mean.
    """
    kappa = calibration.KAPPA
    levels = grid.children_coefficients(e.levels, kappa, -kappa)
    return HaarExpansion(e.domain, e.min_scale - 1, 0.0, tuple(levels))


def commutator_direct(b, f, root, min_scale):
    """
    b Hf - H(b f), H the Haar shift on the window; exact pointwise products.
    """
    return b * haar_shift(f, root, min_scale) - haar_shift(b * f, root, min_scale)


def commutator_adjoint(b, u, root, min_scale):
    """
    The adjoint of f -> [b, H] f: u -> H*(b u) - b H*(u), with H*u the sum of
    <u, g_I> h_I over the window.
    """
    dyadic.check_support(u, root)
    fine = dyadic.cell_scale(root, min_scale) - 1

    def shift_adjoint(v):
        cells = dyadic.cell_integrals(v, root, fine) / math.ldexp(1.0, fine)
        values = _shift_adjoint_cells(cells, root.scale)
        return PiecewiseConstant.from_cells(root.left, math.ldexp(1.0, fine + 1), values)

    return shift_adjoint(b * u) - b * shift_adjoint(u)


@dataclass(frozen=True)
class CommutatorDecomposition:
    p010_shifted: PiecewiseConstant
    shifted_p010: PiecewiseConstant
    p001_shifted: PiecewiseConstant
    shifted_p001: PiecewiseConstant
    degenerate: PiecewiseConstant
    residual: float

    @property
    def terms(self):
        return (
            self.p010_shifted,
            self.shifted_p010,
            self.p001_shifted,
            self.shifted_p001,
            self.degenerate,
        )

    def total(self):
        out = PiecewiseConstant()
        for term in self.terms:
            out = out + term
        return out


def commutator_decomposed(b, f, root, min_scale):
    """
    [b, H] f as five terms:

        P(0,1,0)(b, Hf) - H P(0,1,0)(b, f)
        + P(0,0,1)(b, Hf) - H P(0,0,1)(b, f)
        + the degenerate term,

    where the paraproducts against Hf run one scale deeper than the window,
    and the degenerate term collects P(1,0,0)(b, Hf) - H P(1,0,0)(b, f) as the
    calibrated tilde paraproduct.
    """
    scale = dyadic.cell_scale(root, min_scale)
    for g, name in ((b, "b"), (f, "f")):
        dyadic.check_support(g, root)
        require_mean_zero(g, name)
        require_resolved(g, root, scale, name)
    shifted = haar_shift(f, root, min_scale)
    deeper = min_scale - 1
    terms = (
        paraproduct(Signature(0, 1, 0), b, shifted, root, deeper),
        -haar_shift(paraproduct(Signature(0, 1, 0), b, f, root, min_scale), root, min_scale),
        paraproduct(Signature(0, 0, 1), b, shifted, root, deeper),
        -haar_shift(paraproduct(Signature(0, 0, 1), b, f, root, min_scale), root, min_scale),
        tilde_paraproduct(
            b, f, root, min_scale, alpha=calibration.TILDE_ALPHA, c=calibration.TILDE_C
        ),
    )
    total = terms[0] + terms[1] + terms[2] + terms[3] + terms[4]
    residual = lp_norm(commutator_direct(b, f, root, min_scale) - total, math.inf)
    return CommutatorDecomposition(*terms, residual)


class _CommutatorOperator:
    """
    [b, H] on cell arrays, in orthonormal coordinates: inputs live on the
    2**L cells of the window, outputs on 2**(L + 1) cells.
    """

    def __init__(self, b, root, min_scale):
        dyadic.check_window(root, min_scale)
        dyadic.check_support(b, root)
        self.root = root
        scale = dyadic.cell_scale(root, min_scale)
        self.coarse = math.ldexp(1.0, scale)
        self.fine = self.coarse / 2
        self.b_coarse = dyadic.cell_integrals(b, root, scale) / self.coarse
        self.b_fine = np.repeat(self.b_coarse, 2)
        if not b.is_resolved(root, scale):
            raise ValueError(f"b must be constant on the cells of width 2**{scale} of {root}")

    def forward(self, x):
        f = x / self.coarse**0.5
        out = self.b_fine * _shift_cells(f, self.root.scale) - _shift_cells(
            self.b_coarse * f, self.root.scale
        )
        return out * self.fine**0.5

    def adjoint(self, y):
        u = y / self.fine**0.5
        out = _shift_adjoint_cells(self.b_fine * u, self.root.scale) - self.b_coarse * (
            _shift_adjoint_cells(u, self.root.scale)
        )
        return out * self.coarse**0.5

    def normal(self, x):
        return self.adjoint(self.forward(x))


def commutator_norm_vs_bmo(b, root, min_scale, power_iters=500, seed=0, strict=False):
    """
    Power-iteration estimate of |[b, H]|_{2->2} next to the dyadic BMO norm
    of b.
    """
    operator = _CommutatorOperator(b, root, min_scale)
    bmo = dyadic.bmo_norm(dyadic.analyze(b, root, min_scale))
    x0 = np.random.default_rng(seed).standard_normal(len(operator.b_coarse))
    result = power_iteration(
        operator.normal, x0, max_iter=power_iters, strict=strict, label="commutator norm"
    )
    return {
        "operation": "commutator_norm_vs_bmo",
        "comm_norm_estimate": result.value,
        "bmo": bmo,
        "ratio": result.value / bmo if bmo > 0 else None,
        "power": result.as_dict(),
    }


def _commutator_member(root, depth, power_iters, seed, index):
    b = dyadic.random_step_function(root, depth, member_rng(seed, index))
    return commutator_norm_vs_bmo(b, root, root.scale - depth, power_iters, seed=index)


def commutator_ensemble(ensemble_size, depth, seed, root=UNIT, workers=1, power_iters=500):
    member = partial(_commutator_member, root, depth, power_iters, seed)
    reports = ensemble_map(member, range(ensemble_size), workers)
    return {
        "operation": "commutator_ensemble",
        "ensemble": ensemble_size,
        "depth": depth,
        "seed": seed,
        "comm_norm_over_bmo": summarize([r["ratio"] for r in reports if r["ratio"] is not None]),
        "converged": all(r["power"]["converged"] for r in reports),
    }
