"""
Constants of the Haar shift in Haar coordinates.

`derive()` measures them by direct integration on basis pairs; the values the
package runs with are the frozen ones in calibration.json, loaded at import.
"""

import logging
import math
from pathlib import Path

import numpy as np

logger = logging.getLogger(__name__)

PATH = Path(__file__).with_name("calibration.json")
DEPTH = 3
TOLERANCE = 1e-12


def load(path=PATH):
    from pydyadic.storage import storage

    return dict(storage(path))


_frozen = load()
# <Hf, h_I> = KAPPA sgn(I) <f, h_Par(I)>, sgn = +1 on left children.
KAPPA = _frozen["kappa"]
# P(1,0,0)(b, Hf) - H P(1,0,0)(b, f) = tilde_paraproduct(b, f, alpha=TILDE_ALPHA, c=TILDE_C).
TILDE_ALPHA = _frozen["tilde_alpha"]
TILDE_C = _frozen["tilde_c"]


def _coefficient(f, interval):
    from pydyadic.dyadic import H0, haar_function, inner_product

    return inner_product(f, haar_function(interval, H0))


def derive(depth=DEPTH):
    """
    Re-derive the constants from scratch.

    kappa is <H h_R, h_{R_left}> for the unit root R; the right child must
    give -kappa. The degenerate term of the commutator decomposition is
    measured on (b, f) = (h_J, h_J) for every J of the depth-`depth` window
    and fitted against the uncalibrated tilde paraproduct; the pairs
    (h_J, h_{J_left}) must give a zero degenerate term.
    """
    from pydyadic.dyadic import H0, UNIT, haar_function, lp_norm
    from pydyadic.paraproduct import Signature, paraproduct, tilde_paraproduct
    from pydyadic.shift import haar_shift

    root = UNIT
    min_scale = root.scale - depth
    deeper = min_scale - 1

    h = haar_function(root, H0)
    shifted = haar_shift(h, root, min_scale)
    kappa = _coefficient(shifted, root.left_child)
    mirror = _coefficient(shifted, root.right_child)
    if abs(kappa + mirror) > TOLERANCE:
        raise ValueError(f"Shift coefficients {kappa} and {mirror} are not opposite")

    def degenerate(b, f):
        return paraproduct(Signature(1, 0, 0), b, haar_shift(f, root, min_scale), root, deeper) - (
            haar_shift(paraproduct(Signature(1, 0, 0), b, f, root, min_scale), root, min_scale)
        )

    alphas, cs, mismatch = [], [], 0.0
    for J in root.subintervals(min_scale):
        hJ = haar_function(J, H0)
        measured = degenerate(hJ, hJ)
        unit = tilde_paraproduct(hJ, hJ, root, min_scale)
        left = _coefficient(measured, J.left_child) / _coefficient(unit, J.left_child)
        right = _coefficient(measured, J.right_child) / _coefficient(unit, J.right_child)
        alphas.append(left)
        cs.append(right / left)
        fitted = tilde_paraproduct(hJ, hJ, root, min_scale, alpha=left, c=right / left)
        mismatch = max(mismatch, lp_norm(measured - fitted, math.inf))
        if J.scale > min_scale:
            child = haar_function(J.left_child, H0)
            mismatch = max(mismatch, lp_norm(degenerate(hJ, child), math.inf))

    alpha, c = float(np.mean(alphas)), float(np.mean(cs))
    spread = max(np.ptp(alphas), np.ptp(cs))
    if spread > TOLERANCE or mismatch > TOLERANCE:
        logger.warning("Calibration spread %.3g, mismatch %.3g", spread, mismatch)
    return {
        "depth": depth,
        "kappa": kappa,
        "tilde_alpha": alpha,
        "tilde_c": c,
        "spread": float(spread),
        "mismatch": float(mismatch),
    }


def report(depth=DEPTH):
    """
    Derived constants next to the frozen ones.
    """
    derived = derive(depth)
    frozen = {"kappa": KAPPA, "tilde_alpha": TILDE_ALPHA, "tilde_c": TILDE_C}
    deviation = max(abs(derived[k] - v) for k, v in frozen.items())
    return {
        "operation": "calibration",
        "derived": derived,
        "frozen": frozen,
        "deviation": deviation,
        "passed": deviation <= TOLERANCE
        and derived["spread"] <= TOLERANCE
        and derived["mismatch"] <= TOLERANCE,
    }


def freeze(path=PATH, depth=DEPTH):
    from pydyadic.storage import storage

    derived = derive(depth)
    store = storage(path)
    store.update(
        kappa=derived["kappa"], tilde_alpha=derived["tilde_alpha"], tilde_c=derived["tilde_c"]
    )
    store.sync()
    return derived
