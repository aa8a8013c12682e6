"""
Array kernels over the dyadic cells of a root interval.

A window over a root R of scale K holds L levels of Haar intervals: level l
has 2**l intervals of scale K - l, listed left to right. A function resolved
in the window lives on n = 2**L cells of width 2**(K - L). Everything in here
works on plain numpy arrays so the public modules can stay in the language of
intervals and step functions.
"""

import math

import numpy as np


def cell_edges(left, cell_scale, n):
    return left + np.arange(n + 1, dtype=float) * math.ldexp(1.0, cell_scale)


def level_integrals(cells, levels):
    """
    Integrals over every interval of the top `levels` levels, given the
    integrals over the 2**levels cells. Returns a list indexed by level, the
    last entry being `cells` itself.
    """
    out = [np.asarray(cells, dtype=float)]
    for _ in range(levels):
        below = out[-1]
        out.append(below[0::2] + below[1::2])
    out.reverse()
    return out


def analysis(cells, root_scale):
    """
    Fast Haar transform of cell integrals.

    Returns (mean, coeffs): mean is <f, |R|^-1/2 1_R>, coeffs[l] the Haar
    coefficients <f, h_I> at level l.
    """
    levels = int(round(math.log2(len(cells))))
    sums = level_integrals(cells, levels)
    mean = sums[0][0] * math.ldexp(1.0, root_scale) ** -0.5
    coeffs = []
    for level in range(levels):
        children = sums[level + 1]
        norm = math.ldexp(1.0, root_scale - level) ** -0.5
        coeffs.append((children[1::2] - children[0::2]) * norm)
    return mean, coeffs


def synthesis(mean, coeffs, root_scale, levels=None):
    """
    Cell values of mean * |R|^-1/2 1_R + sum of coeffs[l][i] h_I, on 2**levels
    cells (at least as many levels as `coeffs` holds).
    """
    if levels is None:
        levels = len(coeffs)
    values = np.array([mean * math.ldexp(1.0, root_scale) ** -0.5])
    for level, c in enumerate(coeffs):
        step = np.asarray(c, dtype=float) * math.ldexp(1.0, root_scale - level) ** -0.5
        values = np.stack([values - step, values + step], axis=1).ravel()
    return np.repeat(values, 2 ** (levels - len(coeffs)))


def indicator_synthesis(weights, levels):
    """
    Cell values of sum of weights[l][i] 1_I on 2**levels cells (levels at
    least len(weights) - 1).
    """
    values = np.zeros(1)
    for level, w in enumerate(weights):
        if level:
            values = np.repeat(values, 2)
        values = values + np.asarray(w, dtype=float)
    return np.repeat(values, 2 ** (levels - max(len(weights) - 1, 0)))


def level_averages(cells, root_scale, levels):
    sums = level_integrals(cells, levels)
    return [s / math.ldexp(1.0, root_scale - level) for level, s in enumerate(sums)]


def subtree_sums(per_level):
    """
    For each interval, the sum of `per_level` over the interval and all its
    dyadic descendants in the window.
    """
    out = [np.asarray(per_level[-1], dtype=float)]
    for values in reversed(per_level[:-1]):
        below = out[-1]
        out.append(np.asarray(values, dtype=float) + below[0::2] + below[1::2])
    out.reverse()
    return out


def descend(values, levels):
    """
    Running maximum from the top level down to each cell.
    """
    out = np.asarray(values[0], dtype=float)
    for current in values[1 : levels + 1]:
        out = np.maximum(np.repeat(out, 2), current)
    return out


def children_coefficients(coeffs, left, right):
    """
    Coefficients one level deeper than `coeffs`: the left child of I gets
    left * c_I, the right child right * c_I, the root gets 0.
    """
    out = [np.zeros(1)]
    for c in coeffs:
        c = np.asarray(c, dtype=float)
        out.append(np.stack([left * c, right * c], axis=1).ravel())
    return out


def ancestor_sums(per_level):
    """
    For each interval, the sum of `per_level` over its strict ancestors in the
    window.
    """
    out = [np.zeros(1)]
    for level in range(1, len(per_level)):
        above = out[-1] + np.asarray(per_level[level - 1], dtype=float)
        out.append(np.repeat(above, 2))
    return out


def quarter_synthesis(coeffs, root_scale, pattern):
    """
    Cell values of sum of coeffs[l][i] |I|^-1/2 p_I, where p_I takes the four
    values of `pattern` on the quarters of I. Output has 2**(len(coeffs) + 1)
    cells.
    """
    levels = len(coeffs)
    pattern = np.asarray(pattern, dtype=float)
    values = np.zeros(2 ** (levels + 1))
    for level, c in enumerate(coeffs):
        amp = np.asarray(c, dtype=float) * math.ldexp(1.0, root_scale - level) ** -0.5
        values += np.repeat(np.outer(amp, pattern).ravel(), 2 ** (levels - 1 - level))
    return values


def parent_pairings(coeffs, left, right):
    """
    Adjoint of `children_coefficients`: left * c_left + right * c_right for
    every parent, dropping the root level of `coeffs`.
    """
    out = []
    for c in coeffs[1:]:
        c = np.asarray(c, dtype=float)
        out.append(left * c[0::2] + right * c[1::2])
    return out
