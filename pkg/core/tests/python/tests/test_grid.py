"""
Exercise the array kernels behind the dyadic modules.
"""

import numpy as np
import pytest

from pydyadic import grid


def test_cell_edges():
    """
    Edges are equispaced from the left end with the cell width.
    """
    edges = grid.cell_edges(1.0, -2, 4)
    assert np.array_equal(edges, [1.0, 1.25, 1.5, 1.75, 2.0])


def test_level_integrals_coarse_to_fine():
    """
    Level 0 holds the total, the last level the cells themselves.
    """
    sums = grid.level_integrals([1.0, 2.0, 3.0, 4.0], 2)
    assert [s.tolist() for s in sums] == [[10.0], [3.0, 7.0], [1.0, 2.0, 3.0, 4.0]]


def test_analysis_of_a_single_haar_function():
    """
    The cells of h on [0, 1) analyse to one unit coefficient.
    """
    # h_[0,1) is -1 then +1; cells of width 1/2 carry integrals -1/2, 1/2
    mean, coeffs = grid.analysis(np.array([-0.5, 0.5]), 0)
    assert mean == 0.0
    assert len(coeffs) == 1
    assert coeffs[0].tolist() == [1.0]


def test_analysis_synthesis_inverse():
    """
    Synthesis of the analysis returns the cell averages.
    """
    rng = np.random.default_rng(3)
    values = rng.standard_normal(16)
    # Root [0, 2), scale 1: 16 cells of width 1/8
    width = 2.0 / 16
    mean, coeffs = grid.analysis(values * width, 1)
    assert len(coeffs) == 4
    assert np.allclose(grid.synthesis(mean, coeffs, 1), values, atol=1e-13, rtol=0)


def test_synthesis_pads_to_finer_levels():
    """
    Asking for more levels than coefficients repeats every value.
    """
    values = grid.synthesis(0.0, [np.array([1.0])], 0, levels=3)
    assert values.tolist() == [-1.0] * 4 + [1.0] * 4


def test_indicator_synthesis():
    """
    Weights accumulate down the tree of indicators.
    """
    values = grid.indicator_synthesis([[1.0], [2.0, 3.0]], 2)
    assert values.tolist() == [3.0, 3.0, 4.0, 4.0]
    # No weights at all still produces the zero function on the cells
    assert grid.indicator_synthesis([], 1).tolist() == [0.0, 0.0]


def test_level_averages_and_descend():
    """
    The running maximum of averages is the dyadic maximal function.
    """
    cells = np.array([0.0, 4.0, 1.0, 1.0]) * 0.25
    averages = grid.level_averages(cells, 0, 2)
    assert averages[0].tolist() == [1.5]
    assert averages[1].tolist() == [2.0, 1.0]
    assert grid.descend(averages, 2).tolist() == [2.0, 4.0, 1.5, 1.5]


def test_subtree_and_ancestor_sums():
    """
    Subtree sums include the interval, ancestor sums exclude it.
    """
    per_level = [np.array([1.0]), np.array([2.0, 3.0]), np.array([4.0, 5.0, 6.0, 7.0])]
    subtree = grid.subtree_sums(per_level)
    assert subtree[0].tolist() == [28.0]
    assert subtree[1].tolist() == [11.0, 16.0]
    ancestors = grid.ancestor_sums(per_level)
    assert ancestors[0].tolist() == [0.0]
    assert ancestors[1].tolist() == [1.0, 1.0]
    assert ancestors[2].tolist() == [3.0, 3.0, 4.0, 4.0]


def test_children_coefficients_and_parent_pairings_are_adjoint():
    """
    <children(c), d> == <c, parents(d)> level by level.
    """
    rng = np.random.default_rng(5)
    c = [rng.standard_normal(2**level) for level in range(3)]
    d = [rng.standard_normal(2**level) for level in range(4)]
    up = grid.children_coefficients(c, 0.5, -2.0)
    down = grid.parent_pairings(d, 0.5, -2.0)
    assert up[0].tolist() == [0.0]
    lhs = sum(float(np.dot(a, b)) for a, b in zip(up, d))
    rhs = sum(float(np.dot(a, b)) for a, b in zip(c, down))
    assert lhs == pytest.approx(rhs, abs=1e-12)


def test_quarter_synthesis_pattern():
    """
    One coefficient on the root spreads the pattern over four cells.
    """
    values = grid.quarter_synthesis([np.array([1.0])], 0, (-1.0, 1.0, 1.0, -1.0))
    assert values.tolist() == [-1.0, 1.0, 1.0, -1.0]
    # Two levels: the second level pattern lands on eighths
    values = grid.quarter_synthesis([np.zeros(1), np.array([0.0, 2.0**-0.5])], 0, (1, 2, 3, 4))
    assert np.allclose(values, [0.0] * 4 + [1.0, 2.0, 3.0, 4.0], atol=1e-15, rtol=0)
