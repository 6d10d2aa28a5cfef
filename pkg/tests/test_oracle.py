from fractions import Fraction

import numpy as np
import pytest

from shiftlab.counterexample import branch_tail_bound, branch_tails_exact, choose_parameters, gamma_solve, weights
from shiftlab.oracle import EmptyInteriorError, product_compare, shift_matrix
from shiftlab.radical import Radical
from shiftlab.scalars import Verdict, to_enclosure
from shiftlab.shift import TreeWeights
from shiftlab.tree import Branch, Spine, make_truncation


def test_small_matrix_shape():
    t = make_truncation(2, 2, 2)
    mat = shift_matrix(t, weights(choose_parameters(2, 2)))
    assert len(mat.entries) == 6 == len(t) - 1
    assert mat.column(Branch(1, 2)) == []
    assert len(mat.column(Spine(0))) == 2
    d = mat.as_dict()
    assert d[(Branch(1, 2), Branch(1, 1))] == Radical(8)


def test_coo_dump():
    t = make_truncation(1, 1, 2)
    csv = shift_matrix(t, weights(choose_parameters(2, 2))).to_coo_csv().splitlines()
    assert csv[0] == "row,col,value_sq"
    assert "s0,s-1,4" in csv and "b1.2,b1.1,8" in csv


def test_products_match_dense_float():
    params = choose_parameters(3, 2)
    t = make_truncation(6, 3, 6)
    w = weights(params, gamma_solve(params, 8))
    rep = product_compare(t, w, 2)
    a = np.zeros((len(t), len(t)))
    for e in shift_matrix(t, w).entries:
        a[t.index(e.row), t.index(e.col)] = float(to_enclosure(e.value_sq).mid) ** 0.5
    g = np.linalg.matrix_power(a.T @ a, 2)
    h = np.linalg.matrix_power(a.T, 2) @ np.linalg.matrix_power(a, 2)
    for row in rep.rows:
        i = t.index(row.vertex)
        assert float(row.g.mid) == pytest.approx(g[i, i], rel=1e-12)
        assert float(row.h.mid) == pytest.approx(h[i, i], rel=1e-12)
        assert row.agrees


def test_constant_weights_equal_everywhere():
    t = make_truncation(4, 2, 4)
    rep = product_compare(t, TreeWeights.constant(), 2)
    assert rep.verdict is Verdict.EQUAL_WITHIN
    assert all(r.g.contains(1) and r.h.contains(1) for r in rep.rows)


def test_empty_interior():
    with pytest.raises(EmptyInteriorError):
        product_compare(make_truncation(1, 1, 1), TreeWeights.constant(), 3)


@pytest.mark.parametrize("m,separated", [(2, False), (3, True)])
def test_counterexample_verdicts(m, separated):
    params = choose_parameters(2, 2)
    I = 30
    t = make_truncation(6, I, 6)
    rep = product_compare(t, weights(params), m, lambda j: branch_tail_bound(params, I, j).bound,
                          branch_tails_exact(params, I))
    assert not rep.disagreements
    assert bool(rep.separated) is separated
    if separated:
        assert rep.separated == [Spine(0)]
        assert rep.row(Spine(0)).gap.lo > 24
    else:
        assert rep.verdict is Verdict.EQUAL_WITHIN
        assert rep.max_gap <= rep.row(Spine(0)).tail + Fraction(1, 2 ** 60)
