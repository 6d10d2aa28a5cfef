from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from shiftlab.counterexample import (NonPrimeError, branch_moment, branch_tail_bound, branch_tails_exact,
                                     choose_parameters, gamma_limit_exponents, gamma_solve, refute_equality_at_k,
                                     refute_via_gamma, sweep, verify_equality_at_n, weights)
from shiftlab.radical import Radical
from shiftlab.scalars import Verdict, to_enclosure
from shiftlab.series import partial_sum
from shiftlab.shift import moment_identity_check
from shiftlab.tree import Branch, Spine, make_truncation


def test_worked_parameters():
    p = choose_parameters(2, 2)
    assert (p.q, p.c0, p.c) == (Fraction(1, 2), 2, 8)
    p = choose_parameters(3, 2)
    assert (p.c0, p.c) == (6, 864)


def test_invalid_parameters():
    with pytest.raises(NonPrimeError):
        choose_parameters(2, 4)
    with pytest.raises(ValueError):
        choose_parameters(1, 2)


def test_spine_weights_constant_for_n2():
    g = gamma_solve(choose_parameters(2, 2), 12)
    assert all(g.squared(j) == Radical(4) for j in range(12))


@pytest.mark.parametrize("n,p", [(2, 3), (3, 2), (3, 5), (4, 2), (5, 3)])
def test_identity_holds_at_every_vertex_for_k_equal_n(n, p):
    params = choose_parameters(n, p)
    gamma = gamma_solve(params, 14)
    w = weights(params, gamma)
    t = make_truncation(12, 4, n + 2)
    tails = branch_tails_exact(params, 4)
    for u in [Spine(i) for i in range(0, 13 - n)] + [Branch(1, 1), Branch(3, 2)]:
        assert moment_identity_check(t, w, u, n, tails).verdict is Verdict.EQUAL_EXACT, u


@pytest.mark.parametrize("n,p,k", [(2, 2, 3), (3, 2, 2), (3, 3, 4), (4, 2, 2)])
def test_identity_fails_at_branching_vertex(n, p, k):
    params = choose_parameters(n, p)
    t = make_truncation(k + 1, 3, k + 1)
    cmp = moment_identity_check(t, weights(params), Spine(0), k, branch_tails_exact(params, 3))
    assert cmp.verdict.separated


def test_anchor_gap_against_independent_logarithm():
    sep = refute_equality_at_k(choose_parameters(2, 2), 3)
    assert sep.verdict is Verdict.SEPARATED_BY
    with mpmath.workprec(200):
        ref = 64 * (2 * mpmath.log(2) - 1)
        lo = mpmath.mpf(sep.comparison.gap.lo.numerator) / sep.comparison.gap.lo.denominator
        hi = mpmath.mpf(sep.comparison.gap.hi.numerator) / sep.comparison.gap.hi.denominator
        assert lo <= ref <= hi
        assert hi - lo < mpmath.mpf(10) ** -20


def test_below_n_is_exactly_irrational():
    params = choose_parameters(4, 3)
    for k in (2, 3):
        sep = refute_equality_at_k(params, k)
        assert sep.verdict is Verdict.SEPARATED_EXACT
        assert not params.root_certificates[k - 2].is_perfect


def test_gamma_route_agrees():
    params = choose_parameters(3, 2)
    gamma = gamma_solve(params, 20)
    for k in (4, 5, 7):
        assert refute_via_gamma(params, gamma, k).verdict is refute_equality_at_k(params, k).verdict


def test_branch_moment_against_partial_sums():
    params = choose_parameters(3, 3)
    w = weights(params)
    for j in (0, 1, 2, 4):
        brute = sum((w.alpha_sq(k) * w.beta_sq(k) ** j).enclose(80).mid for k in range(1, 120))
        enc = to_enclosure(branch_moment(params, j), 80)
        assert abs(enc.mid - brute) < Fraction(1, 10 ** 20)


@given(st.sampled_from([(2, 2), (3, 2), (4, 3)]), st.integers(min_value=2, max_value=30),
       st.integers(min_value=0, max_value=5))
@settings(max_examples=30, deadline=None)
def test_tail_bound_dominates_exact_tail(np_, I, j):
    params = choose_parameters(*np_)
    try:
        bound = branch_tail_bound(params, I, j)
    except ValueError:
        return
    tail = branch_tails_exact(params, I)(j)
    if isinstance(tail, Radical) and tail.is_rational:
        assert tail.as_fraction() <= bound.bound
    else:
        # the majorant can coincide with the tail, so compare at a finer precision than the bound's
        assert to_enclosure(tail, 256).lo <= bound.bound
        assert to_enclosure(tail, 256).hi <= bound.bound * (1 + Fraction(1, 2 ** 120))
    assert str(I) in bound.formula


def test_gamma_limit_is_fixed_point_of_recurrence():
    for n in (3, 4, 5):
        params = choose_parameters(n, 2)
        gamma = gamma_solve(params, 400)
        limit = gamma_limit_exponents(params)
        far = gamma.exponents(399)
        assert max(abs(float(a - b)) for a, b in zip(far, limit)) < 1e-12


def test_certificate_fields():
    params = choose_parameters(3, 2)
    cert = verify_equality_at_n(params, gamma_solve(params, 10))
    assert cert.verdict is Verdict.EQUAL_EXACT
    assert cert.closed_form[0] == cert.closed_form[1] == str(params.s(2) ** 3)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
@pytest.mark.parametrize("p", [2, 3, 5])
def test_sweep_finds_equality_only_at_n(n, p):
    report = sweep(choose_parameters(n, p))
    assert report.ok
    assert report.equal_at == [n]


def test_low_precision_is_inconclusive_not_wrong():
    report = sweep(choose_parameters(2, 2), kmax=5, prec=16, terms=1)
    assert report.inconclusive
    assert report.equal_at == [2]


def test_partial_sum_sanity():
    assert partial_sum(-1, Fraction(1, 2), 2) == 1 + Fraction(1, 4)
