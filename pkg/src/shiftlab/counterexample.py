"""Explicit weighted shifts on the tree satisfying the moment identity at exactly one exponent.

For ``n >= 2`` and a prime ``p`` put ``q = 1/p``,
``c0 = m_{n-1}(q) / (1-q)**(n-1)`` and ``c = c0 * S_{n-1}(q)**(n-1)``.  The
weights are

    alpha_k**2 = k**(n-1) q**(k-1),   beta_k**2 = c**(1/(n-1)) / k,

and the spine weights ``gamma_j`` solve a triangular system for
``j < n-1`` followed by the geometric-mean recurrence
``gamma_{j+n-1}**(n-1) = gamma_{j+n-2} ... gamma_j``.  Every ``gamma_j`` is a
monomial in ``c, S_1(q), ..., S_{n-1}(q)`` with rational exponents, so the
whole construction is handled by exponent-vector arithmetic.

Moment identity at exponent ``k``, branching vertex:
``S_{n-1}(q)**k == c**((k-1)/(n-1)) * S_{n-k}(q)``.  It holds for ``k = n``.
For ``k < n`` the right side is irrational (perfect-power certificate).
For ``k > n`` it involves ``S_{-m}(q)``, which is transcendental; here the
two sides are separated numerically, so failure is certified only on the
swept range of ``k``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .enclosure import DEFAULT_PRECISION, Enclosure, round_up
from .radical import (MonomialScalar, PerfectPowerCertificate, Radical, is_prime,
                      perfect_power_test)
from .scalars import Comparison, Value, Verdict, compare, to_enclosure
from .series import m_poly, partial_sum, s_neg, s_nonneg, terms_for_tail
from .shift import TreeWeights, value_max


class NonPrimeError(ValueError):
    pass


class RationalRootError(ValueError):
    """``c**(k/(n-1))`` turned out rational for some ``1 <= k <= n-2``."""

    def __init__(self, p: int, k: int):
        super().__init__(f"p={p} rejected: c^({k}/(n-1)) is rational")
        self.p = p
        self.k = k


class CertificateError(AssertionError):
    def __init__(self, check: str, index: int):
        super().__init__(f"certificate check {check!r} failed at index {index}")
        self.check = check
        self.index = index


@dataclass(frozen=True)
class CounterexampleParams:
    n: int
    p: int
    q: Fraction
    c0: Fraction
    c: Fraction
    # (c, S_1(q), ..., S_{n-1}(q))
    basis: tuple[Fraction, ...]
    # entry k-1 certifies that c**(k/(n-1)) is irrational, k = 1..n-2
    root_certificates: tuple[PerfectPowerCertificate, ...] = field(repr=False)

    def s(self, k: int) -> Fraction:
        return s_nonneg(k, self.q)

    @property
    def dim(self) -> int:
        return self.n


def choose_parameters(n: int, p: int) -> CounterexampleParams:
    if not isinstance(n, int) or n < 2:
        raise ValueError("n must be an integer >= 2")
    if not is_prime(p):
        raise NonPrimeError(f"p={p} is not prime")
    q = Fraction(1, p)
    c0 = m_poly(n - 1)(q) / (1 - q) ** (n - 1)
    s_top = s_nonneg(n - 1, q)
    c = c0 * s_top ** (n - 1)
    if s_top ** n != c * s_nonneg(0, q):
        raise CertificateError("moment-closed-form", n)
    certs = []
    for k in range(1, n - 1):
        cert = perfect_power_test(c, k, n - 1)
        if cert.is_perfect:
            raise RationalRootError(p, k)
        certs.append(cert)
    basis = (c,) + tuple(s_nonneg(i, q) for i in range(1, n))
    return CounterexampleParams(n, p, q, c0, c, basis, tuple(certs))


# -- spine weights -----------------------------------------------------------

Exps = tuple[Fraction, ...]


def _initial_exponents(params: CounterexampleParams) -> list[Exps]:
    """Solve ``gamma_j**(2(n-1)) = (gamma_{j-1} ... gamma_0)**2 * c**((n-j-2)/(n-1)) * S_{j+1}``.

    Solved for ``j = 0, 1, ..., n-2`` in that order; each step only uses the
    already-known exponents.
    """
    n = params.n
    out: list[Exps] = []
    for j in range(n - 1):
        acc = [Fraction(0)] * n
        for e in out:
            for i in range(n):
                acc[i] += 2 * e[i]
        acc[0] += Fraction(n - j - 2, n - 1)
        acc[j + 1] += 1
        out.append(tuple(a / (2 * (n - 1)) for a in acc))
    return out


class GammaSequence:
    """Spine weights ``gamma_0, gamma_1, ...`` as exponent vectors over the parameter basis.

    Terms past the solved prefix are produced on demand by the mean
    recurrence, so indexing is unbounded.
    """

    def __init__(self, params: CounterexampleParams, exponents: list[Exps]):
        self.params = params
        self._exps = list(exponents)

    def __len__(self) -> int:
        return len(self._exps)

    def exponents(self, j: int) -> Exps:
        n = self.params.n
        while len(self._exps) <= j:
            window = self._exps[-(n - 1):]
            self._exps.append(tuple(sum(col) / (n - 1) for col in zip(*window)))
        return self._exps[j]

    def value(self, j: int) -> MonomialScalar:
        return MonomialScalar(self.params.basis, self.exponents(j))

    def radical(self, j: int) -> Radical:
        return self.value(j).to_radical()

    def squared(self, j: int) -> Radical:
        return (self.value(j) ** 2).to_radical()

    def enclosure(self, j: int, prec: int = DEFAULT_PRECISION) -> Enclosure:
        return self.radical(j).enclose(prec)

    @property
    def values(self) -> list[MonomialScalar]:
        return [self.value(j) for j in range(len(self._exps))]

    def window(self, prec: int = DEFAULT_PRECISION) -> tuple[Enclosure, Enclosure]:
        """Enclosures of the min and max of the first ``n-1`` terms."""
        encs = [self.enclosure(j, prec) for j in range(self.params.n - 1)]
        return (Enclosure(min(e.lo for e in encs), min(e.hi for e in encs)),
                Enclosure(max(e.lo for e in encs), max(e.hi for e in encs)))

    def sup_squared(self, prec: int = DEFAULT_PRECISION) -> Value:
        """``sup_j gamma_j**2``: the recurrence keeps every term in the initial hull."""
        return value_max([self.squared(j) for j in range(self.params.n - 1)], prec)


def gamma_solve(params: CounterexampleParams, count: int) -> GammaSequence:
    if count < params.n - 1:
        raise ValueError("count must be at least n-1")
    seq = GammaSequence(params, _initial_exponents(params))
    seq.exponents(count - 1)
    return seq


def gamma_limit_exponents(params: CounterexampleParams) -> Exps:
    """Limit of the exponent vectors under the mean recurrence.

    With window length ``r = n-1`` the functional ``sum_i (i+1) x_{t+i}`` is
    invariant, so the limit is ``2 sum_i (i+1) x_i / (r(r+1))``.
    """
    r = params.n - 1
    init = _initial_exponents(params)
    return tuple(
        Fraction(2, r * (r + 1)) * sum((i + 1) * init[i][col] for i in range(r))
        for col in range(params.n)
    )


# -- weights and branch tails ---------------------------------------------------

def weights(params: CounterexampleParams, gamma: Optional[GammaSequence] = None,
            prec: int = DEFAULT_PRECISION) -> TreeWeights:
    n, q = params.n, params.q
    if gamma is None:
        gamma = gamma_solve(params, n - 1)
    c_root = Radical.power_of(params.c, Fraction(1, n - 1))

    def alpha_sq(k: int) -> Radical:
        return Radical(Fraction(k) ** (n - 1) * q ** (k - 1))

    def beta_sq(k: int) -> Radical:
        return c_root / k

    return TreeWeights(alpha_sq, beta_sq, gamma.squared,
                       beta_sup_sq=beta_sq(1), gamma_sup_sq=gamma.sup_squared(prec))


def branch_moment(params: CounterexampleParams, j: int, terms: int | None = None,
                  prec: int = DEFAULT_PRECISION) -> Value:
    """``sum_{k>=1} alpha_k**2 beta_k**(2j) = c**(j/(n-1)) S_{n-1-j}(q)``."""
    n = params.n
    scale = Radical.power_of(params.c, Fraction(j, n - 1))
    idx = n - 1 - j
    if idx >= 0:
        return scale * params.s(idx)
    if terms is None:
        terms = terms_for_tail(params.q, 3 * prec // 4)
    return (scale.enclose(prec + 8) * s_neg(-idx, params.q, terms, prec + 8)).rounded(prec)


def branch_tails_exact(params: CounterexampleParams, I: int, prec: int = DEFAULT_PRECISION):
    """Tails ``j -> sum_{k>I} alpha_k**2 beta_k**(2j)`` from the closed forms.

    Exact when ``n-1-j >= 0``; otherwise the enclosure
    ``[first term, first term / (1-q)]`` scaled by ``c**(j/(n-1))``.
    """
    n, q = params.n, params.q

    def tail(j: int) -> Value:
        scale = Radical.power_of(params.c, Fraction(j, n - 1))
        idx = n - 1 - j
        if idx >= 0:
            return scale * (params.s(idx) - partial_sum(idx, q, I))
        first = Fraction(I + 1) ** idx * q ** I
        return (scale.enclose(prec + 8) * Enclosure(first, first / (1 - q))).rounded(prec)

    return tail


@dataclass(frozen=True)
class TailBound:
    j: int
    bound: Fraction
    formula: str


def branch_tail_bound(params: CounterexampleParams, I: int, j: int,
                      prec: int = DEFAULT_PRECISION) -> TailBound:
    """Geometric majorant for ``sum_{k>I} k**a q**(k-1)`` times ``c**(j/(n-1))``, ``a = n-1-j``.

    Consecutive term ratios are at most ``rho = q * max(1, ((I+2)/(I+1))**a)``,
    so the tail is at most ``(I+1)**a q**I / (1 - rho)``.
    """
    n, q = params.n, params.q
    a = n - 1 - j
    rho = q * max(Fraction(1), Fraction(I + 2, I + 1) ** a)
    if rho >= 1:
        raise ValueError(f"branch count I={I} too small for a geometric tail bound")
    geo = Fraction(I + 1) ** a * q ** I / (1 - rho)
    scale = Radical.power_of(params.c, Fraction(j, n - 1)).enclose(prec).hi
    return TailBound(j, round_up(scale * geo, prec),
                     f"c^({j}/{n - 1}) * ({I}+1)^({a}) * q^{I} / (1 - q*max(1, (({I}+2)/({I}+1))^({a})))")


# -- certificates ----------------------------------------------------------------

@dataclass(frozen=True)
class Certificate:
    n: int
    p: int
    recurrence_checked: int
    initial_checked: int
    moment_terms_checked: int
    closed_form: tuple[str, str]
    verdict: Verdict


def verify_equality_at_n(params: CounterexampleParams, gamma: GammaSequence,
                         moment_terms: int = 12) -> Certificate:
    """Exact certificate that the moment identity holds at exponent ``n``.

    1. every computed ``gamma`` satisfies the mean recurrence (exponent vectors);
    2. the first ``n-1`` gammas satisfy the vertex conditions ``-1 .. -(n-1)``
       with the branch sums replaced by their closed forms, checked both on
       exponent vectors and on canonical radicals; the closed forms are
       themselves checked termwise;
    3. ``S_{n-1}(q)**n == c * S_0(q)``.
    """
    n = params.n
    basis = params.basis
    count = len(gamma)
    # (1) mean recurrence
    for k in range(0, count - n + 1):
        lhs = tuple((n - 1) * e for e in gamma.exponents(k + n - 1))
        rhs = tuple(sum(col) for col in zip(*(gamma.exponents(l) for l in range(k, k + n - 1))))
        if lhs != rhs:
            raise CertificateError("mean-recurrence", k)
    # closed forms of the branch sums, termwise
    c_root = Radical.power_of(params.c, Fraction(1, n - 1))
    for i in range(1, n):
        scale = Radical.power_of(params.c, Fraction(i - 1, n - 1))
        for k in range(1, moment_terms + 1):
            term = Radical(Fraction(k) ** (n - 1) * params.q ** (k - 1)) * (c_root / k) ** (i - 1)
            if term != scale * Radical(Fraction(k) ** (n - i) * params.q ** (k - 1)):
                raise CertificateError("branch-moment-termwise", i)
    # (2) vertex conditions at -(n-i), i = 1..n-1
    for i in range(1, n):
        j = n - i - 1
        lhs = MonomialScalar(basis, gamma.exponents(j)) ** (2 * n)
        rhs = MonomialScalar.one(basis)
        for l in range(j + 1):
            rhs = rhs * MonomialScalar(basis, gamma.exponents(l)) ** 2
        rhs = rhs * MonomialScalar.unit(basis, 0, Fraction(i - 1, n - 1)) \
            * MonomialScalar.unit(basis, n - i)
        if lhs != rhs or lhs.to_radical() != rhs.to_radical():
            raise CertificateError("initial-conditions", i)
    # (3) branching vertex
    lhs = params.s(n - 1) ** n
    rhs = params.c * params.s(0)
    if lhs != rhs:
        raise CertificateError("branching-vertex", n)
    return Certificate(n, params.p, count - n + 1, n - 1, moment_terms,
                       (str(lhs), str(rhs)), Verdict.EQUAL_EXACT)


@dataclass(frozen=True)
class Separation:
    k: int
    route: str
    comparison: Comparison
    terms: int | None
    precision: int

    @property
    def verdict(self) -> Verdict:
        return self.comparison.verdict


def moment_sides(params: CounterexampleParams, k: int, terms: int | None = None,
                 prec: int = DEFAULT_PRECISION) -> tuple[Value, Value]:
    """``(S_{n-1}(q)**k, c**((k-1)/(n-1)) S_{n-k}(q))``."""
    lhs = Radical(params.s(params.n - 1) ** k)
    return lhs, branch_moment(params, k - 1, terms, prec)


def refute_equality_at_k(params: CounterexampleParams, k: int, prec: int = DEFAULT_PRECISION,
                         terms: int | None = None) -> Separation:
    n = params.n
    if k == n:
        raise ValueError("k == n is the equality case")
    if k < 2:
        raise ValueError("k must be at least 2")
    if k > n and terms is None:
        terms = terms_for_tail(params.q, 3 * prec // 4)
    lhs, rhs = moment_sides(params, k, terms, prec)
    cmp = compare(lhs, rhs, prec)
    if k < n:
        cert = params.root_certificates[k - 2]
        if cert.is_perfect or cmp.verdict is not Verdict.SEPARATED_EXACT:
            raise CertificateError("irrational-branch-moment", k)
        return Separation(k, "exact-irrationality", cmp, None, prec)
    return Separation(k, "enclosure", cmp, terms, prec)


def refute_via_gamma(params: CounterexampleParams, gamma: GammaSequence, k: int,
                     prec: int = DEFAULT_PRECISION, terms: int | None = None) -> Separation:
    """Cross-check for ``k > n`` at spine vertex ``-(k-n-1)``.

    There the identity reads
    ``gamma_{k-n-2}**(2k) == (gamma_{k-n-2} ... gamma_0)**2 * c**(n/(n-1)) * S_{-1}(q)``
    (for ``k = n+1`` the vertex is the branching vertex itself).
    """
    n = params.n
    if k <= n:
        raise ValueError("gamma route applies to k > n")
    if terms is None:
        terms = terms_for_tail(params.q, 3 * prec // 4)
    if k == n + 1:
        lhs, rhs = moment_sides(params, k, terms, prec)
        return Separation(k, "gamma-vertex-0", compare(lhs, rhs, prec), terms, prec)
    top = k - n - 2
    lhs = gamma.radical(top) ** (2 * k)
    pref = Radical(Fraction(1))
    for l in range(top + 1):
        pref = pref * gamma.squared(l)
    rhs = (pref.enclose(prec + 8) * to_enclosure(branch_moment(params, n, terms, prec + 8), prec + 8)).rounded(prec)
    return Separation(k, f"gamma-vertex-{-(top + 1)}", compare(lhs, rhs, prec), terms, prec)


@dataclass
class SweepRow:
    k: int
    verdict: Verdict
    route: str
    comparison: Optional[Comparison]
    cross_check: Optional[Verdict] = None

    def to_dict(self) -> dict:
        d = {"k": self.k, "verdict": self.verdict.value, "route": self.route}
        if self.comparison is not None:
            d.update({key: val for key, val in self.comparison.to_dict().items() if key != "verdict"})
        if self.cross_check is not None:
            d["cross_check"] = self.cross_check.value
        return d


@dataclass
class SweepReport:
    n: int
    p: int
    kmax: int
    precision: int
    terms: Optional[int]
    rows: list[SweepRow]
    certificate: Certificate

    @property
    def inconclusive(self) -> list[int]:
        return [r.k for r in self.rows
                if r.verdict is Verdict.INCONCLUSIVE or r.cross_check is Verdict.INCONCLUSIVE]

    @property
    def equal_at(self) -> list[int]:
        return [r.k for r in self.rows if r.verdict.equal]

    @property
    def ok(self) -> bool:
        return not self.inconclusive and self.equal_at == [self.n]


class CrossCheckError(AssertionError):
    pass


def sweep(params: CounterexampleParams, kmax: int | None = None, prec: int = DEFAULT_PRECISION,
          terms: int | None = None, gamma: Optional[GammaSequence] = None) -> SweepReport:
    n = params.n
    if kmax is None:
        kmax = n + 6
    if kmax < n + 1:
        raise ValueError("kmax must be at least n+1")
    if gamma is None:
        gamma = gamma_solve(params, max(kmax, 2 * n))
    cert = verify_equality_at_n(params, gamma)
    rows = []
    for k in range(2, kmax + 1):
        if k == n:
            lhs, rhs = moment_sides(params, k)
            rows.append(SweepRow(k, cert.verdict, "exact-identity", compare(lhs, rhs, prec)))
            continue
        sep = refute_equality_at_k(params, k, prec, terms)
        row = SweepRow(k, sep.verdict, sep.route, sep.comparison)
        if k > n:
            cross = refute_via_gamma(params, gamma, k, prec, terms)
            row.cross_check = cross.verdict
            if cross.verdict.equal != sep.verdict.equal and Verdict.INCONCLUSIVE not in (cross.verdict, sep.verdict):
                raise CrossCheckError(f"k={k}: routes disagree ({sep.verdict.value} vs {cross.verdict.value})")
        rows.append(row)
    t = terms if terms is not None else terms_for_tail(params.q, 3 * prec // 4)
    return SweepReport(n, params.p, kmax, prec, t, rows, cert)
