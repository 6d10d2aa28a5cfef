"""Bilateral weighted shifts ``W e_n = lambda_n e_{n+1}``.

``(W*W)**k = W*^k W^k`` holds iff ``lambda_n**k = lambda_n ... lambda_{n+k-1}``
for all ``n``, i.e. the log-weights solve the mean recurrence
``(k-1) a_n = a_{n+1} + ... + a_{n+k-1}``.  Bounded solutions are constant:
every root of ``r z**r - (z**(r-1) + ... + 1)`` other than 1 lies strictly
inside the unit disk, so the recurrence contracts backward and expands
forward.  This module certifies those roots, reconstructs orbits from them,
measures the contraction and classifies finite windows of weights.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

import mpmath
import numpy

from .enclosure import DEFAULT_PRECISION, ComplexBox, Enclosure, nth_root, round_down, round_up
from .poly import PolyZ, poly_gcd
from .scalars import Verdict

# -- weight windows -----------------------------------------------------------------


@dataclass(frozen=True)
class BilateralWindow:
    """Weights ``lambda_n`` for ``n = offset .. offset+len-1``.

    Either ``weights`` (exact positive rationals) or ``log_weights`` (exact
    rationals ``a_n`` with ``lambda_n = exp(a_n)``) is given; both may be.
    """

    offset: int
    weights: Optional[tuple[Fraction, ...]] = None
    log_weights: Optional[tuple[Fraction, ...]] = None

    def __post_init__(self):
        if self.weights is None and self.log_weights is None:
            raise ValueError("window needs weights or log-weights")
        if self.weights is not None and any(w <= 0 for w in self.weights):
            raise ValueError("weights must be positive")

    def __len__(self) -> int:
        return len(self.weights if self.weights is not None else self.log_weights)

    @property
    def indices(self) -> range:
        return range(self.offset, self.offset + len(self))

    @classmethod
    def from_rationals(cls, offset: int, values: Sequence) -> "BilateralWindow":
        return cls(offset, weights=tuple(Fraction(v) for v in values))

    @classmethod
    def from_logs(cls, offset: int, logs: Sequence) -> "BilateralWindow":
        return cls(offset, log_weights=tuple(Fraction(a) for a in logs))

    @classmethod
    def from_generator(cls, gen: Callable[[int], Fraction], N: int, log: bool = False) -> "BilateralWindow":
        vals = [gen(n) for n in range(-N, N + 1)]
        return cls.from_logs(-N, vals) if log else cls.from_rationals(-N, vals)

    def float_logs(self) -> list[float]:
        if self.log_weights is not None:
            return [float(a) for a in self.log_weights]
        return [math.log(w.numerator) - math.log(w.denominator) for w in self.weights]


def alternating_doubling(N: int) -> BilateralWindow:
    """``lambda_n = exp((-2)**n)`` on ``[-N, N]``: an unbounded solution for ``k = 3``."""
    return BilateralWindow.from_logs(-N, [Fraction(-2) ** n for n in range(-N, N + 1)])


def constant_window(N: int, value=3) -> BilateralWindow:
    return BilateralWindow.from_rationals(-N, [value] * (2 * N + 1))


def power_window(N: int, base=2) -> BilateralWindow:
    """``lambda_n = base**n`` on ``[-N, N]``."""
    return BilateralWindow.from_rationals(-N, [Fraction(base) ** n for n in range(-N, N + 1)])


PRESETS = {
    "doubling": alternating_doubling,
    "constant": constant_window,
    "power2": power_window,
}


def power_identity_check(win: BilateralWindow, k: int) -> list[tuple[int, Verdict]]:
    """Check ``lambda_n**k == lambda_n ... lambda_{n+k-1}`` at every index the window covers."""
    if k < 2:
        raise ValueError("k must be at least 2")
    if len(win) < k:
        raise ValueError(f"window of length {len(win)} too short for k={k}")
    out = []
    for t in range(len(win) - k + 1):
        if win.log_weights is not None:
            a = win.log_weights
            eq = k * a[t] == sum(a[t:t + k])
        else:
            w = win.weights
            prod = Fraction(1)
            for x in w[t:t + k]:
                prod *= x
            eq = w[t] ** k == prod
        out.append((win.offset + t, Verdict.EQUAL_EXACT if eq else Verdict.SEPARATED_EXACT))
    return out


def power_identity_holds(win: BilateralWindow, k: int) -> bool:
    return all(v is Verdict.EQUAL_EXACT for _, v in power_identity_check(win, k))


# -- characteristic roots --------------------------------------------------------------

Gauss = tuple[Fraction, Fraction]


def _cmul(a: Gauss, b: Gauss) -> Gauss:
    return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])


def _horner(poly: PolyZ, z: Gauss) -> Gauss:
    """Exact ``poly(z)``; dyadic ``z`` is handled in integers over a common ``2**s``."""
    d = z[0].denominator * z[1].denominator
    if d & (d - 1):
        acc = (Fraction(0), Fraction(0))
        for c in reversed(poly.coeffs):
            acc = _cmul(acc, z)
            acc = (acc[0] + c, acc[1])
        return acc
    s = max(z[0].denominator, z[1].denominator).bit_length() - 1
    a = z[0].numerator << (s - (z[0].denominator.bit_length() - 1))
    b = z[1].numerator << (s - (z[1].denominator.bit_length() - 1))
    # invariant: (re + i im) / 2**(s*j) is the partial Horner value after j steps
    re, im, j = 0, 0, 0
    for c in reversed(poly.coeffs):
        re, im = re * a - im * b, re * b + im * a
        re += c << (s * j)
        j += 1
    scale = Fraction(1, 1 << (s * (j - 1))) if j else Fraction(1)
    return (re * scale, im * scale)


def _abs_sq(z: Gauss) -> Fraction:
    return z[0] * z[0] + z[1] * z[1]


def _mpf_to_fraction(x, prec: int) -> Fraction:
    sign, man, exp, _ = mpmath.mpf(x)._mpf_
    if not man:
        return Fraction(0)
    val = Fraction(int(man)) * (Fraction(2) ** int(exp))
    return round_down(-val if sign else val, prec)


def char_poly(k: int) -> PolyZ:
    """``k z**k - (z**(k-1) + ... + 1)``."""
    if k < 1:
        raise ValueError("k must be positive")
    return PolyZ(tuple([-1] * k + [k]))


def shifted_char_poly(k: int) -> PolyZ:
    """``k z**(k+1) - (k+1) z**k + 1``."""
    coeffs = [0] * (k + 2)
    coeffs[0] = 1
    coeffs[k] = -(k + 1)
    coeffs[k + 1] = k
    return PolyZ(tuple(coeffs))


@dataclass(frozen=True)
class RootDisk:
    """Closed disk ``|z - center| <= radius`` containing exactly one root."""

    center: Gauss
    radius: Fraction

    @property
    def is_one(self) -> bool:
        return self.center == (Fraction(1), Fraction(0)) and self.radius == 0

    def box(self) -> ComplexBox:
        r = self.radius
        return ComplexBox(Enclosure(self.center[0] - r, self.center[0] + r),
                          Enclosure(self.center[1] - r, self.center[1] + r))

    def modulus(self, prec: int = DEFAULT_PRECISION) -> Enclosure:
        m = Enclosure.point(_abs_sq(self.center)).sqrt(prec + 8)
        return Enclosure(max(Fraction(0), m.lo - self.radius), m.hi + self.radius).rounded(prec)

    def strictly_inside_unit_disk(self) -> bool:
        r = self.radius
        return r < 1 and _abs_sq(self.center) < (1 - r) ** 2


class PrecisionError(ArithmeticError):
    """Root disks overlap or a pivot is not separated from zero; retry with more bits."""


@dataclass(frozen=True)
class CharSystem:
    k: int
    p_poly: PolyZ
    q_poly: PolyZ
    gcd: PolyZ
    roots: tuple[RootDisk, ...]
    max_modulus: Optional[Enclosure]
    precision: int

    @property
    def factor_identity(self) -> bool:
        return self.q_poly == PolyZ((-1, 1)) * self.p_poly

    @property
    def gcd_only_at_one(self) -> bool:
        return self.gcd == PolyZ((-1, 1)) ** self.gcd.degree

    @property
    def others(self) -> list[RootDisk]:
        return [r for r in self.roots if not r.is_one]

    @property
    def inside_unit_disk(self) -> bool:
        return all(r.strictly_inside_unit_disk() for r in self.others)

    @property
    def certified(self) -> bool:
        return self.factor_identity and self.gcd_only_at_one and self.inside_unit_disk


def _rational_roots(poly: PolyZ) -> list[Fraction]:
    """Rational roots of ``k z**k - ... - 1``: by the rational root theorem they are ``±1/d``, ``d | k``."""
    k = poly.leading
    out = []
    for d in range(1, abs(k) + 1):
        if k % d == 0:
            for r in (Fraction(1, d), Fraction(-1, d)):
                if poly(r) == 0:
                    out.append(r)
    return out


def _approx_roots(p: PolyZ, prec: int) -> list[Gauss]:
    """Root approximations: double-precision starts polished by Newton at ``prec + 32`` bits.

    Falls back to :func:`mpmath.polyroots` when polishing stalls or two
    polished roots coincide.
    """
    coeffs = list(reversed(p.coeffs))
    dp = p.derivative()
    dcoeffs = list(reversed(dp.coeffs))
    with mpmath.workprec(prec + 32):
        eps = mpmath.mpf(2) ** -(prec + 8)
        polished = []
        ok = True
        for z0 in numpy.roots([float(c) for c in coeffs]):
            z = mpmath.mpc(complex(z0))
            for _ in range(80):
                step = mpmath.polyval(coeffs, z) / mpmath.polyval(dcoeffs, z)
                z -= step
                if abs(step) <= eps * max(1, abs(z)):
                    break
            else:
                ok = False
                break
            polished.append(z)
        if ok:
            tol = mpmath.mpf(2) ** -(prec // 2)
            for i in range(len(polished)):
                if any(abs(polished[i] - polished[j]) < tol for j in range(i)):
                    ok = False
                    break
        if not ok:
            polished = mpmath.polyroots(coeffs, maxsteps=400, extraprec=2 * prec + 64)
        return [(_mpf_to_fraction(z.real, prec), _mpf_to_fraction(z.imag, prec)) for z in polished]


def char_system(k: int, prec: int = DEFAULT_PRECISION) -> CharSystem:
    """Isolate and certify all roots of ``k z**k - (z**(k-1) + ... + 1)``.

    Approximations are floating point (see :func:`_approx_roots`); certification is exact.
    Rational roots are snapped to their exact values.  For every other
    approximation ``z_i`` the disk of radius ``k |W_i|`` with Weierstrass
    correction ``W_i = p(z_i) / (lc * prod_{j != i} (z_i - z_j))`` is formed.
    The union of these disks contains all roots and a union of ``m`` disks
    disjoint from the rest holds exactly ``m`` roots, so pairwise disjoint
    disks each isolate one simple root.
    """
    p = char_poly(k)
    q = shifted_char_poly(k)
    g = poly_gcd(q, q.derivative())
    exact = _rational_roots(p)
    approx: list[Gauss] = [(r, Fraction(0)) for r in exact]
    if k > len(exact):
        candidates = _approx_roots(p, prec)
        # drop approximations of the rational roots already known exactly
        for r in exact:
            candidates.sort(key=lambda z: _abs_sq((z[0] - r, z[1])))
            candidates.pop(0)
        approx += candidates
    lc = p.leading
    disks = []
    for i, zi in enumerate(approx):
        val = _horner(p, zi)
        if val == (0, 0):
            disks.append(RootDisk(zi, Fraction(0)))
            continue
        den = Fraction(lc * lc)
        for j, zj in enumerate(approx):
            if j != i:
                den = round_down(den * _abs_sq((zi[0] - zj[0], zi[1] - zj[1])), prec + 16)
        if den == 0:
            raise PrecisionError(f"coincident root approximations for k={k}")
        w_sq = round_up(_abs_sq(val) / den, prec + 16)
        radius = round_up(k * nth_root(w_sq, 2, prec + 16).hi, prec)
        disks.append(RootDisk(zi, radius))
    for i in range(len(disks)):
        for j in range(i + 1, len(disks)):
            a, b = disks[i], disks[j]
            diff = (a.center[0] - b.center[0], a.center[1] - b.center[1])
            if _abs_sq(diff) <= (a.radius + b.radius) ** 2:
                raise PrecisionError(f"root disks {i} and {j} overlap for k={k}; raise precision")
    disks.sort(key=lambda d: (not d.is_one, -_abs_sq(d.center), d.center[1]))
    others = [d for d in disks if not d.is_one]
    maxmod = None
    if others:
        mods = [d.modulus(prec) for d in others]
        maxmod = Enclosure(max(m.lo for m in mods), max(m.hi for m in mods))
    return CharSystem(k, p, q, g, tuple(disks), maxmod, prec)


# -- Vandermonde reconstruction ----------------------------------------------------------


def vandermonde_solve(nodes: Sequence, b: Sequence, prec: int = DEFAULT_PRECISION) -> list[ComplexBox]:
    """Solve ``sum_j A_j z_j**row = b_row`` (rows ``0..k-1``) in interval arithmetic."""
    nodes = [n.box() if isinstance(n, RootDisk) else ComplexBox.coerce(n) for n in nodes]
    k = len(nodes)
    if len(b) != k:
        raise ValueError("need as many initial values as nodes")
    rows = [[(z ** r).rounded(prec) for z in nodes] + [ComplexBox.coerce(Fraction(b[r]))] for r in range(k)]
    for col in range(k):
        piv = max(range(col, k), key=lambda r: rows[r][col].abs_sq().mid)
        rows[col], rows[piv] = rows[piv], rows[col]
        pivot = rows[col][col]
        if pivot.abs_sq().contains_zero():
            raise PrecisionError("Vandermonde pivot not separated from zero")
        for r in range(col + 1, k):
            f = (rows[r][col] / pivot).rounded(prec)
            rows[r] = [(x - f * y).rounded(prec) for x, y in zip(rows[r], rows[col])]
    sol = [ComplexBox.point(0)] * k
    for r in reversed(range(k)):
        acc = rows[r][k]
        for c in range(r + 1, k):
            acc = acc - rows[r][c] * sol[c]
        sol[r] = (acc / rows[r][r]).rounded(prec)
    return sol


def reconstruct(coeffs: Sequence[ComplexBox], nodes: Sequence, n: int, prec: int = DEFAULT_PRECISION) -> ComplexBox:
    """``sum_j A_j z_j**n``."""
    nodes = [z.box() if isinstance(z, RootDisk) else ComplexBox.coerce(z) for z in nodes]
    out = ComplexBox.point(0)
    for a, z in zip(coeffs, nodes):
        out = out + a * (z ** n).rounded(prec)
    return out.rounded(prec)


def recurrence_orbit(k: int, initial: Sequence, length: int) -> list[Fraction]:
    """``k b_{n+k} = b_n + ... + b_{n+k-1}``, exact."""
    b = [Fraction(x) for x in initial]
    while len(b) < length:
        b.append(sum(b[-k:]) / k)
    return b[:length]


# -- contraction experiment ---------------------------------------------------------------


def _log_abs(x: Fraction) -> float:
    x = abs(x)
    return math.log(x.numerator) - math.log(x.denominator)


@dataclass
class ContractionReport:
    mean_order: int
    direction: str
    steps: int
    burn_in: int
    differences: list[Fraction] = field(repr=False)
    observed_ratio: Optional[float]
    certified_modulus: Optional[Enclosure]
    relative_error: Optional[float]
    within_envelope: Optional[bool]


def backward_contraction_experiment(mean_order: int, seed: Sequence, steps: int = 200,
                                    burn_in: int = 30, direction: str = "backward",
                                    prec: int = DEFAULT_PRECISION, window: int | None = None) -> ContractionReport:
    """Iterate ``r a_n = a_{n+1} + ... + a_{n+r}`` (``r = mean_order``) from ``seed`` and measure the decay.

    ``backward`` solves for decreasing ``n`` (each new term is the mean of the
    previous ``r``); ``forward`` solves for the far end and diverges.  The
    observed ratio is the exponential of the least-squares slope of
    ``log max_{i<window} |a_{t+i} - a_{t+i+1}|`` over ``t >= burn_in``; the
    sliding maximum absorbs oscillation from complex root pairs.
    """
    r = mean_order
    if r < 1:
        raise ValueError("mean_order must be positive")
    seq = [Fraction(x) for x in seed]
    if len(seq) != r:
        raise ValueError(f"seed must hold {r} values")
    total = steps + r + 1
    if direction == "backward":
        while len(seq) < total:
            seq.append(sum(seq[-r:]) / r)
    elif direction == "forward":
        while len(seq) < total:
            seq.append(r * seq[-r] - sum(seq[-(r - 1):]) if r > 1 else seq[-1])
    else:
        raise ValueError("direction is 'backward' or 'forward'")
    diffs = [seq[t] - seq[t + 1] for t in range(steps)]
    w = window or max(8, 2 * r + 2)
    cert = char_system(r, prec).max_modulus if r > 1 else None
    env = []
    for t in range(burn_in, steps - w + 1):
        m = max(abs(d) for d in diffs[t:t + w])
        if m == 0:
            env = []
            break
        env.append((t, _log_abs(m)))
    ratio = rel = inside = None
    if len(env) >= 2:
        ts = [t for t, _ in env]
        ys = [y for _, y in env]
        tbar, ybar = sum(ts) / len(ts), sum(ys) / len(ys)
        slope = sum((t - tbar) * (y - ybar) for t, y in env) / sum((t - tbar) ** 2 for t in ts)
        ratio = math.exp(slope)
        if cert is not None and direction == "backward":
            target = float(cert.mid)
            rel = abs(ratio - target) / target
            inside = ratio <= float(cert.hi) * 1.05
    return ContractionReport(r, direction, steps, burn_in, diffs, ratio, cert, rel, inside)


# -- classification -------------------------------------------------------------------------


class RigidityViolation(AssertionError):
    """Exact weights satisfied the identity, looked bounded and were not constant."""


@dataclass
class Classification:
    k: int
    power_identity: dict[int, bool]
    power_identity_holds: bool
    bounded: bool
    constant: bool
    growth: dict
    sup_log: float
    verdict: str

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "power_identity": self.power_identity_holds,
            "power_identity_by_k": {str(k): v for k, v in self.power_identity.items()},
            "bounded": self.bounded,
            "constant": self.constant,
            "growth": self.growth,
            "sup_log_weight": repr(self.sup_log),
            "verdict": self.verdict,
        }


GROWTH_FACTOR = 8.0


def _diff_growth(logs: Sequence[float]) -> float:
    """Ratio of the largest log-step in the outer halves (whichever side grows more)."""
    d = [abs(b - a) for a, b in zip(logs, logs[1:])]
    half = len(d) // 2
    left, right = max(d[:half], default=0.0), max(d[half:], default=0.0)
    if left == right:
        return 1.0
    if min(left, right) == 0:
        return math.inf
    return max(left, right) / min(left, right)


def _forced_extension_growth(win: BilateralWindow, k: int, steps: int) -> float:
    """Extend the log-weights forward with the identity at ``k``; return the growth of the log-steps."""
    a = win.float_logs()
    n0 = len(a)
    for _ in range(steps):
        a.append((k - 1) * a[-(k - 1)] - sum(a[-(k - 2):]) if k > 2 else a[-1])
    d = [abs(y - x) for x, y in zip(a, a[1:])]
    base = max(d[:n0 - 1])
    if base == 0:
        return 1.0
    return max(d[n0 - 1:]) / base


def classify_shift(win: BilateralWindow, k: int, exact_inputs: bool = True) -> Classification:
    """Classify a window of weights against the identity at ``k``.

    Boundedness of an infinite sequence cannot be read off a window, so it is
    reported as evidence: growth of the log-steps across the window, and, when
    the identity holds, growth of the forced forward extension.
    """
    if len(win) < 2 * k:
        raise ValueError("window must hold at least 2k weights")
    per_k = {j: power_identity_holds(win, j) for j in range(2, k + 1)}
    holds = per_k[k]
    logs = win.float_logs()
    if win.log_weights is not None:
        constant = len(set(win.log_weights)) == 1
    else:
        constant = len(set(win.weights)) == 1
    growth = {"window_step_ratio": _diff_growth(logs)}
    unbounded = growth["window_step_ratio"] > GROWTH_FACTOR
    if holds and not constant:
        ext = _forced_extension_growth(win, k, 8 * k)
        growth["extension_step_ratio"] = ext
        unbounded = unbounded or ext > GROWTH_FACTOR
    growth = {key: (repr(v) if math.isfinite(v) else "inf") for key, v in growth.items()}
    bounded = not unbounded
    if holds and constant:
        verdict = "quasinormal (multiple of a unitary)"
    elif holds and not bounded:
        verdict = "rigidity inapplicable: unbounded weights"
    elif holds:
        verdict = "bounded non-constant solution"
        if exact_inputs:
            raise RigidityViolation(f"window satisfies the identity at k={k}, looks bounded, and is not constant")
    else:
        verdict = f"identity fails at k={k}"
    return Classification(k, per_k, holds, bounded, constant, growth,
                          max(abs(x) for x in logs), verdict)
