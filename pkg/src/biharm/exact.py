"""Exact rational arithmetic, integer polynomials, Sturm counting and bisection.

Rationals are :class:`fractions.Fraction` (always reduced, positive
denominator).  Polynomials carry integer coefficients, lowest degree first.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from numbers import Rational
from typing import Callable, Iterable, Sequence

ExactRational = Fraction

#: exact inward shrink applied to a Sturm interval whose endpoint is a root
NUDGE_DENOMINATOR = 2**16
MAX_NUDGES = 8


class EndpointRootError(ValueError):
    """An interval endpoint stayed a root after all nudge attempts."""


class BracketError(ValueError):
    """A bracket does not carry a sign change, or the tolerance is invalid."""


def as_exact(x) -> Fraction:
    """Convert ints, Fractions, decimal strings or floats to a Fraction.

    Floats convert exactly (binary value), strings like ``"4/3"`` or
    ``"1.335"`` are parsed as written.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    return Fraction(float(x))


def sign(x) -> int:
    return (x > 0) - (x < 0)


def _lcm(a: int, b: int) -> int:
    return a // gcd(a, b) * b


@dataclass(frozen=True)
class IntPolynomial:
    """Polynomial with integer coefficients; ``coeffs[k]`` multiplies x**k."""

    coeffs: tuple[int, ...]

    def __init__(self, coeffs: Iterable[int]):
        cs = [int(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    @classmethod
    def from_descending(cls, coeffs: Sequence[int]) -> "IntPolynomial":
        return cls(reversed(list(coeffs)))

    @classmethod
    def from_rational(cls, coeffs: Sequence[Fraction]) -> "IntPolynomial":
        """Clear denominators of a rational coefficient list with a positive factor."""
        den = 1
        for c in coeffs:
            den = _lcm(den, Fraction(c).denominator)
        return cls(int(Fraction(c) * den) for c in coeffs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def leading(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def descending(self) -> tuple[int, ...]:
        return tuple(reversed(self.coeffs))

    def __call__(self, x):
        return poly_eval(self, x)

    def derivative(self) -> "IntPolynomial":
        return IntPolynomial(k * c for k, c in enumerate(self.coeffs) if k)

    def content(self) -> int:
        g = 0
        for c in self.coeffs:
            g = gcd(g, c)
        return g

    def primitive(self) -> "IntPolynomial":
        """Divide by the (positive) content; sign of the leading term is kept."""
        g = self.content()
        if g <= 1:
            return self
        return IntPolynomial(c // g for c in self.coeffs)

    def __neg__(self) -> "IntPolynomial":
        return IntPolynomial(-c for c in self.coeffs)

    def __add__(self, other: "IntPolynomial") -> "IntPolynomial":
        a, b = self.coeffs, other.coeffs
        size = max(len(a), len(b))
        return IntPolynomial(
            (a[k] if k < len(a) else 0) + (b[k] if k < len(b) else 0) for k in range(size)
        )

    def __sub__(self, other: "IntPolynomial") -> "IntPolynomial":
        return self + (-other)

    def __mul__(self, other) -> "IntPolynomial":
        if isinstance(other, int):
            return IntPolynomial(c * other for c in self.coeffs)
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return IntPolynomial(())
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            for j, y in enumerate(b):
                out[i + j] += x * y
        return IntPolynomial(out)

    __rmul__ = __mul__

    def __str__(self) -> str:
        terms = []
        for k in range(self.degree, -1, -1):
            c = self.coeffs[k]
            if c:
                terms.append(f"{c}" + ("" if k == 0 else "*x" if k == 1 else f"*x^{k}"))
        return " + ".join(terms).replace("+ -", "- ") or "0"


def poly_eval(poly: IntPolynomial, x) -> Fraction:
    """Horner evaluation; exact for rational ``x``."""
    x = as_exact(x)
    acc = Fraction(0)
    for c in reversed(poly.coeffs):
        acc = acc * x + c
    return acc


# -- rational coefficient helpers (lowest degree first) ---------------------

def _trim(cs: list[Fraction]) -> list[Fraction]:
    while cs and cs[-1] == 0:
        cs.pop()
    return cs


def _rem(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    a = list(a)
    db, lb = len(b) - 1, b[-1]
    while len(a) - 1 >= db and a:
        shift = len(a) - 1 - db
        q = a[-1] / lb
        for k, c in enumerate(b):
            a[k + shift] -= q * c
        a.pop()
        _trim(a)
    return a


def sturm_sequence(poly: IntPolynomial) -> list[IntPolynomial]:
    """Sturm chain p, p', -rem(p, p'), ... stored as primitive integer polynomials.

    Every element is rescaled by a positive factor only, so the sign
    variations of the chain are unchanged.
    """
    if poly.is_zero():
        raise ValueError("Sturm sequence of the zero polynomial")
    chain = [poly.primitive(), poly.derivative().primitive()]
    while not chain[-1].is_zero() and chain[-1].degree > 0:
        r = _rem([Fraction(c) for c in chain[-2].coeffs], [Fraction(c) for c in chain[-1].coeffs])
        if not r:
            break
        chain.append((-IntPolynomial.from_rational(r)).primitive())
    return [p for p in chain if not p.is_zero()]


def _variations(values: Iterable) -> int:
    count, last = 0, 0
    for v in values:
        s = sign(v)
        if s == 0:
            continue
        if last and s != last:
            count += 1
        last = s
    return count


def sturm_count(poly: IntPolynomial, low, high) -> int:
    """Number of distinct real roots of ``poly`` in the open interval (low, high).

    An endpoint that is itself a root is moved inward by (high-low)/2**16,
    at most ``MAX_NUDGES`` times per endpoint.
    """
    low, high = as_exact(low), as_exact(high)
    if not low < high:
        raise ValueError(f"empty interval ({low}, {high})")
    if poly.is_zero():
        raise ValueError("polynomial is identically zero")
    step = (high - low) / NUDGE_DENOMINATOR
    for _ in range(MAX_NUDGES):
        if poly_eval(poly, low) != 0:
            break
        low += step
    else:
        raise EndpointRootError(f"lower endpoint stays a root near {low}")
    for _ in range(MAX_NUDGES):
        if poly_eval(poly, high) != 0:
            break
        high -= step
    else:
        raise EndpointRootError(f"upper endpoint stays a root near {high}")
    chain = sturm_sequence(poly)
    return _variations(poly_eval(p, low) for p in chain) - _variations(
        poly_eval(p, high) for p in chain
    )


def grid_sign_changes(f: Callable, low, high, points: int) -> int:
    """Count sign changes of ``f`` over ``points`` equispaced exact nodes on [low, high].

    Zeros are skipped, so a simple root sitting on a node still counts once.
    """
    low, high = as_exact(low), as_exact(high)
    h = (high - low) / (points - 1)
    return _variations(f(low + k * h) for k in range(points))


def interpolate(nodes: Sequence[Fraction], values: Sequence[Fraction]) -> list[Fraction]:
    """Exact monomial coefficients (lowest first) of the interpolating polynomial."""
    nodes = [as_exact(x) for x in nodes]
    coef = [as_exact(v) for v in values]
    m = len(nodes)
    # Newton divided differences, then expand the Newton form
    for j in range(1, m):
        for i in range(m - 1, j - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) / (nodes[i] - nodes[i - j])
    out = [Fraction(0)] * m
    for i in range(m - 1, -1, -1):
        # out = out * (x - nodes[i]) + coef[i]
        shifted = [Fraction(0)] + out[:-1]
        out = [s - nodes[i] * o for s, o in zip(shifted, out)]
        out[0] += coef[i]
    return _trim(out)


@dataclass(frozen=True)
class RootBracket:
    low: Fraction
    high: Fraction
    sign_low: int
    sign_high: int

    def __post_init__(self):
        if not self.low < self.high:
            raise BracketError(f"bracket endpoints out of order: {self.low} >= {self.high}")
        if self.sign_low * self.sign_high != -1:
            raise BracketError("bracket signs must be nonzero and differ")

    @property
    def width(self) -> Fraction:
        return self.high - self.low

    @property
    def midpoint(self) -> Fraction:
        return (self.low + self.high) / 2

    def contains(self, x) -> bool:
        return self.low <= as_exact(x) <= self.high

    @classmethod
    def from_function(cls, f: Callable, low, high) -> "RootBracket":
        low, high = as_exact(low), as_exact(high)
        return cls(low, high, sign(f(low)), sign(f(high)))


def isolate_root(f: Callable, bracket: RootBracket, tol) -> RootBracket:
    """Bisect ``bracket`` with exact midpoints until its width is at most ``tol``.

    ``f`` only needs to return something whose sign is meaningful; it is
    called with Fractions.  An exact zero at a midpoint is enclosed by a
    symmetric sub-bracket of quarter width, halved until its ends differ
    in sign.
    """
    if not tol > 0:
        raise BracketError(f"tolerance must be positive, got {tol}")
    lo, hi, s_lo = bracket.low, bracket.high, bracket.sign_low
    if s_lo * bracket.sign_high != -1:
        raise BracketError("input bracket signs do not differ")
    while hi - lo > tol:
        mid = (lo + hi) / 2
        s_mid = sign(f(mid))
        if s_mid == 0:
            w = (hi - lo) / 4
            for _ in range(64):
                a, b = sign(f(mid - w)), sign(f(mid + w))
                if a * b == -1:
                    lo, hi, s_lo = mid - w, mid + w, a
                    break
                w /= 2
            else:
                raise BracketError(f"cannot enclose the exact zero at {mid}")
            if hi - lo <= tol:
                break
            continue
        if s_mid == s_lo:
            lo = mid
        else:
            hi = mid
    return RootBracket(lo, hi, s_lo, -s_lo)
