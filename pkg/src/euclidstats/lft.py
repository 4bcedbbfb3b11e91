"""Integer linear fractional transformations h(x) = (a*x + b)/(c*x + d).

These are the inverse branches of the Euclidean interval maps and their
compositions.  All arithmetic is exact; coefficients are kept coprime with
a canonical sign (denominator positive at 0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .core import Digit, InvalidDigitError, get_algorithm


class PoleError(ZeroDivisionError):
    """Evaluation at a pole of the transformation."""


def _gcd4(a: int, b: int, c: int, d: int) -> int:
    return math.gcd(math.gcd(abs(a), abs(b)), math.gcd(abs(c), abs(d)))


@dataclass(frozen=True)
class Lft:
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self) -> None:
        if self.a * self.d - self.b * self.c == 0:
            raise ValueError("degenerate transformation (zero determinant)")
        g = _gcd4(self.a, self.b, self.c, self.d)
        sign = 1
        if self.d < 0 or (self.d == 0 and self.c < 0):
            sign = -1
        if g != sign:
            object.__setattr__(self, "a", self.a * sign // g)
            object.__setattr__(self, "b", self.b * sign // g)
            object.__setattr__(self, "c", self.c * sign // g)
            object.__setattr__(self, "d", self.d * sign // g)

    @staticmethod
    def identity() -> "Lft":
        return Lft(1, 0, 0, 1)

    @property
    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    def compose(self, other: "Lft") -> "Lft":
        """Composition self o other, by 2x2 integer matrix product."""
        return Lft(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def __call__(self, x):
        den = self.c * x + self.d
        if den == 0:
            raise PoleError(f"pole of {self} at x = {x}")
        return (self.a * x + self.b) / den

    def denom_at(self, x):
        """D[h](x) = |c*x + d|."""
        return abs(self.c * x + self.d)

    def deriv_abs(self, x):
        """|h'(x)| = |det| / (c*x + d)^2."""
        den = self.c * x + self.d
        if den == 0:
            raise PoleError(f"pole of {self} at x = {x}")
        if isinstance(x, Fraction) or isinstance(x, int):
            return Fraction(abs(self.det), 1) / (Fraction(den) ** 2)
        return abs(self.det) / float(den) ** 2

    def mirror(self) -> "Lft":
        """Swap b and c: reverses the digit order of a composed branch."""
        return Lft(self.a, self.c, self.b, self.d)

    def __repr__(self) -> str:
        return f"Lft({self.a}, {self.b}, {self.c}, {self.d})"


def digit_to_lft(algo, digit: Digit) -> Lft:
    """Inverse branch h(x) = 1/(m + eps*x) of a single digit."""
    a = get_algorithm(algo)
    m, eps = digit
    if not a.digit_ok(m, eps):
        raise InvalidDigitError(f"{a.id}: digit ({m}, {eps:+d}) violates the digit condition")
    return Lft(0, 1, eps, m)


def lft_delta(h: Lft, k: Lft, interval: tuple[Fraction, Fraction]) -> Fraction:
    """Branch distance inf over the interval of |c1*d2 - c2*d1| / |q(x)|,
    with q(x) = (c1*x + d1)(c2*x + d2).

    Exact: q is a quadratic, so max|q| over [lo, hi] is attained at an
    endpoint or at the vertex, all rational points.
    """
    lo, hi = Fraction(interval[0]), Fraction(interval[1])
    num = abs(h.c * k.d - k.c * h.d)
    if num == 0:
        return Fraction(0)

    def q(x: Fraction) -> Fraction:
        return abs((h.c * x + h.d) * (k.c * x + k.d))

    candidates = [q(lo), q(hi)]
    cc = h.c * k.c
    if cc != 0:
        vertex = Fraction(-(h.c * k.d + k.c * h.d), 2 * cc)
        if lo < vertex < hi:
            candidates.append(q(vertex))
    qmax = max(candidates)
    if qmax == 0:
        raise PoleError("denominator vanishes identically on the interval")
    return Fraction(num) / qmax
