"""Digit costs: nonnegative values attached to digits, summed along trajectories.

Supported kinds: the unit cost (total = number of steps), the indicator of a
fixed quotient, the binary length of the quotient, and finite tables loaded
from text files.  All values are exact rationals so that lattice histograms
can be indexed by integers.
"""

from __future__ import annotations

import hashlib
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .core import Digit, Trajectory

# heuristic moderate-growth envelope: values above RATIO * (1 + log2(m+1))
# trigger a warning (slowly growing costs keep the weighted branch sums
# convergent near the reference parameters)
MODERATE_GROWTH_RATIO = 16


class MissingTableEntryError(KeyError):
    """Table cost evaluated on a digit without a table entry."""


def _frac_gcd(x: Fraction, y: Fraction) -> Fraction:
    return Fraction(
        math.gcd(x.numerator * y.denominator, y.numerator * x.denominator),
        x.denominator * y.denominator,
    )


@dataclass(frozen=True)
class DigitCost:
    """A digit cost with its lattice span.

    ``span`` is the largest L > 0 such that every value is an integer
    multiple of L (exact for the supported kinds, where the set of values
    stabilizes).
    """

    kind: str
    m0: int | None = None
    entries: tuple[tuple[int, int | None, Fraction], ...] | None = None
    span: Fraction | None = field(default=None)

    # -- constructors ------------------------------------------------------

    @staticmethod
    def unit() -> "DigitCost":
        return DigitCost("unit", span=Fraction(1))

    @staticmethod
    def indicator(m0: int) -> "DigitCost":
        if m0 < 1:
            raise ValueError("indicator cost needs a positive quotient")
        return DigitCost("indicator", m0=m0, span=Fraction(1))

    @staticmethod
    def binary_length() -> "DigitCost":
        return DigitCost("bits", span=Fraction(1))

    @staticmethod
    def from_table(entries) -> "DigitCost":
        """Build a table cost from an iterable of (m, value) or (m, eps, value)."""
        norm: list[tuple[int, int | None, Fraction]] = []
        for entry in entries:
            if len(entry) == 2:
                m, value = entry
                eps = None
            else:
                m, eps, value = entry
                eps = int(eps)
                if eps not in (1, -1):
                    raise ValueError(f"eps must be +-1, got {eps}")
            value = Fraction(value)
            if value < 0:
                raise ValueError(f"cost values must be nonnegative, got {value}")
            if float(value) > MODERATE_GROWTH_RATIO * (1 + math.log2(m + 1)):
                warnings.warn(
                    f"table value {value} at m={m} exceeds the moderate-growth "
                    "envelope; spectral tail bounds may be loose",
                    stacklevel=2,
                )
            norm.append((int(m), eps, value))
        if not norm or all(v == 0 for _, _, v in norm):
            raise ValueError("cost must not be identically zero")
        tup = tuple(sorted(norm))
        span = None
        nonzero = [v for _, _, v in tup if v != 0]
        g = nonzero[0]
        for v in nonzero[1:]:
            g = _frac_gcd(g, v)
        span = g
        return DigitCost("table", entries=tup, span=span)

    @staticmethod
    def from_file(path: str | Path) -> "DigitCost":
        """Load a table cost from a csv-like file: "m,value" or "m,eps,value"."""
        rows = []
        for line in Path(path).read_text().splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = [p.strip() for p in line.split(",")]
            if len(parts) == 2:
                rows.append((int(parts[0]), Fraction(parts[1])))
            elif len(parts) == 3:
                rows.append((int(parts[0]), int(parts[1]), Fraction(parts[2])))
            else:
                raise ValueError(f"bad table line: {line!r}")
        return DigitCost.from_table(rows)

    @staticmethod
    def from_spec(spec: str) -> "DigitCost":
        """Parse a cost spec string: unit | indicator:m | bits | table:<path>."""
        if spec == "unit":
            return DigitCost.unit()
        if spec == "bits":
            return DigitCost.binary_length()
        if spec.startswith("indicator:"):
            return DigitCost.indicator(int(spec.split(":", 1)[1]))
        if spec.startswith("table:"):
            return DigitCost.from_file(spec.split(":", 1)[1])
        raise ValueError(f"unknown cost spec {spec!r}")

    # -- evaluation ----------------------------------------------------------

    def __call__(self, digit: Digit) -> Fraction:
        return eval_cost(self, digit)

    def descriptor(self) -> str:
        """Stable identifier used in cache keys and output metadata."""
        if self.kind == "unit":
            return "unit"
        if self.kind == "bits":
            return "bits"
        if self.kind == "indicator":
            return f"indicator:{self.m0}"
        digest = hashlib.sha256(repr(self.entries).encode()).hexdigest()[:12]
        return f"table:{digest}"

    @property
    def max_table_m(self) -> int:
        if self.kind != "table":
            raise ValueError("only table costs have a bounded quotient range")
        return max(m for m, _, _ in self.entries)


def eval_cost(cost: DigitCost, digit: Digit) -> Fraction:
    """Value of the cost on one digit (exact rational)."""
    m, eps = digit
    if cost.kind == "unit":
        return Fraction(1)
    if cost.kind == "indicator":
        return Fraction(1 if m == cost.m0 else 0)
    if cost.kind == "bits":
        return Fraction(m.bit_length())
    for tm, teps, value in cost.entries:
        if tm == m and (teps is None or teps == eps):
            return value
    raise MissingTableEntryError(f"no table entry for digit ({m}, {eps:+d})")


def total_cost(cost: DigitCost, traj: Trajectory) -> Fraction:
    """Sum of the digit costs along a trajectory (the additive total cost)."""
    return sum((eval_cost(cost, d) for d in traj), Fraction(0))


def detect_span(cost: DigitCost, m_max: int) -> Fraction | None:
    """Rational gcd of the nonzero cost values on digits with m <= m_max.

    Upper bound on the true span; exact for unit, indicator and binary
    length, whose value sets stabilize below any m_max >= 2.
    """
    if m_max < 2:
        raise ValueError("m_max must be at least 2")
    values: list[Fraction] = []
    if cost.kind == "table":
        values = [v for m, _, v in cost.entries if m <= m_max and v != 0]
    else:
        for m in range(1, m_max + 1):
            for eps in (1, -1):
                v = eval_cost(cost, Digit(m, eps))
                if v != 0:
                    values.append(v)
    if not values:
        return None
    g = values[0]
    for v in values[1:]:
        g = _frac_gcd(g, v)
    return g if g > 0 else None
