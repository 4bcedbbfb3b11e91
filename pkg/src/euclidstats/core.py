"""The three fast Euclidean division systems and their interval maps.

Each system performs divisions v = m*u + eps*r and is encoded by digits
(m, eps).  The standard system G uses floor division (eps always +1), the
centered system K divides by the nearest integer, and the odd system O by
the nearest odd integer.  Inputs u/v live in a half-open interval I', and
iterating the division is conjugate to iterating an expanding interval map
T on I = closure(I').
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, NamedTuple

PHI = (1.0 + math.sqrt(5.0)) / 2.0


class DomainError(ValueError):
    """Input pair (u, v) lies outside the algorithm's input interval."""


class InvalidDigitError(ValueError):
    """Digit (m, eps) violates the algorithm's digit conditions."""


class Digit(NamedTuple):
    m: int
    eps: int


@dataclass(frozen=True)
class Algorithm:
    """Parameter table of one Euclidean system.

    ``i_sup`` is the right endpoint of I = [0, i_sup]; I' is (0, i_sup)
    or (0, i_sup] depending on ``iprime_closed``.  ``rho`` is the
    contraction ratio of the inverse branches, ``entropy`` the closed-form
    entropy of the interval map.
    """

    id: str
    i_sup: Fraction
    iprime_closed: bool
    rho: float
    entropy: float

    # -- digit conditions ------------------------------------------------

    def digit_ok(self, m: int, eps: int) -> bool:
        """Generic digit condition (valid at every step)."""
        if eps not in (1, -1) or m < 1:
            return False
        if self.id == "G":
            return eps == 1
        if self.id == "K":
            return m >= 2 and (m > 2 or eps == 1)
        return m % 2 == 1 and (m > 1 or eps == 1)

    def digit_final_ok(self, m: int, eps: int) -> bool:
        """Condition on the last digit of a terminating expansion."""
        if not self.digit_ok(m, eps):
            return False
        if self.id == "G":
            return m >= 2
        return eps == 1

    def digits(self, m_max: int) -> Iterator[Digit]:
        """All valid digits with m <= m_max, by increasing m."""
        for m in range(1, m_max + 1):
            if self.digit_ok(m, 1):
                yield Digit(m, 1)
            if self.digit_ok(m, -1):
                yield Digit(m, -1)

    # -- input interval --------------------------------------------------

    def in_domain(self, u: int, v: int) -> bool:
        """Whether u/v lies in I'."""
        if u <= 0 or v <= 0:
            return False
        if self.id == "G":
            return u < v
        if self.id == "K":
            return 2 * u <= v
        return u <= v

    def in_interval(self, x: Fraction) -> bool:
        """Whether x lies in the closed interval I."""
        return 0 <= x <= self.i_sup

    # -- invariant density -----------------------------------------------

    def density(self, x: float) -> float:
        """Closed-form invariant density of T, normalized to unit mass on I."""
        if self.id == "G":
            return 1.0 / (math.log(2.0) * (1.0 + x))
        if self.id == "K":
            return (1.0 / (PHI + x) + 1.0 / (PHI * PHI - x)) / math.log(PHI)
        # the raw closed form integrates to 3*log(phi) over [0, 1]
        return (1.0 / (PHI - 1.0 + x) + 1.0 / (PHI * PHI - x)) / (3.0 * math.log(PHI))

    def density_antiderivative(self, x: float) -> float:
        """Antiderivative of :meth:`density` (log closed form), F(0) = F0."""
        if self.id == "G":
            return math.log1p(x) / math.log(2.0)
        if self.id == "K":
            return (math.log(PHI + x) - math.log(PHI * PHI - x)) / math.log(PHI)
        return (math.log(PHI - 1.0 + x) - math.log(PHI * PHI - x)) / (3.0 * math.log(PHI))

    # -- depth bound -----------------------------------------------------

    @property
    def depth_bound_constant(self) -> float:
        """K0 with max depth <= K0 * log v; sanity assertion only."""
        return 1.0 / math.log(1.0 / math.sqrt(self.rho)) + 2.0


STANDARD = Algorithm(
    id="G",
    i_sup=Fraction(1),
    iprime_closed=False,
    rho=1.0 / PHI**2,
    entropy=math.pi**2 / (6.0 * math.log(2.0)),
)

CENTERED = Algorithm(
    id="K",
    i_sup=Fraction(1, 2),
    iprime_closed=True,
    rho=1.0 / (math.sqrt(2.0) + 1.0) ** 2,
    entropy=math.pi**2 / (6.0 * math.log(PHI)),
)

ODD = Algorithm(
    id="O",
    i_sup=Fraction(1),
    iprime_closed=True,
    rho=1.0 / PHI**2,
    entropy=math.pi**2 / (9.0 * math.log(PHI)),
)

ALGORITHMS: dict[str, Algorithm] = {"G": STANDARD, "K": CENTERED, "O": ODD}


def get_algorithm(algo: str | Algorithm) -> Algorithm:
    if isinstance(algo, Algorithm):
        return algo
    try:
        return ALGORITHMS[algo]
    except KeyError:
        raise KeyError(f"unknown algorithm {algo!r}, expected one of G, K, O") from None


def divide(algo: str | Algorithm, u: int, v: int) -> tuple[Digit, int]:
    """One Euclidean division v = m*u + eps*r.

    Returns the digit (m, eps) and the remainder r, with r in [0, u) for G,
    [0, u/2] for K and [0, u] for O.  The quotient selection follows the
    half-open windows: s = v - m*u lies in [-u/2, u/2) for K and in [-u, u)
    for O, with eps = +1 when s = 0.
    """
    a = get_algorithm(algo)
    if u <= 0 or v <= 0:
        raise DomainError(f"{a.id}: need positive integers, got u={u}, v={v}")
    if not a.in_domain(u, v):
        raise DomainError(f"{a.id}: u/v = {u}/{v} outside the input interval")
    if a.id == "G":
        m, r = divmod(v, u)
        return Digit(m, 1), r
    if a.id == "K":
        m = (2 * v + u) // (2 * u)
    else:
        m = 2 * (v // (2 * u)) + 1
    s = v - m * u
    if s >= 0:
        return Digit(m, 1), s
    return Digit(m, -1), -s


@dataclass(frozen=True)
class Trajectory:
    """Digit sequence of one complete execution."""

    algo_id: str
    digits: tuple[Digit, ...]

    @property
    def depth(self) -> int:
        return len(self.digits)

    def __iter__(self) -> Iterator[Digit]:
        return iter(self.digits)


def decompose(algo: str | Algorithm, u: int, v: int) -> Trajectory:
    """Run the algorithm on (u, v) and return the digit sequence.

    Inputs need not be coprime; the common factor divides out of every
    remainder and the digits are unchanged.
    """
    a = get_algorithm(algo)
    digits: list[Digit] = []
    while True:
        d, r = divide(a, u, v)
        digits.append(d)
        if r == 0:
            break
        u, v = r, u
    return Trajectory(a.id, tuple(digits))


def reconstruct(traj: Trajectory) -> tuple[int, int]:
    """Fold the digit branches over 0 and return the reduced fraction (u, v).

    Inverse of :func:`decompose` on coprime inputs; the empty trajectory
    gives (0, 1).
    """
    from .lft import Lft, digit_to_lft

    h = Lft.identity()
    for d in traj.digits:
        h = h.compose(digit_to_lft(traj.algo_id, d))
    x = h(Fraction(0))
    return x.numerator, x.denominator


def map_step(algo: str | Algorithm, x: Fraction) -> Fraction:
    """One step of the interval map T: T(0) = 0 and T(u/v) = r/u."""
    a = get_algorithm(algo)
    if x == 0:
        return Fraction(0)
    if not a.in_domain(x.numerator, x.denominator):
        raise DomainError(f"{a.id}: x = {x} outside the input interval")
    _, r = divide(a, x.numerator, x.denominator)
    return Fraction(r, x.numerator)
