"""Sign algebra and interval algebra for influence combination.

Signs live in {+, -, 0, ?} and combine with the chain operator ``sign_mul``
and the parallel operator ``sign_add``.  Intervals are closed subintervals
of [-1, 1] describing a range of probability differences; they combine with
``interval_mul`` (endpoint products) and ``interval_add`` (componentwise sum
clipped back into [-1, 1]).  ``classify`` maps an interval back to its sign,
and ``sign_to_unit_interval`` embeds signs as the four unit intervals.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

#: Absolute tolerance used for interval change detection and test equality.
TOLERANCE = 1e-9


class Sign(enum.Enum):
    """Direction of a qualitative influence."""

    POSITIVE = "+"
    NEGATIVE = "-"
    ZERO = "0"
    AMBIGUOUS = "?"

    def __str__(self) -> str:
        return self.value

    @classmethod
    def parse(cls, token: str) -> "Sign":
        try:
            return cls(token)
        except ValueError:
            raise ValueError(f"not a sign: {token!r} (expected one of +, -, 0, ?)") from None


_P, _N, _Z, _A = Sign.POSITIVE, Sign.NEGATIVE, Sign.ZERO, Sign.AMBIGUOUS

# Chain combination: '0' annihilates, '+' is the identity, '?' spreads
# except against '0'.
_MUL_TABLE = {
    (_P, _P): _P, (_P, _N): _N, (_P, _Z): _Z, (_P, _A): _A,
    (_N, _P): _N, (_N, _N): _P, (_N, _Z): _Z, (_N, _A): _A,
    (_Z, _P): _Z, (_Z, _N): _Z, (_Z, _Z): _Z, (_Z, _A): _Z,
    (_A, _P): _A, (_A, _N): _A, (_A, _Z): _Z, (_A, _A): _A,
}

# Parallel combination: '0' is the identity, '?' absorbs, and opposite
# signs conflict into '?'.
_ADD_TABLE = {
    (_P, _P): _P, (_P, _N): _A, (_P, _Z): _P, (_P, _A): _A,
    (_N, _P): _A, (_N, _N): _N, (_N, _Z): _N, (_N, _A): _A,
    (_Z, _P): _P, (_Z, _N): _N, (_Z, _Z): _Z, (_Z, _A): _A,
    (_A, _P): _A, (_A, _N): _A, (_A, _Z): _A, (_A, _A): _A,
}


def sign_mul(a: Sign, b: Sign) -> Sign:
    """Combine two influence signs along a chain."""
    return _MUL_TABLE[(a, b)]


def sign_add(a: Sign, b: Sign) -> Sign:
    """Combine two influence signs acting in parallel."""
    return _ADD_TABLE[(a, b)]


@dataclass(frozen=True)
class Interval:
    """A closed subinterval of [-1, 1] of probability differences."""

    lo: float
    hi: float

    # Constructor snap: arithmetic on admissible inputs can leave bounds a
    # few ulps outside [-1, 1]; anything worse is a caller bug.
    _SNAP = 1e-12

    def __post_init__(self) -> None:
        lo, hi = float(self.lo), float(self.hi)
        if lo > hi:
            raise ValueError(f"interval bounds out of order: [{lo}, {hi}]")
        if lo < -1.0 - self._SNAP or hi > 1.0 + self._SNAP:
            raise ValueError(f"interval exceeds [-1, 1]: [{lo}, {hi}]")
        object.__setattr__(self, "lo", min(max(lo, -1.0), 1.0))
        object.__setattr__(self, "hi", min(max(hi, -1.0), 1.0))

    def approx_eq(self, other: "Interval", tol: float = TOLERANCE) -> bool:
        return abs(self.lo - other.lo) <= tol and abs(self.hi - other.hi) <= tol

    def contains(self, x: float, tol: float = TOLERANCE) -> bool:
        return self.lo - tol <= x <= self.hi + tol

    def is_subset_of(self, other: "Interval", tol: float = TOLERANCE) -> bool:
        return other.lo - tol <= self.lo and self.hi <= other.hi + tol

    def __str__(self) -> str:
        return f"[{format_number(self.lo)}, {format_number(self.hi)}]"


ZERO_INTERVAL = Interval(0.0, 0.0)

#: The four unit intervals, the interval images of the four signs.
UNIT_INTERVALS = {
    Sign.POSITIVE: Interval(0.0, 1.0),
    Sign.NEGATIVE: Interval(-1.0, 0.0),
    Sign.ZERO: Interval(0.0, 0.0),
    Sign.AMBIGUOUS: Interval(-1.0, 1.0),
}


def interval_mul(a: Interval, b: Interval) -> Interval:
    """Chain combination of intervals: min/max over the endpoint products.

    No clipping is needed: products of values in [-1, 1] stay in [-1, 1].
    """
    products = (a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi)
    return Interval(min(products), max(products))


def interval_add(a: Interval, b: Interval) -> Interval:
    """Parallel combination of intervals: componentwise sum, clipped to [-1, 1]."""
    return Interval(
        min(max(a.lo + b.lo, -1.0), 1.0),
        min(max(a.hi + b.hi, -1.0), 1.0),
    )


def classify(a: Interval) -> Sign:
    """The sign of an interval: zero before positive/negative, else ambiguous."""
    if a.lo == 0.0 and a.hi == 0.0:
        return Sign.ZERO
    if a.lo >= 0.0:
        return Sign.POSITIVE
    if a.hi <= 0.0:
        return Sign.NEGATIVE
    return Sign.AMBIGUOUS


def sign_to_unit_interval(s: Sign) -> Interval:
    """Embed a sign as its unit interval."""
    return UNIT_INTERVALS[s]


def format_number(x: float) -> str:
    """Render a number with up to 6 significant digits, trailing zeros trimmed."""
    if x == 0.0:
        return "0"
    return f"{x:.6g}"
