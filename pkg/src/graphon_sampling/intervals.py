"""Finite unions of half-open subintervals of [0, 1].

Endpoints are stored as :class:`fractions.Fraction` so that cell boundaries
``i/N`` coming from different equipartitions compare exactly.  A cell that
only touches a set at an endpoint never counts as intersecting it.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Iterator, Sequence

Number = int | float | Fraction


def _as_fraction(x: Number) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    return Fraction(float(x))


class IntervalSet:
    """Sorted, disjoint, half-open intervals ``[a, b)`` inside ``[0, 1]``.

    Overlapping or touching input intervals are merged, empty ones dropped.
    """

    __slots__ = ("_intervals",)

    def __init__(self, intervals: Iterable[Sequence[Number]] = ()):
        pairs = []
        for a, b in intervals:
            a, b = _as_fraction(a), _as_fraction(b)
            if a < 0 or b > 1:
                raise ValueError(f"interval [{a}, {b}) is not inside [0, 1]")
            if b > a:
                pairs.append((a, b))
        pairs.sort()
        merged: list[tuple[Fraction, Fraction]] = []
        for a, b in pairs:
            if merged and a <= merged[-1][1]:
                if b > merged[-1][1]:
                    merged[-1] = (merged[-1][0], b)
            else:
                merged.append((a, b))
        self._intervals = tuple(merged)

    @classmethod
    def from_cells(cls, indices: Iterable[int], n: int) -> "IntervalSet":
        """Union of the cells ``[i/n, (i+1)/n)`` of the regular n-partition."""
        if n < 1:
            raise ValueError("n must be positive")
        cells = []
        for i in indices:
            i = int(i)
            if not 0 <= i < n:
                raise ValueError(f"cell index {i} out of range for n={n}")
            cells.append((Fraction(i, n), Fraction(i + 1, n)))
        return cls(cells)

    @classmethod
    def full(cls) -> "IntervalSet":
        return cls([(0, 1)])

    @property
    def intervals(self) -> tuple[tuple[Fraction, Fraction], ...]:
        return self._intervals

    def __iter__(self) -> Iterator[tuple[Fraction, Fraction]]:
        return iter(self._intervals)

    def __len__(self) -> int:
        return len(self._intervals)

    def __bool__(self) -> bool:
        return bool(self._intervals)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IntervalSet):
            return NotImplemented
        return self._intervals == other._intervals

    def __hash__(self) -> int:
        return hash(self._intervals)

    def __repr__(self) -> str:
        body = " U ".join(f"[{float(a):g}, {float(b):g})" for a, b in self._intervals)
        return f"IntervalSet({body or 'empty'})"

    def __contains__(self, point: Number) -> bool:
        p = _as_fraction(point)
        return any(a <= p < b for a, b in self._intervals)

    def measure(self) -> Fraction:
        return sum((b - a for a, b in self._intervals), Fraction(0))

    def endpoints(self) -> list[Fraction]:
        return sorted({x for pair in self._intervals for x in pair})

    def complement(self) -> "IntervalSet":
        out = []
        cursor = Fraction(0)
        for a, b in self._intervals:
            if a > cursor:
                out.append((cursor, a))
            cursor = b
        if cursor < 1:
            out.append((cursor, Fraction(1)))
        return IntervalSet(out)

    def union(self, other: "IntervalSet") -> "IntervalSet":
        return IntervalSet(self._intervals + other._intervals)

    def intersection(self, other: "IntervalSet") -> "IntervalSet":
        out = []
        for a, b in self._intervals:
            for c, d in other._intervals:
                lo, hi = max(a, c), min(b, d)
                if hi > lo:
                    out.append((lo, hi))
        return IntervalSet(out)

    def difference(self, other: "IntervalSet") -> "IntervalSet":
        return self.intersection(other.complement())

    def symmetric_difference_measure(self, other: "IntervalSet") -> Fraction:
        return self.difference(other).measure() + other.difference(self).measure()

    def overlap(self, a: Number, b: Number) -> Fraction:
        """Length of ``[a, b) ∩ self``."""
        a, b = _as_fraction(a), _as_fraction(b)
        total = Fraction(0)
        for c, d in self._intervals:
            lo, hi = max(a, c), min(b, d)
            if hi > lo:
                total += hi - lo
        return total

    def contains_interval(self, a: Number, b: Number) -> bool:
        a, b = _as_fraction(a), _as_fraction(b)
        return any(c <= a and b <= d for c, d in self._intervals)

    def to_pairs(self) -> list[list[float]]:
        return [[float(a), float(b)] for a, b in self._intervals]

    @classmethod
    def from_pairs(cls, pairs: Iterable[Sequence[Number]]) -> "IntervalSet":
        return cls(pairs)
