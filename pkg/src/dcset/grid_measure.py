"""Dyadic discretization of (0,1): grids, bin sets, fat Cantor sets, cyclic shifts.

Points are plain floats in the open interval; all set algebra happens at bin
level in exact rational arithmetic (`fractions.Fraction`).  Bins follow the
half-open convention [k/n, (k+1)/n).
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import numpy as np

from .errors import BadParameter, OutOfDomain, UndefinedPoint

__all__ = [
    "UnitGrid",
    "BinSet",
    "CyclicShift",
    "FatCantor",
    "bin_of",
    "mes",
    "cyclic_shift_point",
    "cyclic_shift_points",
    "fat_cantor_build",
    "fat_cantor_contains",
]


@dataclass(frozen=True)
class UnitGrid:
    """Partition of [0,1) into n half-open bins [k/n, (k+1)/n)."""

    n: int

    def __post_init__(self):
        if self.n < 1:
            raise BadParameter(f"grid needs at least one bin, got n={self.n}")

    def bin_interval(self, k: int) -> tuple[Fraction, Fraction]:
        """Exact endpoints of bin k."""
        return Fraction(k, self.n), Fraction(k + 1, self.n)

    def bins(self, points) -> np.ndarray:
        """Vectorized bin indices for an array of points in (0,1)."""
        pts = np.asarray(points, dtype=float)
        return np.clip((pts * self.n).astype(np.int64), 0, self.n - 1)

    def full(self) -> "BinSet":
        return BinSet(self, frozenset(range(self.n)))

    def empty(self) -> "BinSet":
        return BinSet(self, frozenset())


@dataclass(frozen=True)
class BinSet:
    """A finite union of grid bins; the exact stand-in for a Borel subset."""

    grid: UnitGrid
    members: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        members = frozenset(self.members)
        object.__setattr__(self, "members", members)
        for k in members:
            if not 0 <= k < self.grid.n:
                raise BadParameter(f"bin index {k} outside [0, {self.grid.n})")

    @property
    def measure(self) -> Fraction:
        return Fraction(len(self.members), self.grid.n)

    def contains_point(self, t: float) -> bool:
        return bin_of(self.grid, t) in self.members

    def contains_points(self, points) -> np.ndarray:
        """Vectorized membership for points in (0,1)."""
        lookup = np.zeros(self.grid.n, dtype=bool)
        lookup[list(self.members)] = True
        return lookup[self.grid.bins(points)]

    def complement(self) -> "BinSet":
        return BinSet(self.grid, frozenset(range(self.grid.n)) - self.members)

    def shifted(self, j: int) -> "BinSet":
        """Image under the grid-aligned cyclic shift by j bins."""
        n = self.grid.n
        return BinSet(self.grid, frozenset((k + j) % n for k in self.members))


def bin_of(grid: UnitGrid, t: float) -> int:
    """Index k with k/n <= t < (k+1)/n for a point of the open interval."""
    if not 0.0 < t < 1.0:
        raise OutOfDomain(f"point {t} outside (0,1)")
    return int(grid.bins(np.array([t]))[0])


def mes(a: BinSet) -> Fraction:
    """Exact Lebesgue measure of a bin set."""
    return a.measure


@dataclass(frozen=True)
class CyclicShift:
    """The interval exchange t -> t + s mod 1 on (0,1); undefined at 1 - s."""

    s: object  # float or Fraction in (0,1)

    def __post_init__(self):
        if not 0 < self.s < 1:
            raise BadParameter(f"shift {self.s} outside (0,1)")


def cyclic_shift_point(shift: CyclicShift, t):
    """Apply the cyclic shift to one point.

    Exact when both the shift and the point are Fractions; float otherwise.
    Raises UndefinedPoint at t = 1 - s, where the exchange has no value.
    """
    if not 0 < t < 1:
        raise OutOfDomain(f"point {t} outside (0,1)")
    s = shift.s
    if t == 1 - s:
        raise UndefinedPoint(f"shift by {s} undefined at {t}")
    if t < 1 - s:
        return t + s
    return t + s - 1


def cyclic_shift_points(shift: CyclicShift, points: Iterable) -> list:
    """Image of a point list, silently dropping the single undefined point."""
    s = shift.s
    out = []
    for t in points:
        if t == 1 - s:
            continue
        out.append(t + s if t < 1 - s else t + s - 1)
    return out


@dataclass(frozen=True)
class FatCantor:
    """A nowhere dense compact subset of (0,1) with positive measure.

    Stored through its complement: `removed` is the sorted tuple of disjoint
    open rational intervals taken out of (0,1); the set itself is what is left.
    """

    depth: int
    removed: tuple
    gap_measure: Fraction

    @property
    def measure(self) -> Fraction:
        return 1 - self.gap_measure

    def kept_segments(self) -> list[tuple[Fraction, Fraction]]:
        """Closed segments making up the set, left to right."""
        segments = []
        cursor = Fraction(0)
        for lo, hi in self.removed:
            if lo > cursor:
                segments.append((cursor, lo))
            cursor = hi
        if cursor < 1:
            segments.append((cursor, Fraction(1)))
        return segments

    def contains_points(self, points) -> np.ndarray:
        """Vectorized membership: True where no removed interval holds the point."""
        pts = np.asarray(points, dtype=float)
        los = np.array([float(lo) for lo, _ in self.removed])
        his = np.array([float(hi) for _, hi in self.removed])
        idx = np.searchsorted(los, pts, side="right") - 1
        inside = np.zeros(pts.shape, dtype=bool)
        has_left = idx >= 0
        inside[has_left] = (pts[has_left] < his[idx[has_left]]) & (
            pts[has_left] > los[idx[has_left]]
        )
        return ~inside


def fat_cantor_build(target_gap, depth: int) -> FatCantor:
    """Standard fat-Cantor construction with a geometric removal schedule.

    Stage j removes a centered open interval of length 2*target_gap/4**j from
    each of the 2**(j-1) surviving closed segments, so the total removed after
    `depth` stages is target_gap * (1 - 2**-depth): strictly below the target
    and converging to it.  The complement of the removed union is nowhere
    dense (every dyadic bin at resolution 2**depth meets a removed interval)
    yet keeps measure 1 - gap > 1 - target_gap > 0.
    """
    gap = Fraction(target_gap)
    if not 0 < gap < 1:
        raise BadParameter(f"target gap {target_gap} outside (0,1)")
    if depth < 1:
        raise BadParameter(f"depth must be >= 1, got {depth}")

    removed = []
    segments = [(Fraction(0), Fraction(1))]
    for stage in range(1, depth + 1):
        piece = 2 * gap / 4**stage
        next_segments = []
        for lo, hi in segments:
            mid = (lo + hi) / 2
            cut_lo, cut_hi = mid - piece / 2, mid + piece / 2
            removed.append((cut_lo, cut_hi))
            next_segments.append((lo, cut_lo))
            next_segments.append((cut_hi, hi))
        segments = next_segments

    removed.sort()
    gap_measure = sum((hi - lo for lo, hi in removed), Fraction(0))
    return FatCantor(depth=depth, removed=tuple(removed), gap_measure=gap_measure)


def fat_cantor_contains(cantor: FatCantor, t: float) -> bool:
    """True iff the point lies in no removed interval."""
    if not 0 < t < 1:
        raise OutOfDomain(f"point {t} outside (0,1)")
    los = [lo for lo, _ in cantor.removed]
    i = bisect_right(los, t) - 1
    if i < 0:
        return True
    return not (t < cantor.removed[i][1] and cantor.removed[i][0] < t)
