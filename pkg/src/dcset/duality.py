"""Exact finite-grid marginal and cover problems with strong-duality witnesses.

Given a boolean support mask W on an n-by-m grid and marginal caps (row and
column budgets summing to one), two numbers are computed exactly:

* the largest total mass of a nonnegative matrix supported on W whose row and
  column sums stay below the caps (the marginal problem), and
* the cheapest "cross" cover (U x all) | (all x V) of W, priced by the caps
  (the cover problem).

Both are realized by one integer max-flow after clearing denominators, so the
two values agree exactly and each solve yields checkable certificates: a
feasible coupling achieving the first value and a covering pair achieving the
second.  The frequency-profile machinery at the bottom handles periodic set
sequences: exact limit frequencies, their product factorization, and the
limsup witness rectangle.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import BadParameter, DeficientSupport, FactorizationFailure, NotNested
from .grid_measure import BinSet, UnitGrid

__all__ = [
    "SupportMask",
    "MarginalCaps",
    "Coupling",
    "Cover",
    "ChainReport",
    "FrequencyProfile",
    "max_coupling",
    "min_cover",
    "duality_gap",
    "monotone_chain_check",
    "full_coupling",
    "frequency_profile",
    "periodic_limsup_mask",
    "product_limsup_witness",
    "all_masks",
]

_ZERO = Fraction(0)


class SupportMask:
    """Boolean n-by-m matrix marking the allowed cells of the square."""

    __slots__ = ("cells", "rows", "cols", "_pairs")

    def __init__(self, cells):
        arr = np.array(cells, dtype=bool)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise BadParameter(f"mask must be a 2-D matrix, got shape {arr.shape}")
        arr.setflags(write=False)
        self.cells = arr
        self.rows, self.cols = arr.shape
        self._pairs = None

    def pairs(self) -> list[tuple[int, int]]:
        """True cells as (row, col) pairs, row-major; computed once."""
        if self._pairs is None:
            ii, jj = np.nonzero(self.cells)
            self._pairs = list(zip(ii.tolist(), jj.tolist()))
        return self._pairs

    @classmethod
    def empty(cls, rows: int, cols: int) -> "SupportMask":
        return cls(np.zeros((rows, cols), dtype=bool))

    @classmethod
    def full(cls, rows: int, cols: int) -> "SupportMask":
        return cls(np.ones((rows, cols), dtype=bool))

    @classmethod
    def from_cells(cls, rows: int, cols: int, true_cells: Iterable) -> "SupportMask":
        arr = np.zeros((rows, cols), dtype=bool)
        for i, j in true_cells:
            arr[i, j] = True
        return cls(arr)

    @classmethod
    def from_bits(cls, rows: int, cols: int, bits: int) -> "SupportMask":
        """Mask number `bits` in the row-major enumeration of all 2**(rows*cols)."""
        flat = (bits >> np.arange(rows * cols)) & 1
        return cls(flat.astype(bool).reshape(rows, cols))

    def cell(self, i: int, j: int) -> bool:
        return bool(self.cells[i, j])

    def count(self) -> int:
        return int(self.cells.sum())

    def is_subset(self, other: "SupportMask") -> bool:
        return self.cells.shape == other.cells.shape and not bool(
            (self.cells & ~other.cells).any()
        )

    def __eq__(self, other):
        return isinstance(other, SupportMask) and np.array_equal(self.cells, other.cells)

    def __repr__(self):
        return f"SupportMask({self.rows}x{self.cols}, {self.count()} cells)"


def all_masks(rows: int, cols: int) -> Iterator[SupportMask]:
    """Every mask on a rows-by-cols grid, in bit order."""
    for bits in range(1 << (rows * cols)):
        yield SupportMask.from_bits(rows, cols, bits)


@dataclass(frozen=True)
class MarginalCaps:
    """Row and column budgets; exact rationals summing to one on each side."""

    row_caps: tuple
    col_caps: tuple

    def __post_init__(self):
        rows = tuple(Fraction(c) for c in self.row_caps)
        cols = tuple(Fraction(c) for c in self.col_caps)
        object.__setattr__(self, "row_caps", rows)
        object.__setattr__(self, "col_caps", cols)
        if any(c < 0 for c in rows + cols):
            raise BadParameter("caps must be nonnegative")
        if sum(rows) != 1 or sum(cols) != 1:
            raise BadParameter(
                f"caps must sum to 1 on each side, got {sum(rows)} and {sum(cols)}"
            )

    @classmethod
    @lru_cache(maxsize=64)
    def uniform(cls, rows: int, cols: int) -> "MarginalCaps":
        return cls(
            tuple(Fraction(1, rows) for _ in range(rows)),
            tuple(Fraction(1, cols) for _ in range(cols)),
        )

    def scaled(self) -> tuple[int, list[int], list[int]]:
        """Common denominator and integer caps; computed once per instance."""
        cached = self.__dict__.get("_scaled")
        if cached is None:
            scale = math.lcm(*(c.denominator for c in self.row_caps + self.col_caps))
            cached = (
                scale,
                [int(c * scale) for c in self.row_caps],
                [int(c * scale) for c in self.col_caps],
            )
            self.__dict__["_scaled"] = cached
        return cached


class Coupling:
    """Nonnegative rational matrix with capped marginals."""

    __slots__ = ("mass",)

    def __init__(self, mass):
        self.mass = tuple(tuple(Fraction(x) for x in row) for row in mass)

    @property
    def rows(self) -> int:
        return len(self.mass)

    @property
    def cols(self) -> int:
        return len(self.mass[0])

    def total_mass(self) -> Fraction:
        return sum((x for row in self.mass for x in row), _ZERO)

    def row_sums(self) -> tuple:
        return tuple(sum(row, _ZERO) for row in self.mass)

    def col_sums(self) -> tuple:
        return tuple(
            sum((row[j] for row in self.mass), _ZERO) for j in range(self.cols)
        )

    def mass_on(self, mask: SupportMask) -> Fraction:
        """Total mass sitting on the mask's true cells."""
        return sum(
            (
                self.mass[i][j]
                for i in range(self.rows)
                for j in range(self.cols)
                if mask.cells[i, j]
            ),
            _ZERO,
        )

    def supported_on(self, mask: SupportMask) -> bool:
        return all(
            self.mass[i][j] == 0 or mask.cells[i, j]
            for i in range(self.rows)
            for j in range(self.cols)
        )

    def is_feasible(self, caps: MarginalCaps, mask: SupportMask | None = None) -> bool:
        """Exact check: marginals capped, all entries nonnegative, support inside mask."""
        if any(x < 0 for row in self.mass for x in row):
            return False
        if any(r > c for r, c in zip(self.row_sums(), caps.row_caps)):
            return False
        if any(r > c for r, c in zip(self.col_sums(), caps.col_caps)):
            return False
        if mask is not None and not self.supported_on(mask):
            return False
        return True


@dataclass(frozen=True)
class Cover:
    """A cross-shaped cover: chosen rows U and columns V."""

    U: frozenset
    V: frozenset

    def cost(self, caps: MarginalCaps) -> Fraction:
        return sum((caps.row_caps[i] for i in self.U), _ZERO) + sum(
            (caps.col_caps[j] for j in self.V), _ZERO
        )

    def covers(self, mask: SupportMask) -> bool:
        ii, jj = np.nonzero(mask.cells)
        return all(int(i) in self.U or int(j) in self.V for i, j in zip(ii, jj))


class _FlowResult:
    __slots__ = ("value", "flow", "scale", "U", "V", "caps")

    def __init__(self, value, flow, scale, U, V, caps):
        self.value = value  # Fraction
        self.flow = flow  # list of (i, j, int units)
        self.scale = scale
        self.U = U
        self.V = V
        self.caps = caps


def _solve(mask: SupportMask, caps: MarginalCaps | None) -> _FlowResult:
    """One integer max-flow giving value, supported flow, and the min cut."""
    if caps is None:
        caps = MarginalCaps.uniform(mask.rows, mask.cols)
    if len(caps.row_caps) != mask.rows or len(caps.col_caps) != mask.cols:
        raise BadParameter("caps dimensions do not match the mask")

    n, m = mask.rows, mask.cols
    scale, row_int, col_int = caps.scaled()

    # Node layout: 0 source, 1..n rows, n+1..n+m cols, n+m+1 sink.
    source, sink = 0, n + m + 1
    n_nodes = n + m + 2
    # Augmenting paths alternate sides, so recursion depth stays below
    # 2*min(n, m)+4; only huge square masks need a higher limit.
    depth_bound = 2 * min(n, m) + 50
    if depth_bound > sys.getrecursionlimit():
        sys.setrecursionlimit(depth_bound + 1000)
    adj: list[list[int]] = [[] for _ in range(n_nodes)]
    to: list[int] = []
    cap: list[int] = []

    for i in range(n):
        adj[source].append(len(to))
        to.append(1 + i)
        cap.append(row_int[i])
        adj[1 + i].append(len(to))
        to.append(source)
        cap.append(0)
    for j in range(m):
        adj[1 + n + j].append(len(to))
        to.append(sink)
        cap.append(col_int[j])
        adj[sink].append(len(to))
        to.append(1 + n + j)
        cap.append(0)
    pairs = mask.pairs()
    first_cell_edge = len(to)
    for i, j in pairs:
        adj[1 + i].append(len(to))
        to.append(1 + n + j)
        cap.append(scale)
        adj[1 + n + j].append(len(to))
        to.append(1 + i)
        cap.append(0)

    flow_value = 0
    level = [-1] * n_nodes
    total_cap = sum(row_int)
    while True:
        level = [-1] * n_nodes
        level[source] = 0
        queue = [source]
        for u in queue:
            lu = level[u]
            for e in adj[u]:
                v = to[e]
                if cap[e] > 0 and level[v] < 0:
                    level[v] = lu + 1
                    queue.append(v)
        if level[sink] < 0:
            break
        iters = [0] * n_nodes

        def augment(u, limit):
            if u == sink:
                return limit
            edges = adj[u]
            while iters[u] < len(edges):
                e = edges[iters[u]]
                v = to[e]
                if cap[e] > 0 and level[v] == level[u] + 1:
                    pushed = augment(v, min(limit, cap[e]))
                    if pushed:
                        cap[e] -= pushed
                        cap[e ^ 1] += pushed
                        return pushed
                iters[u] += 1
            return 0

        while True:
            pushed = augment(source, total_cap)
            if not pushed:
                break
            flow_value += pushed

    # The last breadth-first search marks residual reachability: rows cut off
    # from the source join U, columns still reachable join V.
    U = frozenset(i for i in range(n) if level[1 + i] < 0)
    V = frozenset(j for j in range(m) if level[1 + n + j] >= 0)
    flow = []
    for k, (i, j) in enumerate(pairs):
        units = scale - cap[first_cell_edge + 2 * k]
        if units > 0:
            flow.append((i, j, units))
    return _FlowResult(Fraction(flow_value, scale), flow, scale, U, V, caps)


def _coupling_from(result: _FlowResult, rows: int, cols: int) -> Coupling:
    mass = [[_ZERO] * cols for _ in range(rows)]
    for i, j, units in result.flow:
        mass[i][j] = Fraction(units, result.scale)
    coupling = Coupling.__new__(Coupling)
    coupling.mass = tuple(tuple(row) for row in mass)
    return coupling


def max_coupling(mask: SupportMask, caps: MarginalCaps | None = None):
    """Largest mass of a coupling on the mask; returns (value, witness).

    The witness achieves the value exactly: its total mass equals the returned
    Fraction, its marginals respect the caps, and it charges mask cells only.
    """
    result = _solve(mask, caps)
    return result.value, _coupling_from(result, mask.rows, mask.cols)


def min_cover(mask: SupportMask, caps: MarginalCaps | None = None):
    """Cheapest cross cover of the mask; returns (value, witness)."""
    result = _solve(mask, caps)
    cover = Cover(result.U, result.V)
    return cover.cost(result.caps), cover


def duality_gap(mask: SupportMask, caps: MarginalCaps | None = None) -> Fraction:
    """Exact cover-minus-coupling gap, certified from one solve.

    Both certificates are validated at integer level before the gap is formed,
    so a zero return really is a proof of strong duality for the instance.
    """
    result = _solve(mask, caps)
    n, m = mask.rows, mask.cols
    row_units = [0] * n
    col_units = [0] * m
    for i, j, units in result.flow:
        if not mask.cells[i, j]:
            raise AssertionError("flow escaped the mask")
        row_units[i] += units
        col_units[j] += units
    _, row_int, col_int = result.caps.scaled()
    if any(r > c for r, c in zip(row_units, row_int)):
        raise AssertionError("coupling witness violates a row cap")
    if any(r > c for r, c in zip(col_units, col_int)):
        raise AssertionError("coupling witness violates a column cap")
    U, V = result.U, result.V
    for i, j in mask.pairs():
        if i not in U and j not in V:
            raise AssertionError("cover witness misses a mask cell")
    mass_units = sum(units for _, _, units in result.flow)
    cost_units = sum(row_int[i] for i in U) + sum(col_int[j] for j in V)
    return Fraction(cost_units - mass_units, result.scale)


@dataclass(frozen=True)
class ChainReport:
    """Coupling and cover values along a nested chain of masks."""

    coupling_values: tuple
    cover_values: tuple

    @property
    def nondecreasing(self) -> bool:
        return all(
            a <= b for a, b in zip(self.coupling_values, self.coupling_values[1:])
        ) and all(a <= b for a, b in zip(self.cover_values, self.cover_values[1:]))


def monotone_chain_check(
    chain: Sequence[SupportMask], caps: MarginalCaps | None = None
) -> ChainReport:
    """Values along an increasing chain W1 <= W2 <= ...; both sequences climb."""
    for idx, (a, b) in enumerate(zip(chain, chain[1:])):
        if not a.is_subset(b):
            raise NotNested(idx + 1)
    couplings = []
    covers = []
    for mask in chain:
        result = _solve(mask, caps)
        couplings.append(result.value)
        covers.append(Cover(result.U, result.V).cost(result.caps))
    return ChainReport(tuple(couplings), tuple(covers))


def full_coupling(mask: SupportMask, caps: MarginalCaps | None = None) -> Coupling:
    """A probability coupling living entirely on the mask.

    Exists exactly when no cross cover is cheaper than 1; otherwise the cheap
    cover is raised as the obstruction (DeficientSupport).  On success both
    marginals equal the caps exactly.
    """
    result = _solve(mask, caps)
    if result.value < 1:
        cover = Cover(result.U, result.V)
        raise DeficientSupport(cover, cover.cost(result.caps))
    return _coupling_from(result, mask.rows, mask.cols)


# ---------------------------------------------------------------------------
# Frequency profiles of periodic set sequences


@dataclass(frozen=True)
class FrequencyProfile:
    """Per-bin visit frequencies f, g and joint frequencies h of two sequences."""

    row_grid: UnitGrid
    col_grid: UnitGrid
    f: tuple
    g: tuple
    h: tuple

    def residual(self) -> Fraction:
        """Largest deviation |h(i,j) - f(i) g(j)| over all cells."""
        worst = _ZERO
        for i, fi in enumerate(self.f):
            for j, gj in enumerate(self.g):
                dev = abs(self.h[i][j] - fi * gj)
                if dev > worst:
                    worst = dev
        return worst

    @property
    def factorizes(self) -> bool:
        return self.residual() == 0

    @property
    def mean_f(self) -> Fraction:
        """Average of f over bins: the exact mass target for the witness row set."""
        return Fraction(sum(self.f, _ZERO), self.row_grid.n)

    @property
    def mean_g(self) -> Fraction:
        return Fraction(sum(self.g, _ZERO), self.col_grid.n)


def _as_bool_rows(sets: Sequence[BinSet]) -> tuple[UnitGrid, np.ndarray]:
    grid = sets[0].grid
    if any(s.grid != grid for s in sets):
        raise BadParameter("all sets in a sequence must share one grid")
    arr = np.zeros((len(sets), grid.n), dtype=np.int64)
    for k, s in enumerate(sets):
        arr[k, list(s.members)] = 1
    return grid, arr


def frequency_profile(
    a_sets: Sequence[BinSet],
    b_sets: Sequence[BinSet],
    horizon: int,
    periodic: bool = True,
) -> FrequencyProfile:
    """Visit frequencies of two bin-set sequences over a finite horizon.

    With `periodic=True` the given lists are read as one period each and
    indices wrap, so a horizon divisible by both periods yields the exact
    limit frequencies as rationals with denominator dividing the horizon.
    With `periodic=False` the lists are finite prefixes and the horizon must
    not exceed them (empirical frequencies).
    """
    if horizon < 1:
        raise BadParameter(f"horizon must be >= 1, got {horizon}")
    if not a_sets or not b_sets:
        raise BadParameter("sequences must be nonempty")
    if not periodic and (horizon > len(a_sets) or horizon > len(b_sets)):
        raise BadParameter("horizon exceeds the given finite prefixes")

    row_grid, a_arr = _as_bool_rows(a_sets)
    col_grid, b_arr = _as_bool_rows(b_sets)
    la, lb = len(a_sets), len(b_sets)

    f_counts = np.zeros(row_grid.n, dtype=np.int64)
    g_counts = np.zeros(col_grid.n, dtype=np.int64)
    h_counts = np.zeros((row_grid.n, col_grid.n), dtype=np.int64)
    for k in range(horizon):
        a = a_arr[k % la if periodic else k]
        b = b_arr[k % lb if periodic else k]
        f_counts += a
        g_counts += b
        h_counts += np.outer(a, b)

    f = tuple(Fraction(int(c), horizon) for c in f_counts)
    g = tuple(Fraction(int(c), horizon) for c in g_counts)
    h = tuple(
        tuple(Fraction(int(c), horizon) for c in row) for row in h_counts
    )
    return FrequencyProfile(row_grid, col_grid, f, g, h)


def periodic_limsup_mask(
    a_sets: Sequence[BinSet], b_sets: Sequence[BinSet]
) -> SupportMask:
    """Cells hit by A_k x B_k for infinitely many k, exact for periodic input."""
    row_grid, a_arr = _as_bool_rows(a_sets)
    col_grid, b_arr = _as_bool_rows(b_sets)
    period = math.lcm(len(a_sets), len(b_sets))
    cells = np.zeros((row_grid.n, col_grid.n), dtype=bool)
    for k in range(period):
        cells |= np.outer(
            a_arr[k % len(a_sets)].astype(bool), b_arr[k % len(b_sets)].astype(bool)
        )
    return SupportMask(cells)


def product_limsup_witness(
    profile: FrequencyProfile,
    limsup_mask: SupportMask,
    a_target: Fraction | None = None,
    b_target: Fraction | None = None,
) -> tuple[BinSet, BinSet]:
    """Witness rectangle A x B inside the limsup from a factorizing profile.

    A is the support of f and B the support of g.  Raises
    FactorizationFailure when h != f*g somewhere (the identity is only
    guaranteed along subsequences in general; this artifact reports rather
    than extracts).  When mass targets are supplied the witness measures are
    checked against them exactly.
    """
    residual = profile.residual()
    if residual != 0:
        raise FactorizationFailure(residual)

    a_set = BinSet(
        profile.row_grid, frozenset(i for i, v in enumerate(profile.f) if v > 0)
    )
    b_set = BinSet(
        profile.col_grid, frozenset(j for j, v in enumerate(profile.g) if v > 0)
    )
    for i in a_set.members:
        for j in b_set.members:
            if not limsup_mask.cell(i, j):
                raise BadParameter(
                    f"limsup mask misses cell ({i},{j}); it does not match the profile"
                )
    if a_target is not None and a_set.measure < a_target:
        raise BadParameter(f"witness row set measure {a_set.measure} < {a_target}")
    if b_target is not None and b_set.measure < b_target:
        raise BadParameter(f"witness column set measure {b_set.measure} < {b_target}")
    return a_set, b_set
