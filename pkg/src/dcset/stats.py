"""Statistical test batteries for the simulators and selectors.

Every test is a deterministic function of its seed and parameters and returns
a TestReport whose `passed` flag means "statistic below threshold".  Expected
failures (a counterexample being told apart from the pure sample, say) are
asserted by the caller reading `passed` as False; the tests themselves never
flip their own semantics.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.stats import chi2 as _chi2_dist

from .errors import BadParameter, SparseTable, TooFewSamples
from .generators import (
    REVEAL_CUT,
    STATS_DOMAIN,
    Enumeration,
    RevealingSelectors,
    Seed,
    counterexample_mix,
    gaussian_walk,
    poisson_on_cantor,
    sample_uniform,
)
from .grid_measure import CyclicShift, FatCantor, cyclic_shift_points
from .selector import SelectorTable

__all__ = [
    "TestReport",
    "ShiftHitCurve",
    "ks_uniform",
    "chi_square_independence",
    "two_sample_test",
    "count_in",
    "fragment_independence_test",
    "stationarity_test",
    "distinguish_counterexample",
    "shift_hit_curve",
    "nonsingularity_diagnostic",
    "event_reconstruction_check",
    "dyadic_rationals",
]


@dataclass(frozen=True)
class TestReport:
    """Outcome of one statistical check; `passed` iff statistic below threshold."""

    name: str
    statistic: float
    threshold: float
    level: float
    passed: bool
    replicas: int | None = None
    seed: int | None = None
    details: dict = field(default_factory=dict)

    @property
    def rejected(self) -> bool:
        return not self.passed


def ks_uniform(values, level: float = 0.01, seed: int | None = None) -> TestReport:
    """One-sample Kolmogorov-Smirnov test against the uniform law on (0,1).

    Uses the asymptotic critical value c(level)/sqrt(N) with
    c(a) = sqrt(ln(2/a)/2).
    """
    xs = np.sort(np.asarray(values, dtype=float))
    n = xs.size
    if n < 20:
        raise TooFewSamples(f"KS needs >= 20 values, got {n}")
    grid = np.arange(1, n + 1) / n
    statistic = float(max((grid - xs).max(), (xs - (grid - 1 / n)).max()))
    threshold = math.sqrt(math.log(2 / level) / 2) / math.sqrt(n)
    return TestReport(
        name="ks-uniform",
        statistic=statistic,
        threshold=threshold,
        level=level,
        passed=statistic < threshold,
        replicas=n,
        seed=seed,
    )


def chi_square_independence(
    x_bins, y_bins, rows: int, cols: int, level: float = 0.01, seed: int | None = None
) -> TestReport:
    """Pearson independence test on a rows-by-cols contingency table."""
    x = np.asarray(x_bins, dtype=np.int64)
    y = np.asarray(y_bins, dtype=np.int64)
    if x.shape != y.shape:
        raise BadParameter("paired categorical lists must have equal length")
    if rows < 2 or cols < 2:
        raise BadParameter("independence needs at least a 2x2 table")
    table = np.zeros((rows, cols))
    np.add.at(table, (x, y), 1)
    n = table.sum()
    expected = np.outer(table.sum(axis=1), table.sum(axis=0)) / n
    if (expected < 5).any():
        raise SparseTable(
            f"minimum expected cell count {expected.min():.3g} below 5"
        )
    statistic = float(((table - expected) ** 2 / expected).sum())
    df = (rows - 1) * (cols - 1)
    threshold = float(_chi2_dist.ppf(1 - level, df))
    return TestReport(
        name="chi-square-independence",
        statistic=statistic,
        threshold=threshold,
        level=level,
        passed=statistic < threshold,
        replicas=int(n),
        seed=seed,
        details={"df": df},
    )


def _bucket_labels(pooled: np.ndarray, min_pooled: int) -> tuple[np.ndarray, int]:
    """Deterministic bucketing of pooled values: distinct values (or pooled
    quantiles when there are many), greedily merged left to right until each
    bucket holds at least `min_pooled` pooled observations."""
    uniq = np.unique(pooled)
    if uniq.size > 24:
        qs = np.quantile(pooled, np.linspace(0, 1, 13)[1:-1], method="lower")
        uniq = np.unique(qs)
    raw = np.searchsorted(uniq, pooled, side="right")
    counts = np.bincount(raw, minlength=uniq.size + 1)
    merged_of_raw = np.zeros(counts.size, dtype=np.int64)
    bucket, acc = 0, 0
    for k, c in enumerate(counts):
        merged_of_raw[k] = bucket
        acc += c
        if acc >= min_pooled:
            bucket += 1
            acc = 0
    if acc:  # fold a light tail into the previous bucket
        merged_of_raw[merged_of_raw == bucket] = max(bucket - 1, 0)
    n_buckets = int(merged_of_raw.max()) + 1
    return merged_of_raw[raw], n_buckets


def two_sample_test(
    xs, ys, level: float = 0.01, seed: int | None = None, name: str = "two-sample"
) -> TestReport:
    """Chi-square homogeneity test of two samples over deterministic buckets."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.size < 10 or ys.size < 10:
        raise TooFewSamples("two-sample test needs >= 10 values per arm")
    pooled = np.concatenate([xs, ys])
    min_pooled = max(10, math.ceil(5 * pooled.size / min(xs.size, ys.size)))
    labels, n_buckets = _bucket_labels(pooled, min_pooled)
    if n_buckets < 2:
        return TestReport(
            name=name,
            statistic=0.0,
            threshold=float(_chi2_dist.ppf(1 - level, 1)),
            level=level,
            passed=True,
            replicas=int(pooled.size),
            seed=seed,
            details={"buckets": 1, "note": "single bucket; arms indistinguishable"},
        )
    table = np.zeros((2, n_buckets))
    np.add.at(table, (0, labels[: xs.size]), 1)
    np.add.at(table, (1, labels[xs.size :]), 1)
    expected = np.outer(table.sum(axis=1), table.sum(axis=0)) / pooled.size
    statistic = float(((table - expected) ** 2 / expected).sum())
    df = n_buckets - 1
    threshold = float(_chi2_dist.ppf(1 - level, df))
    return TestReport(
        name=name,
        statistic=statistic,
        threshold=threshold,
        level=level,
        passed=statistic < threshold,
        replicas=int(pooled.size),
        seed=seed,
        details={"buckets": n_buckets, "df": df},
    )


def _replica_map(fn: Callable[[int], object], count: int, jobs: int) -> list:
    """Order-preserving per-replica map; deterministic for any job count."""
    if jobs <= 1:
        return [fn(r) for r in range(count)]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, range(count)))


def count_in(region) -> Callable[[np.ndarray], float]:
    """Observable factory: number of points falling in a BinSet or FatCantor."""

    def observe(points: np.ndarray) -> float:
        pts = np.asarray(points, dtype=float)
        if not pts.size:
            return 0.0
        return float(region.contains_points(pts).sum())

    return observe


def _sample_fragment_category(rng, lo: float, hi: float, frag_points: int) -> int:
    pts = lo + (hi - lo) * rng.uniform(size=frag_points)
    count = int((pts < (lo + hi) / 2).sum())
    if count <= frag_points // 2 - 1:
        return 0
    if count == frag_points // 2:
        return 1
    return 2


def _walk_fragment_category(walk_values: np.ndarray, steps: int, lo: float, hi: float) -> int:
    # Strict minima whose detection pattern uses increments inside [lo, hi] only.
    k_lo = max(1, math.ceil(lo * steps) + 1)
    k_hi = min(steps - 1, math.floor(hi * steps) - 1)
    if k_hi < k_lo:
        return 0
    ks = np.arange(k_lo, k_hi + 1)
    v = walk_values
    pattern = (v[ks - 1] > v[ks]) & (v[ks] < v[ks + 1])
    candidates = ks[pattern]
    if not candidates.size:
        return 0
    deepest = candidates[np.argmin(v[candidates])]
    relative = (deepest / steps - lo) / (hi - lo)
    return 0 if relative < 0.5 else 1


def fragment_independence_test(
    kind: str,
    cuts: Sequence[float],
    replicas: int,
    seed: int,
    level: float = 0.01,
    frag_points: int = 4,
    steps: int = 2048,
) -> TestReport:
    """Independence of bounded per-fragment observables across a partition.

    For the sample, each fragment is realized by its own substream (the
    fragments of an infinite sample are independent sets; fixed-depth counts
    of one global sample are not, since they sum to the depth) and the
    observable is the capped count of the fragment's first points in its left
    half.  For walks the observable is the coarse position of the deepest
    strict local minimum detected from increments inside the fragment.
    """
    cuts = [float(c) for c in cuts]
    if len(cuts) < 3:
        raise BadParameter("need at least two fragments")
    if cuts[0] != 0.0 or cuts[-1] != 1.0 or any(a >= b for a, b in zip(cuts, cuts[1:])):
        raise BadParameter("cuts must increase strictly from 0 to 1")
    if kind not in ("sample", "walk"):
        raise BadParameter(f"unknown fragment kind {kind!r}")

    fragments = list(zip(cuts, cuts[1:]))
    categories = 3 if kind == "sample" else 2
    obs = np.zeros((len(fragments), replicas), dtype=np.int64)
    for r in range(replicas):
        base = Seed(seed, r)
        if kind == "walk":
            walk = gaussian_walk(steps, base)
        for f, (lo, hi) in enumerate(fragments):
            if kind == "sample":
                rng = base.stream(STATS_DOMAIN, 10 + f)
                obs[f, r] = _sample_fragment_category(rng, lo, hi, frag_points)
            else:
                obs[f, r] = _walk_fragment_category(walk.values, steps, lo, hi)

    pair_reports = {}
    worst = None
    for i in range(len(fragments)):
        for j in range(i + 1, len(fragments)):
            rep = chi_square_independence(
                obs[i], obs[j], categories, categories, level, seed
            )
            pair_reports[f"{i}-{j}"] = rep.statistic
            if worst is None or rep.statistic > worst.statistic:
                worst = rep
    return TestReport(
        name=f"fragment-independence-{kind}",
        statistic=worst.statistic,
        threshold=worst.threshold,
        level=level,
        passed=all(v < worst.threshold for v in pair_reports.values()),
        replicas=replicas,
        seed=seed,
        details={"pairs": pair_reports, "df": worst.details["df"]},
    )


def stationarity_test(
    make: Callable[[Seed], Enumeration],
    observable: Callable[[np.ndarray], float],
    replicas: int,
    seed: int,
    level: float = 0.01,
    jobs: int = 1,
) -> TestReport:
    """Two-sample comparison of an observable on X versus on a freshly shifted X.

    The second arm uses independent replicas and one fresh uniform shift per
    replica; a stationary construction produces identically distributed arms.
    """
    if replicas < 10:
        raise TooFewSamples("stationarity test needs >= 10 replicas per arm")

    def one(r: int) -> tuple[float, float]:
        plain_obs = observable(make(Seed(seed, r)).points)
        twin = Seed(seed, replicas + r)
        s = float(twin.stream(STATS_DOMAIN, 0).uniform())
        moved = cyclic_shift_points(CyclicShift(s), make(twin).points.tolist())
        return plain_obs, observable(np.array(moved))

    pairs = _replica_map(one, replicas, jobs)
    plain = np.array([p for p, _ in pairs])
    shifted = np.array([q for _, q in pairs])
    report = two_sample_test(plain, shifted, level, seed, name="stationarity")
    report.details["mean_plain"] = float(plain.mean())
    report.details["mean_shifted"] = float(shifted.mean())
    return report


def distinguish_counterexample(
    cantor: FatCantor, depth: int, replicas: int, seed: int, level: float = 1e-6,
    jobs: int = 1,
) -> TestReport:
    """Count-in-C statistic separating the pure sample from the mixed set.

    The sample arm has mean depth * mes C, the mixed arm mean mes C, so the
    homogeneity test is expected to reject (`passed` False) decisively.
    """

    def one(r: int) -> tuple[float, float]:
        if depth == 0:
            return 0.0, float(len(poisson_on_cantor(cantor, Seed(seed, r))))
        return (
            float(sample_uniform(depth, Seed(seed, r)).count_in(cantor)),
            float(counterexample_mix(depth, cantor, Seed(seed, r)).count_in(cantor)),
        )

    pairs = _replica_map(one, replicas, jobs)
    xs = np.array([p for p, _ in pairs])
    ys = np.array([q for _, q in pairs])
    report = two_sample_test(xs, ys, level, seed, name="distinguish-counterexample")
    report.details["mean_sample"] = float(xs.mean())
    report.details["mean_counterexample"] = float(ys.mean())
    return report


def dyadic_rationals(count: int) -> np.ndarray:
    """First `count` dyadic rationals of (0,1), enumerated level by level."""
    out: list[float] = []
    level = 1
    while len(out) < count:
        out.extend(k / 2**level for k in range(1, 2**level, 2))
        level += 1
    return np.array(out[:count])


@dataclass(frozen=True)
class ShiftHitCurve:
    """Hit counts of shifted dyadic prefixes against a fixed region."""

    depths: tuple
    means: tuple
    medians: tuple
    expected: tuple
    shifts: int
    seed: int

    @property
    def medians_nondecreasing(self) -> bool:
        return all(a <= b for a, b in zip(self.medians, self.medians[1:]))


def shift_hit_curve(region, depths: Sequence[int], shifts: int, seed: int) -> ShiftHitCurve:
    """Counts |{l in L_D : T_s(l) in A}| over random shifts s, per depth.

    By averaging over the uniform shift, the expected count equals
    D * mes(region) exactly; the curve grows without bound in D.
    """
    depths = sorted(int(d) for d in depths)
    if not depths or depths[0] < 1:
        raise BadParameter("depths must be positive")
    points = dyadic_rationals(depths[-1])
    ss = Seed(seed).stream(STATS_DOMAIN, 1).uniform(size=shifts)
    counts = np.zeros((shifts, len(depths)))
    for i, s in enumerate(ss):
        moved = points + s
        moved = np.where(moved >= 1.0, moved - 1.0, moved)
        ok = (moved > 0.0) & (moved < 1.0)  # the single undefined point drops out
        hits = np.zeros(points.size, dtype=bool)
        hits[ok] = region.contains_points(moved[ok])
        prefix = np.cumsum(hits)
        counts[i] = [prefix[d - 1] for d in depths]
    measure = float(region.measure)
    return ShiftHitCurve(
        depths=tuple(depths),
        means=tuple(float(c) for c in counts.mean(axis=0)),
        medians=tuple(float(c) for c in np.median(counts, axis=0)),
        expected=tuple(measure * d for d in depths),
        shifts=shifts,
        seed=seed,
    )


def nonsingularity_diagnostic(
    y_table: SelectorTable,
    z_table: SelectorTable,
    half_threshold: float = 0.5,
    resolution: int = 8,
    ratio_cap: float = 4.0,
    floor: float | None = None,
    min_samples: int | None = None,
    seed: int | None = None,
) -> TestReport:
    """Empirical absolute-continuity proxy for a selector pair within an event.

    Restricted to replicas with Y below the threshold, the joint histogram of
    (Y, Z) bins is compared cell-wise against the product of marginals: a cell
    is flagged when its joint mass exceeds `ratio_cap` times the product mass
    (the product floored at `floor`, default 1/(4 r^2), to stabilize thin
    marginals).  Joint mass concentrating on a thin set flags; any pair with a
    bounded joint density passes.  A proxy, not a proof.
    """
    y = np.asarray(y_table.values, dtype=float)
    z = np.asarray(z_table.values, dtype=float)
    if y.shape != z.shape:
        raise BadParameter("selector tables must share the ensemble")
    keep = y < half_threshold
    n_kept = int(keep.sum())
    required = min_samples if min_samples is not None else 4 * resolution * resolution
    if n_kept < required:
        raise TooFewSamples(f"only {n_kept} replicas below the threshold; need {required}")
    if floor is None:
        floor = 1.0 / (4 * resolution * resolution)

    yk = np.clip((y[keep] / half_threshold * resolution).astype(int), 0, resolution - 1)
    zk = np.clip((z[keep] * resolution).astype(int), 0, resolution - 1)
    joint = np.zeros((resolution, resolution))
    np.add.at(joint, (yk, zk), 1)
    joint /= n_kept
    product = np.outer(joint.sum(axis=1), joint.sum(axis=0))
    ratios = np.where(joint > 0, joint / np.maximum(product, floor), 0.0)
    statistic = float(ratios.max())
    flagged = [
        (int(i), int(j))
        for i, j in zip(*np.nonzero(ratios > ratio_cap))
    ]
    return TestReport(
        name="nonsingularity-diagnostic",
        statistic=statistic,
        threshold=float(ratio_cap),
        level=0.0,
        passed=not flagged,
        replicas=n_kept,
        seed=seed,
        details={"flagged_cells": flagged, "floor": floor},
    )


def event_reconstruction_check(
    families: RevealingSelectors | Sequence[RevealingSelectors],
    seed: int | None = None,
) -> TestReport:
    """Sure-event check: every driving event equals {selector value < 1/4}."""
    if isinstance(families, RevealingSelectors):
        families = [families]
    total = 0
    mismatches = 0
    for fam in families:
        reconstructed = fam.chosen.points < REVEAL_CUT
        mismatches += int((reconstructed != fam.events).sum())
        total += len(fam.chosen)
    rate = 1.0 if total == 0 else 1.0 - mismatches / total
    threshold = 1.0 if total == 0 else 1.0 / (2 * total)
    statistic = 0.0 if total == 0 else mismatches / total
    return TestReport(
        name="event-reconstruction",
        statistic=statistic,
        threshold=threshold,
        level=0.0,
        passed=statistic < threshold,
        replicas=len(families),
        seed=seed,
        details={"reconstruction_rate": rate, "pairs": total},
    )
