"""Simulator behavior: determinism, distributional laws, constructions."""

import math
from fractions import Fraction

import numpy as np
import pytest
from scipy.stats import chi2

from dcset import (
    BadParameter,
    BinSet,
    Enumeration,
    Seed,
    UnitGrid,
    WalkPath,
    brownian_minima,
    counterexample_mix,
    fat_cantor_build,
    fat_cantor_contains,
    gaussian_walk,
    intensity_estimate,
    poisson_on_cantor,
    revealing_selectors,
    sample_uniform,
    walk_minima,
)

CANTOR = fat_cantor_build(Fraction(1, 2), 10)


class TestSeed:
    def test_validation(self):
        with pytest.raises(BadParameter):
            Seed(-1)
        with pytest.raises(BadParameter):
            Seed(2**64)
        with pytest.raises(BadParameter):
            Seed(3, -1)

    def test_streams_differ_by_component_and_replica(self):
        a = Seed(5, 0).stream(0, 0).uniform(size=4)
        b = Seed(5, 0).stream(0, 1).uniform(size=4)
        c = Seed(5, 1).stream(0, 0).uniform(size=4)
        assert not np.array_equal(a, b)
        assert not np.array_equal(a, c)


class TestSampleUniform:
    def test_shape_and_domain(self):
        enum = sample_uniform(3, 7)
        assert len(enum) == 3 == enum.depth
        assert np.unique(enum.points).size == 3
        assert ((enum.points > 0) & (enum.points < 1)).all()

    def test_deterministic(self):
        assert np.array_equal(sample_uniform(64, 9).points, sample_uniform(64, 9).points)
        assert np.array_equal(
            sample_uniform(8, Seed(9, 2)).points, sample_uniform(8, Seed(9, 2)).points
        )

    def test_depth_zero_rejected(self):
        with pytest.raises(BadParameter):
            sample_uniform(0, 1)

    def test_expected_count_in_binset(self):
        # Binomial mean oracle: E[count in A] = depth * mes(A); Monte Carlo
        # over 1000 replicas must land within 3 standard errors.
        region = BinSet(UnitGrid(4), frozenset({0, 2}))
        depth, replicas = 50, 1000
        counts = [sample_uniform(depth, Seed(41, r)).count_in(region) for r in range(replicas)]
        expected = depth * 0.5
        se = math.sqrt(depth * 0.5 * 0.5 / replicas)
        assert abs(np.mean(counts) - expected) <= 3 * se

    def test_per_bin_chi_square_uniform(self):
        # Fixed-seed goodness of fit of pooled per-bin counts at level 0.01.
        grid = UnitGrid(8)
        pooled = np.zeros(8)
        for r in range(200):
            pooled += np.bincount(grid.bins(sample_uniform(40, Seed(42, r)).points), minlength=8)
        expected = pooled.sum() / 8
        statistic = float(((pooled - expected) ** 2 / expected).sum())
        assert statistic < chi2.ppf(0.99, 7)


class TestWalkMinima:
    def test_hand_example(self):
        path = WalkPath(steps=4, values=np.array([0.0, -1.0, 0.5, -0.2, 1.0]))
        assert walk_minima(path).points.tolist() == [0.25, 0.75]

    def test_monotone_path_has_none(self):
        path = WalkPath(steps=4, values=np.arange(5.0))
        assert len(walk_minima(path)) == 0

    def test_times_ascend_and_match_stored_path(self):
        enum = brownian_minima(500, 3)
        assert (np.diff(enum.points) > 0).all()
        path = gaussian_walk(500, 3)  # deterministic: same seed, same walk
        for t in enum.points:
            k = round(t * 500)
            assert path.values[k - 1] > path.values[k] < path.values[k + 1]

    def test_quarter_law_mean_count(self):
        # For a walk with independent continuous increments an interior time
        # is a strict local minimum iff the adjacent increments change sign
        # upward: probability 1/4, so the mean count is (K-1)/4.  Monte Carlo
        # over 200 replicas at K = 10^4 must sit within 2%.
        steps, replicas = 10**4, 200
        counts = [len(brownian_minima(steps, Seed(6, r))) for r in range(replicas)]
        expected = (steps - 1) / 4
        assert abs(np.mean(counts) - expected) <= 0.02 * expected

    def test_steps_validation(self):
        with pytest.raises(BadParameter):
            brownian_minima(2, 1)


class TestPoissonOnCantor:
    def test_membership_sure(self):
        for r in range(20):
            for t in poisson_on_cantor(CANTOR, Seed(8, r)):
                assert fat_cantor_contains(CANTOR, float(t))

    def test_poisson_mean(self):
        replicas = 4000
        counts = [len(poisson_on_cantor(CANTOR, Seed(13, r))) for r in range(replicas)]
        mean_c = float(CANTOR.measure)
        se = math.sqrt(mean_c / replicas)
        assert abs(np.mean(counts) - mean_c) <= 3 * se

    def test_empty_probability(self):
        # P(N = 0) = exp(-mes C), checked by Monte Carlo within 3 SE.
        replicas = 4000
        zero = np.mean([len(poisson_on_cantor(CANTOR, Seed(14, r))) == 0 for r in range(replicas)])
        p = math.exp(-float(CANTOR.measure))
        se = math.sqrt(p * (1 - p) / replicas)
        assert abs(zero - p) <= 3 * se

    def test_deterministic(self):
        assert np.array_equal(poisson_on_cantor(CANTOR, 77), poisson_on_cantor(CANTOR, 77))


class TestCounterexampleMix:
    def test_components_live_where_stated(self):
        for r in range(15):
            enum = counterexample_mix(30, CANTOR, Seed(21, r))
            for t, tag in zip(enum.points, enum.tags):
                inside = fat_cantor_contains(CANTOR, float(t))
                assert inside if tag == "poisson" else not inside

    def test_count_in_cantor_is_depth_free(self):
        # The mixed set charges C through its Poisson part only: mean mes C,
        # no matter the sample depth.  The pure sample would give depth*mes C.
        replicas = 600
        for depth in (20, 200):
            counts = [
                counterexample_mix(depth, CANTOR, Seed(22, r)).count_in(CANTOR)
                for r in range(replicas)
            ]
            mean_c = float(CANTOR.measure)
            se = math.sqrt(mean_c / replicas)
            assert abs(np.mean(counts) - mean_c) <= 4 * se

    def test_sample_contrast(self):
        depth, replicas = 100, 300
        counts = [sample_uniform(depth, Seed(23, r)).count_in(CANTOR) for r in range(replicas)]
        expected = depth * float(CANTOR.measure)
        se = math.sqrt(depth * 0.25 / replicas)
        assert abs(np.mean(counts) - expected) <= 4 * se

    def test_sample_part_size(self):
        enum = counterexample_mix(25, CANTOR, Seed(24))
        assert sum(1 for tag in enum.tags if tag == "sample") == 25


class TestIntensityEstimate:
    def test_uniform_sample_matches_binomial_mean(self):
        # Pr(Y_n in A) = mes A exactly, so the weighted sum has expectation
        # mes(A) * sum_{n<=D} 1/n^2.
        region = BinSet(UnitGrid(2), frozenset({0}))
        depth, replicas = 30, 1200
        estimate = intensity_estimate(
            lambda s: sample_uniform(depth, s), region, replicas, 31
        )
        exact = Fraction(1, 2) * sum(Fraction(1, n * n) for n in range(1, depth + 1))
        sd = 0.6  # generous bound on the per-replica standard deviation
        assert abs(float(estimate) - float(exact)) <= 3 * sd / math.sqrt(replicas)

    def test_empty_region_zero(self):
        region = UnitGrid(4).empty()
        assert intensity_estimate(lambda s: sample_uniform(5, s), region, 50, 1) == 0

    def test_mix_still_charges_cantor_heavy_bins(self):
        # Bins meeting C keep positive intensity through the Poisson part.
        region = BinSet(UnitGrid(4), frozenset({0}))
        estimate = intensity_estimate(
            lambda s: counterexample_mix(5, CANTOR, s), region, 400, 32
        )
        assert estimate > 0

    def test_exact_rational_average(self):
        est = intensity_estimate(lambda s: sample_uniform(3, s), UnitGrid(2).full(), 7, 2)
        # every point hits the full set: estimate is exactly 1 + 1/4 + 1/9
        assert est == Fraction(49, 36)


class TestRevealingSelectors:
    @pytest.mark.parametrize("seed", [0, 5, 91])
    def test_reconstruction_identity_sure(self, seed):
        fam = revealing_selectors(200, Seed(seed))
        assert np.array_equal(fam.events, fam.chosen.points < 0.25)

    def test_values_are_selector_values(self):
        fam = revealing_selectors(50, Seed(3))
        for k in range(50):
            assert fam.chosen.points[k] in (fam.low.points[k], fam.mid.points[k])

    def test_event_probability_half(self):
        # The driver is uniform on (1/2, 1) and the event threshold sits at
        # 3/4, the midpoint: probability exactly 1/2.
        events = np.concatenate(
            [revealing_selectors(100, Seed(35, r)).events for r in range(100)]
        )
        se = math.sqrt(0.25 / events.size)
        assert abs(events.mean() - 0.5) <= 3 * se

    def test_ranges(self):
        fam = revealing_selectors(40, Seed(4))
        assert ((fam.low.points > 0) & (fam.low.points < 0.25)).all()
        assert ((fam.mid.points > 0.25) & (fam.mid.points < 0.5)).all()
        assert ((fam.high.points > 0.5) & (fam.high.points < 1)).all()


class TestEnumerationType:
    def test_rejects_out_of_interval(self):
        with pytest.raises(BadParameter):
            Enumeration(np.array([0.0, 0.5]), depth=2, provenance="x")

    def test_rejects_duplicates(self):
        with pytest.raises(BadParameter):
            Enumeration(np.array([0.5, 0.5]), depth=2, provenance="x")

    def test_empty_is_fine(self):
        assert len(Enumeration(np.empty(0), depth=0, provenance="x")) == 0
