import math

import numpy as np
import pytest

from qri import (
    BandwidthPolicy,
    ConfigurationError,
    DegenerateWindow,
    Diagnostics,
    DistributionSpec,
    NegativeIncome,
    NonFiniteIncome,
    NonIntegerBlockBoundary,
    ProbabilityOutOfRange,
    QriEstimate,
    SeededRng,
    SortedSample,
    TooFewObservations,
    ZeroMassTooLarge,
    cov_r_hat,
    difference_z,
    equi_partition,
    exact_i,
    exact_ik,
    i_hat_grid,
    ik_hat_grid,
    ingest,
    lognormal_I,
    make_partition,
    quantile_density_hat,
    quantile_type8,
    r_hat,
    sample,
    sample_with,
    true_R,
)

QUARTILE = make_partition([0.25])


class TestIngest:
    def test_sorts_and_freezes(self) -> None:
        s = ingest([3.0, 1.0, 2.0])
        assert s.values.tolist() == [1.0, 2.0, 3.0]
        assert not s.values.flags.writeable
        with pytest.raises(ValueError, match="read-only"):
            s.values[0] = 5.0

    def test_copies_input(self) -> None:
        raw = np.asarray([2.0, 1.0, 4.0])
        _ = ingest(raw)
        assert raw.tolist() == [2.0, 1.0, 4.0]

    def test_length_and_zero_fraction(self) -> None:
        s = ingest([0, 1, 2])
        assert len(s) == s.n == 3
        assert s.zero_fraction == pytest.approx(1 / 3)

    @pytest.mark.parametrize("bad", [math.nan, math.inf, -math.inf])
    def test_non_finite_rejected(self, bad: float) -> None:
        with pytest.raises(NonFiniteIncome):
            _ = ingest([1.0, bad, 2.0])

    @pytest.mark.parametrize("values", [[], [1.0]])
    def test_too_few_rejected(self, values: list[float]) -> None:
        with pytest.raises(TooFewObservations):
            _ = ingest(values)

    def test_negative_rejected(self) -> None:
        with pytest.raises(NegativeIncome, match="negative income"):
            _ = ingest([-1.0, 2.0, 3.0])

    def test_half_zeros_rejected(self) -> None:
        with pytest.raises(ZeroMassTooLarge):
            _ = ingest([0.0, 0.0, 1.0, 2.0])


class TestQuantileType8:
    def test_median_of_four(self) -> None:
        assert quantile_type8(ingest([1, 2, 3, 4]), 0.5) == 2.5

    @pytest.mark.parametrize(("p", "expected"), [(0.0, 1.0), (1.0, 4.0)])
    def test_extremes(self, p: float, expected: float) -> None:
        assert quantile_type8(ingest([4, 1, 3, 2]), p) == expected

    def test_matches_numpy_median_unbiased(
        self, lognormal_sample: SortedSample
    ) -> None:
        for p in (0.01, 0.05, 0.25, 0.5, 0.8, 0.99):
            expected = float(
                np.quantile(lognormal_sample.values, p, method="median_unbiased")
            )
            assert quantile_type8(lognormal_sample, p) == pytest.approx(
                expected, rel=1e-12
            )

    @pytest.mark.parametrize("p", [-0.01, 1.01])
    def test_out_of_range(self, p: float) -> None:
        with pytest.raises(ProbabilityOutOfRange):
            _ = quantile_type8(ingest([1, 2, 3]), p)


class TestBandwidthPolicy:
    def test_default_bandwidth(self) -> None:
        assert BandwidthPolicy().bandwidth(32) == pytest.approx(0.25)

    def test_coefficient_scales(self) -> None:
        assert BandwidthPolicy(coefficient=1.0).bandwidth(32) == pytest.approx(0.5)

    @pytest.mark.parametrize("coefficient", [0.0, -1.0, math.nan])
    def test_invalid_coefficient(self, coefficient: float) -> None:
        with pytest.raises(ConfigurationError):
            _ = BandwidthPolicy(coefficient=coefficient)

    def test_invalid_edge(self) -> None:
        with pytest.raises(ConfigurationError, match="edge mode"):
            _ = BandwidthPolicy(edge="both")  # pyright: ignore[reportArgumentType]

    def test_invalid_window(self) -> None:
        with pytest.raises(ConfigurationError, match="window scaling"):
            _ = BandwidthPolicy(window="wide")  # pyright: ignore[reportArgumentType]

    def test_local_half_widths_narrow_in_tails(self) -> None:
        p = np.asarray([0.5, 0.25, 0.75, 0.01])
        # h = 0.25 at n = 32; the floor is 2/33
        assert BandwidthPolicy().half_widths(32, p).tolist() == pytest.approx(
            [0.25, 0.125, 0.125, 2 / 33]
        )

    def test_fixed_half_widths(self) -> None:
        p = np.asarray([0.5, 0.01])
        policy = BandwidthPolicy(window="fixed")
        assert policy.half_widths(32, p).tolist() == pytest.approx([0.25, 0.25])

    def test_local_window_tightens_heavy_tail_se(self) -> None:
        s = ingest(sample(DistributionSpec.pareto2(2.0), 1000, SeededRng(8)))
        local = i_hat_grid(s).se
        fixed = i_hat_grid(s, policy=BandwidthPolicy(window="fixed")).se
        assert local is not None
        assert fixed is not None
        assert local < fixed


class TestQuantileDensity:
    def test_linear_quantiles(self, evenly_spaced: SortedSample) -> None:
        # Q(p) = (n + 1/3) p + 1/3 inside the sample
        assert quantile_density_hat(evenly_spaced, 0.5, 0.1) == pytest.approx(
            100 + 1 / 3, rel=1e-9
        )

    def test_window_clipped_near_edge(self, evenly_spaced: SortedSample) -> None:
        assert quantile_density_hat(evenly_spaced, 0.02, 0.1) == pytest.approx(
            100 + 1 / 3, rel=1e-9
        )

    def test_degenerate_window(self, evenly_spaced: SortedSample) -> None:
        with pytest.raises(DegenerateWindow):
            _ = quantile_density_hat(evenly_spaced, 1 / 101, 0.1)

    def test_uniform_density_is_one(self) -> None:
        s = ingest(sample(DistributionSpec.beta(1.0, 1.0), 10_000, SeededRng(3)))
        assert quantile_density_hat(s, 0.5, 0.1) == pytest.approx(1.0, rel=0.1)

    def test_exponential_density_at_median(self) -> None:
        s = ingest(sample(DistributionSpec.exponential(1.0), 10_000, SeededRng(4)))
        # q(p) = 1 / (1 - p)
        assert quantile_density_hat(s, 0.5, 0.1) == pytest.approx(2.0, rel=0.1)

    @pytest.mark.parametrize("p", [0.0, 1.0])
    def test_out_of_range(self, evenly_spaced: SortedSample, p: float) -> None:
        with pytest.raises(ProbabilityOutOfRange):
            _ = quantile_density_hat(evenly_spaced, p, 0.1)


class TestRatioEstimate:
    def test_constant_sample(self) -> None:
        s = ingest([5.0] * 10)
        assert r_hat(s, 0.3) == 1.0

    def test_whole_range_is_one(self) -> None:
        assert r_hat(ingest([1, 2, 3, 4]), 1.0) == 1.0

    def test_ratio_of_type8_quantiles(self, evenly_spaced: SortedSample) -> None:
        expected = quantile_type8(evenly_spaced, 0.25) / quantile_type8(
            evenly_spaced, 0.75
        )
        assert r_hat(evenly_spaced, 0.5) == pytest.approx(expected)

    def test_large_lognormal_sample(self) -> None:
        d = DistributionSpec.lognormal(0.0, 1.0)
        s = ingest(sample(d, 100_000, SeededRng(5)))
        assert r_hat(s, 0.5) == pytest.approx(true_R(d, 0.5), abs=0.01)

    @pytest.mark.parametrize("p", [0.0, 1.5])
    def test_out_of_range(self, p: float) -> None:
        with pytest.raises(ProbabilityOutOfRange):
            _ = r_hat(ingest([1, 2, 3]), p)


class TestCovariance:
    def test_symmetric(self, lognormal_sample: SortedSample) -> None:
        assert cov_r_hat(lognormal_sample, 0.3, 0.7) == pytest.approx(
            cov_r_hat(lognormal_sample, 0.7, 0.3), rel=1e-12
        )

    def test_variance_nonnegative(self, lognormal_sample: SortedSample) -> None:
        diagnostics = Diagnostics()
        variance = cov_r_hat(lognormal_sample, 0.5, 0.5, diagnostics=diagnostics)
        assert variance >= 0
        assert diagnostics.variance_clamps == 0

    def test_constant_sample_has_zero_variance(self) -> None:
        assert cov_r_hat(ingest([2.0] * 30), 0.4, 0.4) == 0.0

    def test_out_of_range(self, lognormal_sample: SortedSample) -> None:
        with pytest.raises(ProbabilityOutOfRange):
            _ = cov_r_hat(lognormal_sample, 0.0, 0.5)

    def test_variance_matches_monte_carlo(self) -> None:
        d = DistributionSpec.lognormal(0.0, 1.0)
        generator = SeededRng(6).generator()
        ratios: list[float] = []
        variances: list[float] = []
        for _ in range(800):
            s = ingest(sample_with(d, 1000, generator))
            ratios.append(r_hat(s, 0.5))
            variances.append(cov_r_hat(s, 0.5, 0.5))
        ratio = float(np.mean(variances)) / float(np.var(ratios, ddof=1))
        assert 0.8 <= ratio <= 1.25


class TestGridEstimator:
    def test_lognormal_estimate(self, lognormal_sample: SortedSample) -> None:
        estimate = i_hat_grid(lognormal_sample)
        assert estimate.value == pytest.approx(lognormal_I(1.0), abs=0.05)
        assert estimate.se is not None
        assert estimate.se > 0
        assert estimate.ci_low is not None
        assert estimate.ci_high is not None
        assert estimate.ci_low < estimate.value < estimate.ci_high
        assert estimate.method == "grid"
        assert estimate.grid_size == 100

    def test_constant_sample(self) -> None:
        estimate = i_hat_grid(ingest([7.0] * 25))
        assert estimate.value == 0.0
        assert estimate.se == 0.0
        assert estimate.ci_low == 0.0
        assert estimate.ci_high == 0.0

    def test_interval_width_follows_alpha(self, lognormal_sample: SortedSample) -> None:
        wide = i_hat_grid(lognormal_sample, alpha=0.01)
        narrow = i_hat_grid(lognormal_sample, alpha=0.2)
        assert wide.raw_high is not None
        assert narrow.raw_high is not None
        assert wide.raw_high - wide.value > narrow.raw_high - narrow.value

    def test_grid_stability(self, lognormal_sample: SortedSample) -> None:
        coarse = i_hat_grid(lognormal_sample, grid_size=50).value
        fine = i_hat_grid(lognormal_sample, grid_size=200).value
        assert abs(coarse - fine) <= 0.005

    def test_small_sample_with_shifted_windows(self) -> None:
        s = ingest(sample(DistributionSpec.exponential(1.0), 20, SeededRng(1)))
        estimate = i_hat_grid(s)
        assert 0.0 <= estimate.value <= 1.0

    @pytest.mark.parametrize(
        ("grid_size", "alpha"),
        [
            pytest.param(1, 0.05, id="grid_too_small"),
            pytest.param(100, 0.0, id="alpha_zero"),
            pytest.param(100, 1.0, id="alpha_one"),
        ],
    )
    def test_invalid_run(self, grid_size: int, alpha: float) -> None:
        with pytest.raises(ConfigurationError):
            _ = i_hat_grid(ingest([1, 2, 3, 4]), grid_size=grid_size, alpha=alpha)


class TestGridDecomposition:
    def test_components_decrease(self, lognormal_sample: SortedSample) -> None:
        estimate = ik_hat_grid(lognormal_sample, make_partition([0.2, 0.4]))
        values = [c.value for c in estimate.components]
        assert values == sorted(values, reverse=True)
        assert all(0.0 <= v <= 1.0 for v in values)

    def test_equi_components_average_to_finer_grid(
        self, lognormal_sample: SortedSample
    ) -> None:
        estimate = ik_hat_grid(lognormal_sample, equi_partition(4), grid_size=25)
        average = sum(c.value for c in estimate.components) / 4
        assert average == pytest.approx(
            i_hat_grid(lognormal_sample, grid_size=100).value, abs=1e-12
        )

    def test_total_is_grid_estimate(self, lognormal_sample: SortedSample) -> None:
        estimate = ik_hat_grid(lognormal_sample, QUARTILE, grid_size=40)
        assert estimate.total == i_hat_grid(lognormal_sample, grid_size=40)

    def test_contributions_and_shares(self, lognormal_sample: SortedSample) -> None:
        estimate = ik_hat_grid(lognormal_sample, QUARTILE)
        assert list(estimate.contributions) == pytest.approx(
            [0.5 * c.value for c in estimate.components]
        )
        assert sum(estimate.shares) == pytest.approx(1.0)

    def test_as_dict(self, lognormal_sample: SortedSample) -> None:
        report = ik_hat_grid(lognormal_sample, QUARTILE).as_dict()
        assert report["method"] == "grid"
        assert report["cuts"] == [0.0, 0.25, 0.5]
        assert [c["k"] for c in report["components"]] == [1, 2]
        assert report["block_sizes"] is None


class TestExactEstimator:
    def test_four_values(self) -> None:
        assert exact_i(ingest([1, 2, 3, 4])).value == pytest.approx(13 / 24)

    def test_odd_sample_skips_middle(self) -> None:
        assert exact_i(ingest([1, 2, 3, 4, 5])).value == pytest.approx(0.52)

    def test_no_interval_without_se(self) -> None:
        estimate = exact_i(ingest([1, 2, 3, 4]))
        assert estimate.se is None
        assert estimate.ci_low is None
        with pytest.raises(ConfigurationError, match="no confidence interval"):
            _ = estimate.covers(0.5)

    def test_borrowed_se(self, lognormal_sample: SortedSample) -> None:
        estimate = exact_i(lognormal_sample, with_se=True)
        grid = i_hat_grid(lognormal_sample)
        assert estimate.se == grid.se
        assert estimate.se_borrowed
        assert estimate.method == "exact"
        assert estimate.raw_low is not None
        assert estimate.raw_high is not None
        assert (estimate.raw_low + estimate.raw_high) / 2 == pytest.approx(
            estimate.value
        )

    def test_close_to_grid(self, lognormal_sample: SortedSample) -> None:
        exact = exact_i(lognormal_sample).value
        assert exact == pytest.approx(i_hat_grid(lognormal_sample).value, abs=0.01)


class TestExactDecomposition:
    def test_block_means(self) -> None:
        estimate = exact_ik(ingest(range(1, 9)), QUARTILE)
        assert estimate.block_sizes == (2, 2)
        assert [c.value for c in estimate.components] == pytest.approx(
            [(7 / 8 + 5 / 7) / 2, (1 / 2 + 1 / 5) / 2]
        )

    def test_weighted_blocks_give_total(self) -> None:
        s = ingest(sample(DistributionSpec.weibull(2.0), 200, SeededRng(9)))
        estimate = exact_ik(s, make_partition([0.1, 0.25, 0.4]))
        assert estimate.block_sizes is not None
        weighted = sum(
            2 * m / s.n * c.value
            for m, c in zip(estimate.block_sizes, estimate.components, strict=True)
        )
        assert weighted == pytest.approx(estimate.total.value, abs=1e-12)
        assert estimate.total.value == pytest.approx(exact_i(s).value, abs=1e-15)

    def test_non_integer_boundary(self) -> None:
        with pytest.raises(NonIntegerBlockBoundary) as excinfo:
            _ = exact_ik(ingest(range(1, 11)), QUARTILE)
        assert excinfo.value.boundary == pytest.approx(2.5)

    def test_odd_sample_has_no_integer_midpoint(self) -> None:
        with pytest.raises(NonIntegerBlockBoundary):
            _ = exact_ik(ingest(range(1, 10)), make_partition([]))

    def test_borrowed_component_se(self, lognormal_sample: SortedSample) -> None:
        estimate = exact_ik(lognormal_sample, QUARTILE, with_se=True)
        grid = ik_hat_grid(lognormal_sample, QUARTILE)
        assert [c.se for c in estimate.components] == [c.se for c in grid.components]
        assert all(c.se_borrowed for c in estimate.components)


class TestQriEstimate:
    def test_interval_clipped_for_display(self) -> None:
        estimate = QriEstimate(
            value=0.98, se=0.05, raw_low=0.88, raw_high=1.08, alpha=0.05, method="grid"
        )
        assert estimate.ci_high == 1.0
        assert estimate.raw_high == 1.08
        assert estimate.covers(1.05)
        assert not estimate.covers(0.8)

    def test_as_dict(self) -> None:
        estimate = QriEstimate(
            value=0.5, se=0.1, raw_low=-0.1, raw_high=0.7, alpha=0.05, method="grid"
        )
        report = estimate.as_dict()
        assert report["ci_low"] == 0.0
        assert report["raw_ci_low"] == -0.1
        assert report["se_borrowed"] is False


class TestDifferenceZ:
    def _estimate(self, value: float, se: float | None) -> QriEstimate:
        return QriEstimate(
            value=value, se=se, raw_low=None, raw_high=None, alpha=0.05, method="grid"
        )

    def test_standardized_gap(self) -> None:
        z = difference_z(self._estimate(0.5, 0.03), self._estimate(0.54, 0.04))
        assert z == pytest.approx(0.8)

    def test_zero_scale(self) -> None:
        assert difference_z(self._estimate(0.5, 0.0), self._estimate(0.5, 0.0)) == 0.0
        assert math.isinf(
            difference_z(self._estimate(0.5, 0.0), self._estimate(0.6, 0.0))
        )

    def test_needs_standard_errors(self) -> None:
        with pytest.raises(ConfigurationError):
            _ = difference_z(self._estimate(0.5, None), self._estimate(0.5, 0.1))
