import math
from typing import TYPE_CHECKING

import pytest

from qri import (
    DESK_SCALE_FAMILIES,
    REFERENCE_FAMILIES,
    BandwidthPolicy,
    ConfigurationError,
    CoverageReport,
    DegenerateWindow,
    DistributionSpec,
    SeededRng,
    coverage_experiment,
    coverage_table,
    lognormal_I,
    lognormal_Ik,
    make_partition,
    resolve_workers,
)

if TYPE_CHECKING:
    from pytest_mock import MockerFixture

QUARTILE = make_partition([0.25])
LOGNORMAL = DistributionSpec.lognormal(0.0, 1.0)


class TestResolveWorkers:
    def test_explicit_value_wins(self, monkeypatch: pytest.MonkeyPatch) -> None:
        monkeypatch.setenv("QRI_THREADS", "8")
        assert resolve_workers(3) == 3

    def test_environment(self, monkeypatch: pytest.MonkeyPatch) -> None:
        monkeypatch.setenv("QRI_THREADS", "2")
        assert resolve_workers() == 2

    def test_cpu_count_fallback(
        self, monkeypatch: pytest.MonkeyPatch, mocker: "MockerFixture"
    ) -> None:
        monkeypatch.delenv("QRI_THREADS", raising=False)
        _ = mocker.patch("os.cpu_count", return_value=None)
        assert resolve_workers() == 1

    @pytest.mark.parametrize("raw", ["zero", "0", "-2"])
    def test_invalid_environment(
        self, monkeypatch: pytest.MonkeyPatch, raw: str
    ) -> None:
        monkeypatch.setenv("QRI_THREADS", raw)
        with pytest.raises(ConfigurationError, match="positive"):
            _ = resolve_workers()

    def test_invalid_explicit_value(self) -> None:
        with pytest.raises(ConfigurationError):
            _ = resolve_workers(0)


class TestCoverageExperiment:
    def _run(self, **kwargs: object) -> CoverageReport:
        options: dict[str, object] = {
            "d": LOGNORMAL,
            "n": 60,
            "partition": QUARTILE,
            "trials": 12,
            "grid_size": 20,
            "rng": SeededRng(7),
            "workers": 1,
        }
        options.update(kwargs)
        return coverage_experiment(**options)  # pyright: ignore[reportArgumentType]

    def test_report_shape(self) -> None:
        report = self._run()
        assert report.trials == 12
        assert len(report.per_component) == 2
        assert report.nominal == pytest.approx(0.95)
        assert report.failed_trials == 0
        for component in (*report.per_component, report.total):
            assert 0 <= component.hits <= 12
            assert component.coverage == component.hits / 12
            assert component.mean_width > 0

    def test_lognormal_targets_use_closed_form(self) -> None:
        report = self._run()
        targets = [c.true_value for c in report.per_component]
        assert targets == pytest.approx(lognormal_Ik(1.0, QUARTILE))
        assert report.total.true_value == pytest.approx(lognormal_I(1.0))

    def test_independent_of_worker_count(self) -> None:
        single = self._run(workers=1).as_dict()
        pooled = self._run(workers=4).as_dict()
        assert single == pooled

    def test_seed_changes_outcome(self) -> None:
        first = self._run(rng=SeededRng(1))
        second = self._run(rng=SeededRng(2))
        assert first.total.mean_width != second.total.mean_width

    def test_quadrature_targets(self) -> None:
        report = self._run(d=DistributionSpec.exponential(1.0), trials=4)
        assert report.total.true_value == pytest.approx(0.7016, abs=1e-3)

    def test_failed_trials_count_as_misses(
        self, mocker: "MockerFixture", log_messages: list[str]
    ) -> None:
        _ = mocker.patch(
            "qri._simulation.ik_hat_grid", side_effect=DegenerateWindow("empty")
        )
        report = self._run(trials=5)
        assert report.failed_trials == 5
        assert report.total.hits == 0
        assert report.total.coverage == 0.0
        assert math.isnan(report.total.mean_width)
        assert any("5 of 5 trials failed" in m for m in log_messages)

    def test_as_dict(self) -> None:
        report = self._run().as_dict()
        assert report["distribution"] == "lognormal:0,1"
        assert report["cuts"] == [0.0, 0.25, 0.5]
        assert report["seed"] == 7
        assert report["rng"] == "PCG64"
        assert len(report["per_component"]) == 2

    @pytest.mark.parametrize(
        "kwargs",
        [
            pytest.param({"n": 19}, id="sample_too_small"),
            pytest.param({"trials": 0}, id="no_trials"),
            pytest.param({"grid_size": 1}, id="grid_too_small"),
            pytest.param({"alpha": 1.0}, id="alpha_one"),
        ],
    )
    def test_invalid_configuration(self, kwargs: dict[str, object]) -> None:
        with pytest.raises(ConfigurationError):
            _ = self._run(**kwargs)


class TestCoverageTable:
    def test_columns_and_rows(self) -> None:
        families = {"Exp(1)": DistributionSpec.exponential(1.0), "Lognormal": LOGNORMAL}
        frame = coverage_table(
            QUARTILE, (30, 40), 3, families, grid_size=10, rng=SeededRng(3), workers=2
        )
        assert list(frame.columns) == [
            "family",
            "n",
            "I_1",
            "I_2",
            "I",
            "width_I",
            "failed_trials",
        ]
        assert frame["family"].tolist() == ["Exp(1)"] * 2 + ["Lognormal"] * 2
        assert frame["n"].tolist() == [30, 40, 30, 40]
        assert frame["I"].between(0.0, 1.0).all()

    def test_policy_reaches_every_cell(self) -> None:
        widths = [
            coverage_table(
                QUARTILE,
                (60,),
                3,
                {"Lognormal": LOGNORMAL},
                grid_size=10,
                rng=SeededRng(3),
                policy=BandwidthPolicy(coefficient=coefficient),
                workers=1,
            )["width_I"].iloc[0]
            for coefficient in (0.2, 1.0)
        ]
        assert widths[0] != widths[1]

    def test_reference_families(self) -> None:
        assert len(REFERENCE_FAMILIES) == 16
        assert set(DESK_SCALE_FAMILIES) <= set(REFERENCE_FAMILIES)


# Quartile-split coverage of I_1 and I_2 reported for the desk families,
# keyed by (family, n)
QUARTILE_COVERAGE: dict[tuple[str, int], tuple[float, float]] = {
    ("Lognormal", 100): (0.966, 0.960),
    ("Lognormal", 500): (0.970, 0.968),
    ("Lognormal", 1000): (0.955, 0.957),
    ("Beta(1,1)", 100): (0.943, 0.935),
    ("Beta(1,1)", 500): (0.953, 0.946),
    ("Beta(1,1)", 1000): (0.957, 0.952),
    ("ChiSq(4)", 100): (0.966, 0.959),
    ("ChiSq(4)", 500): (0.963, 0.955),
    ("ChiSq(4)", 1000): (0.960, 0.958),
    ("Pareto(2)", 100): (0.965, 0.976),
    ("Pareto(2)", 500): (0.962, 0.960),
    ("Pareto(2)", 1000): (0.954, 0.958),
    ("Exp(1)", 100): (0.956, 0.963),
    ("Exp(1)", 500): (0.945, 0.960),
    ("Exp(1)", 1000): (0.949, 0.962),
    ("Weibull(2)", 100): (0.959, 0.961),
    ("Weibull(2)", 500): (0.966, 0.953),
    ("Weibull(2)", 1000): (0.960, 0.957),
}


@pytest.mark.slow
class TestNominalCoverage:
    @pytest.mark.parametrize(
        ("family", "n"),
        list(QUARTILE_COVERAGE),
        ids=[f"{family}-{n}" for family, n in QUARTILE_COVERAGE],
    )
    def test_quartile_split(self, family: str, n: int) -> None:
        report = coverage_experiment(
            REFERENCE_FAMILIES[family], n, QUARTILE, 1000, rng=SeededRng(11)
        )
        coverages = [c.coverage for c in report.per_component]
        expected = list(QUARTILE_COVERAGE[family, n])
        assert coverages == pytest.approx(expected, abs=0.025)
        assert report.failed_trials == 0

    def test_lognormal_total(self) -> None:
        report = coverage_experiment(
            LOGNORMAL, 1000, QUARTILE, 1000, rng=SeededRng(11)
        )
        assert report.total.coverage == pytest.approx(0.95, abs=0.025)

    def test_exponential_quintile_split(self) -> None:
        report = coverage_experiment(
            DistributionSpec.exponential(1.0),
            500,
            make_partition([0.2, 0.4]),
            1000,
            rng=SeededRng(12),
        )
        coverages = [c.coverage for c in report.per_component]
        assert coverages == pytest.approx([0.960, 0.952, 0.947], abs=0.025)

    def test_u_shaped_beta_outer_band_with_fixed_window(self) -> None:
        # The outer band of Beta(0.1, 0.1) is over-covered at every n
        report = coverage_experiment(
            REFERENCE_FAMILIES["Beta(0.1,0.1)"],
            100,
            QUARTILE,
            1000,
            rng=SeededRng(13),
            policy=BandwidthPolicy(window="fixed"),
        )
        assert report.per_component[0].coverage == pytest.approx(1.0, abs=0.005)
