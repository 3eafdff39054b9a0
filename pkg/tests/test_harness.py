import csv
import math

import numpy as np
import pytest

from wavedim import harness
from wavedim.errors import DataFileError
from wavedim.harness import Check, ExperimentReport, load_digits, trial_seeds, write_report_csv


class TestCheck:
    def test_info_check_has_no_verdict(self):
        assert Check("x", 3.0).passed is None

    @pytest.mark.parametrize(
        "value, low, high, expected",
        [(1.0, 0.0, 2.0, True), (0.0, 0.0, 0.0, True), (2.5, 0.0, 2.0, False),
         (-1.0, None, 0.0, True), (5.0, 6.0, None, False), (math.nan, 0.0, 1.0, False)],
    )
    def test_band(self, value, low, high, expected):
        assert Check("x", value, low, high).passed is expected

    def test_report_passes_with_info_only(self):
        r = ExperimentReport("r", 1, [Check("a", 1.0), Check("b", 2.0, 0.0, 3.0)])
        assert r.passed
        assert r.summary().startswith("PASS r: 1/1 checks")

    def test_report_fails_and_names_failures(self):
        r = ExperimentReport("r", 1, [Check("a", 9.0, 0.0, 1.0), Check("b", 0.5, 0.0, 1.0)])
        assert not r.passed
        assert "failed: a" in r.summary()

    def test_check_lookup(self):
        r = ExperimentReport("r", 1, [Check("a", 1.0)])
        assert r.check("a").value == 1.0
        with pytest.raises(KeyError):
            r.check("missing")


class TestTrialSeeds:
    def test_deterministic(self):
        assert trial_seeds(7, "tag", 5) == trial_seeds(7, "tag", 5)

    def test_prefix_stable(self):
        assert trial_seeds(7, "tag", 8)[:3] == trial_seeds(7, "tag", 3)

    def test_tag_and_master_separate_streams(self):
        a = trial_seeds(7, "tag", 4)
        assert a != trial_seeds(7, "other", 4)
        assert a != trial_seeds(8, "tag", 4)

    def test_seeds_distinct_and_64_bit(self):
        seeds = trial_seeds(1, "x", 1000)
        assert len(set(seeds)) == 1000
        assert all(0 <= s < 2**64 for s in seeds)


class TestLoadDigits:
    def test_reads_with_point_and_whitespace(self, tmp_path):
        f = tmp_path / "pi.txt"
        f.write_text("3.14159\n26535 89793\n")
        np.testing.assert_array_equal(load_digits(f), [3, 1, 4, 1, 5, 9, 2, 6, 5, 3, 5, 8, 9, 7, 9, 3])

    def test_dtype(self, tmp_path):
        f = tmp_path / "d.txt"
        f.write_text("0123456789")
        d = load_digits(f)
        assert d.dtype == np.int8
        np.testing.assert_array_equal(d, np.arange(10))

    @pytest.mark.parametrize("text", ["", "  \n", "1.2.3", "12a4", "１２"])
    def test_rejects(self, tmp_path, text):
        f = tmp_path / "bad.txt"
        f.write_text(text, encoding="utf-8")
        with pytest.raises(DataFileError):
            load_digits(f)


class TestReportCsv:
    def test_columns_and_verdicts(self, tmp_path):
        reports = [
            ExperimentReport("a", 1, [Check("x", 1.0, 0.0, 2.0), Check("y", 1 / 3)]),
            ExperimentReport("b", 1, [Check("z", 5.0, None, 1.0)]),
        ]
        path = tmp_path / "r.csv"
        write_report_csv(reports, path)
        rows = list(csv.reader(path.open()))
        assert rows[0] == ["name", "statistic", "value", "low", "high", "pass"]
        assert rows[1] == ["a", "x", "1", "0", "2", "true"]
        assert rows[2] == ["a", "y", "0.333333333", "", "", "info"]
        assert rows[3] == ["b", "z", "5", "", "1", "false"]


class TestExperiments:
    def test_koch_report(self):
        r = harness.run_koch_convergence(max_stage=4, point_stage=4)
        assert r.check("stage0_value").passed
        assert r.check("closed_form_stage0").value == 1.0
        assert r.check("vertex_form_vs_point_set").value < 1e-12
        assert r.runtime > 0

    def test_koch_rejects_large_stage(self):
        with pytest.raises(ValueError):
            harness.run_koch_convergence(max_stage=11)

    def test_white_brown_small(self):
        r = harness.run_white_brown_ds(trials=10, n=2000, trend_sizes=(500, 2000, 8000), trend_trials=3)
        assert r.check("brownian_below_white_all_trials").passed
        assert r.check("zero_variance_noise_rejected").passed
        assert 1.0 < r.check("brownian_mean_ds").value < r.check("white_mean_ds").value < 2.0

    def test_white_brown_needs_ten_trials(self):
        with pytest.raises(ValueError):
            harness.run_white_brown_ds(trials=5)

    def test_katz_span_required(self):
        with pytest.raises(ValueError):
            harness.run_katz_refutation(n_list=(100, 1000))

    def test_katz_small(self):
        r = harness.run_katz_refutation(n_list=(50, 500, 50_000), path_points=30)
        assert r.check("straight_line_exactly_1").passed
        assert r.check("katz_decreasing").passed

    def test_spectral_rejects_bad_n(self):
        with pytest.raises(ValueError):
            harness.run_spectral_suite(n=10_000)

    def test_hurst_rejects_short(self):
        with pytest.raises(ValueError):
            harness.run_hurst_suite(n=1024)

    def test_digit_comparison_rejects_small_n(self):
        with pytest.raises(ValueError):
            harness.run_digit_comparison(n=1000)

    def test_digit_comparison_with_supplied_digits(self):
        digits = np.tile(np.arange(10, dtype=np.int8), 20_000)
        r = harness.run_digit_comparison(n=200_000, digits=digits)
        assert r.check("lambda").value >= 0

    def test_dynamics(self):
        r = harness.run_dynamics_sanity()
        assert r.passed, r.summary()

    def test_reproducible(self):
        a = harness.run_hurst_suite(trials=5, seed=3)
        b = harness.run_hurst_suite(trials=5, seed=3)
        c = harness.run_hurst_suite(trials=5, seed=4)
        assert [x.value for x in a.checks] == [x.value for x in b.checks]
        assert [x.value for x in a.checks] != [x.value for x in c.checks]

    def test_digit_stream_small(self):
        r = harness.run_digit_stream(n=2_000_000, chunk=500_000)
        assert 1.5 < r.check("ds").value < 2.0
