import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from wavedim.core import (
    DimensionEstimate,
    Method,
    Waveform,
    cumsum,
    diff,
    least_squares,
    normalize,
    polyline_length,
)
from wavedim.errors import (
    DegenerateFit,
    FlatSignal,
    NegativeAbscissa,
    TooShort,
    WaveDimError,
    ZeroAbscissa,
)

finite = st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False)


def series_strategy(min_size=2, max_size=200):
    return arrays(np.float64, st.integers(min_size, max_size), elements=finite)


class TestWaveform:
    def test_from_series_uses_unit_abscissa(self):
        w = Waveform.from_series([3.0, 1.0, 2.0])
        np.testing.assert_array_equal(w.xs, [0.0, 1.0, 2.0])
        assert w.n == 3 and w.n_segments == 2 and len(w) == 3

    def test_rejects_length_mismatch(self):
        with pytest.raises(ValueError):
            Waveform([0, 1, 2], [0, 1])

    def test_rejects_single_point(self):
        with pytest.raises(TooShort):
            Waveform([0.0], [1.0])

    def test_rejects_decreasing_abscissa(self):
        with pytest.raises(ValueError):
            Waveform([0, 2, 1], [0, 1, 2])

    def test_parametric_allows_fold_back(self):
        w = Waveform([0, 2, 1], [0, 1, 2], parametric=True)
        assert w.n == 3

    def test_rejects_nan(self):
        with pytest.raises(ValueError):
            Waveform([0, 1], [0, math.nan])

    def test_arrays_are_read_only(self):
        w = Waveform.from_series([1.0, 2.0])
        with pytest.raises(ValueError):
            w.ys[0] = 5.0


class TestNormalize:
    def test_linear_rescale(self):
        nw = normalize(Waveform([0, 1, 2], [0, 5, 10]))
        np.testing.assert_allclose(nw.xs, [0, 0.5, 1])
        np.testing.assert_allclose(nw.ys, [0, 0.5, 1])
        assert (nw.x_max, nw.y_min, nw.y_max) == (2.0, 0.0, 10.0)

    def test_flat_signal(self):
        with pytest.raises(FlatSignal):
            normalize(Waveform([0, 1], [3, 3]))

    def test_zero_abscissa(self):
        with pytest.raises(ZeroAbscissa):
            normalize(Waveform([0, 0], [0, 1]))

    def test_negative_abscissa(self):
        with pytest.raises(NegativeAbscissa):
            normalize(Waveform([-1, 0, 1], [0, 1, 0]))

    def test_errors_share_base(self):
        assert issubclass(FlatSignal, WaveDimError) and issubclass(WaveDimError, ValueError)

    def test_uniform_samples_hit_exact_bounds(self):
        rng = np.random.default_rng(5)
        nw = normalize(Waveform(np.linspace(0, 1, 1001), rng.random(1001)))
        assert nw.ys.min() == 0.0 and nw.ys.max() == 1.0 and nw.xs.max() == 1.0

    @given(series_strategy(min_size=2))
    def test_idempotent(self, ys):
        w = Waveform.from_series(ys)
        try:
            once = normalize(w)
        except FlatSignal:
            return
        twice = normalize(Waveform(once.xs, once.ys))
        np.testing.assert_allclose(twice.xs, once.xs, rtol=0, atol=1e-12)
        np.testing.assert_allclose(twice.ys, once.ys, rtol=0, atol=1e-12)


class TestPolylineLength:
    @pytest.mark.parametrize("n", [2, 3, 10, 1001])
    def test_diagonal_line(self, n):
        t = np.linspace(0, 1, n)
        assert polyline_length(normalize(Waveform(t, t))) == pytest.approx(math.sqrt(2), abs=1e-12)

    def test_square_wave_chord_sum(self):
        nw = normalize(Waveform.from_series([0, 1, 0, 1]))
        # Each chord spans 1/3 horizontally and 1 vertically.
        expected = 3 * math.sqrt(1 / 9 + 1)
        assert polyline_length(nw) == pytest.approx(expected, rel=1e-15)

    def test_koch_stage1_closed_form(self):
        # Stage 1 in the unit square: the bump height maps to 1, so two
        # horizontal thirds plus two chords spanning (1/6, 1).
        h = 1 / math.sqrt(12)
        xs = [0, 1 / 3, 0.5, 2 / 3, 1]
        ys = [0, 0, h, 0, 0]
        nw = normalize(Waveform(xs, ys))
        assert polyline_length(nw) == pytest.approx(2 / 3 + 2 * math.hypot(1 / 6, 1), rel=1e-14)

    @given(series_strategy(min_size=2))
    def test_reversal_invariant(self, ys):
        w = Waveform.from_series(ys)
        rev = Waveform(w.xs, ys[::-1].copy())
        assert polyline_length(w) == pytest.approx(polyline_length(rev), rel=1e-12, abs=1e-12)

    @given(series_strategy(min_size=2))
    def test_at_least_endpoint_chord(self, ys):
        w = Waveform.from_series(ys)
        chord = math.hypot(w.xs[-1] - w.xs[0], w.ys[-1] - w.ys[0])
        assert polyline_length(w) >= chord * (1 - 1e-12)


class TestDiffCumsum:
    def test_diff_example(self):
        np.testing.assert_array_equal(diff([5, 7, 4]), [0, 2, -3])

    def test_diff_constant(self):
        np.testing.assert_array_equal(diff([4.0] * 5), np.zeros(5))

    def test_cumsum_example(self):
        np.testing.assert_array_equal(cumsum([0, 2, -3]), [0, 2, -1])

    def test_cumsum_zero(self):
        np.testing.assert_array_equal(cumsum(np.zeros(7)), np.zeros(7))

    def test_single_value(self):
        np.testing.assert_array_equal(diff([3.0]), [0.0])
        np.testing.assert_array_equal(cumsum([3.0]), [0.0])

    def test_empty_rejected(self):
        with pytest.raises(TooShort):
            diff([])
        with pytest.raises(TooShort):
            cumsum([])

    @given(series_strategy(min_size=1))
    def test_roundtrip(self, r):
        np.testing.assert_allclose(cumsum(diff(r)), r - r[0], rtol=0, atol=1e-9 * max(1.0, np.abs(r).max()))

    def test_cumsum_of_white_is_smoother(self):
        from wavedim.estimators import sevcik_dimension
        from wavedim.generators import gaussian_white

        for seed in range(30):
            g = gaussian_white(2000, seed=seed)
            white = sevcik_dimension(Waveform.from_series(g)).value
            walk = sevcik_dimension(Waveform.from_series(cumsum(g))).value
            assert walk < white


class TestLeastSquares:
    def test_exact_line(self):
        fit = least_squares([0, 1, 2], [1, 3, 5])
        assert fit.slope == pytest.approx(2) and fit.intercept == pytest.approx(1)
        assert fit.r_squared == 1.0
        np.testing.assert_allclose(fit.predict([3]), [7])

    def test_constant_y(self):
        fit = least_squares([0, 1, 2, 3], [4, 4, 4, 4])
        assert fit.slope == 0 and fit.r_squared == 1.0

    def test_degenerate(self):
        with pytest.raises(DegenerateFit):
            least_squares([1, 1, 1], [0, 1, 2])

    def test_noisy_line_within_three_se(self):
        rng = np.random.default_rng(11)
        x = np.linspace(0, 10, 400)
        sd = 0.5
        y = 2 * x + rng.normal(0, sd, x.size)
        fit = least_squares(x, y)
        se = sd / math.sqrt(np.sum((x - x.mean()) ** 2))
        assert abs(fit.slope - 2) < 3 * se

    @given(
        st.floats(-100, 100), st.floats(-100, 100),
        arrays(np.float64, st.integers(2, 50), elements=st.floats(-1e3, 1e3), unique=True),
    )
    @settings(max_examples=50)
    def test_collinear_r_squared(self, a, b, x):
        fit = least_squares(x, a + b * x)
        assert 0 <= fit.r_squared <= 1
        if abs(b) > 1e-6:
            assert fit.r_squared == pytest.approx(1.0, abs=1e-12)


class TestDimensionEstimate:
    def test_std(self):
        e = DimensionEstimate(1.5, 0.04, 10, Method.SEVCIK)
        assert e.std == pytest.approx(0.2)

    def test_no_variance(self):
        assert DimensionEstimate(1.1, None, 10, Method.KATZ).std is None

    def test_rejects_negative_variance(self):
        with pytest.raises(ValueError):
            DimensionEstimate(1.5, -1.0, 10, Method.SEVCIK)

    def test_rejects_nan(self):
        with pytest.raises(ValueError):
            DimensionEstimate(math.nan, None, 10, Method.HURST)
