"""Domain types and shared numerics.

A :class:`Waveform` is an ordered set of ``(x, y)`` samples. Most estimators
first map it into the unit square with :func:`normalize` and then measure the
length of the resulting polyline.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (
    DegenerateFit,
    FlatSignal,
    NegativeAbscissa,
    TooShort,
    ZeroAbscissa,
)

__all__ = [
    "Method",
    "Waveform",
    "NormalizedWaveform",
    "DimensionEstimate",
    "LineFit",
    "as_series",
    "normalize",
    "segment_lengths",
    "polyline_length",
    "diff",
    "cumsum",
    "least_squares",
]


class Method(str, enum.Enum):
    SEVCIK = "sevcik"
    KATZ = "katz"
    HIGUCHI = "higuchi"
    HURST = "hurst"


def _readonly(values) -> np.ndarray:
    arr = np.array(values, dtype=np.float64)
    arr.setflags(write=False)
    return arr


def as_series(values: Sequence[float] | np.ndarray) -> np.ndarray:
    """Return ``values`` as a 1-D float64 array, rejecting non-finite entries."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"expected a 1-D series, got shape {arr.shape}")
    if arr.size and not np.all(np.isfinite(arr)):
        raise ValueError("series contains NaN or infinite values")
    return arr


@dataclass(frozen=True)
class Waveform:
    """Sampled plane curve.

    ``parametric=True`` lifts the non-decreasing abscissa requirement, for
    curves such as the Koch construction that fold back on themselves.
    """

    xs: np.ndarray
    ys: np.ndarray
    parametric: bool = field(default=False, compare=False)

    def __post_init__(self) -> None:
        xs = _readonly(self.xs)
        ys = _readonly(self.ys)
        if xs.ndim != 1 or ys.ndim != 1:
            raise ValueError("xs and ys must be 1-D")
        if xs.size != ys.size:
            raise ValueError(f"xs and ys differ in length ({xs.size} != {ys.size})")
        if xs.size < 2:
            raise TooShort(f"a waveform needs at least 2 points, got {xs.size}")
        if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ys))):
            raise ValueError("waveform contains NaN or infinite values")
        if not self.parametric and np.any(np.diff(xs) < 0):
            raise ValueError("xs must be monotone non-decreasing")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)

    @classmethod
    def from_series(cls, ys: Sequence[float] | np.ndarray) -> "Waveform":
        """Waveform on the unit-spaced abscissa ``0, 1, ..., N-1``."""
        ys = as_series(ys)
        return cls(np.arange(ys.size, dtype=np.float64), ys)

    @property
    def n(self) -> int:
        return int(self.xs.size)

    @property
    def n_segments(self) -> int:
        return self.n - 1

    def __len__(self) -> int:
        return self.n


@dataclass(frozen=True)
class NormalizedWaveform:
    """Waveform mapped into the unit square."""

    xs: np.ndarray
    ys: np.ndarray
    x_max: float
    y_min: float
    y_max: float

    @property
    def n(self) -> int:
        return int(self.xs.size)

    @property
    def n_segments(self) -> int:
        return self.n - 1


@dataclass(frozen=True)
class DimensionEstimate:
    """Result of a dimension / exponent estimator.

    ``variance`` is ``None`` for methods without a variance formula.
    ``approximate`` marks estimates computed with a documented shortcut
    (e.g. Katz with the first-point planar extent).
    """

    value: float
    variance: float | None
    n: int
    method: Method
    approximate: bool = False

    def __post_init__(self) -> None:
        if not math.isfinite(self.value):
            raise ValueError(f"estimate is not finite: {self.value}")
        if self.variance is not None and not self.variance >= 0:
            raise ValueError(f"variance must be >= 0, got {self.variance}")

    @property
    def std(self) -> float | None:
        return None if self.variance is None else math.sqrt(self.variance)


@dataclass(frozen=True)
class LineFit:
    slope: float
    intercept: float
    r_squared: float

    def predict(self, x):
        return self.intercept + self.slope * np.asarray(x, dtype=np.float64)


def normalize(w: Waveform) -> NormalizedWaveform:
    """Map a waveform into the unit square.

    The abscissa is divided by its maximum (it is not shifted), the ordinate
    is min-max scaled.

    Raises
    ------
    NegativeAbscissa
        If any abscissa is below zero.
    ZeroAbscissa
        If the largest abscissa is zero.
    FlatSignal
        If all ordinates are equal.
    """
    xs, ys = w.xs, w.ys
    x_min = float(xs.min())
    x_max = float(xs.max())
    if x_min < 0:
        raise NegativeAbscissa(f"abscissa must start at x >= 0 (min is {x_min!r})")
    if x_max == 0:
        raise ZeroAbscissa("largest abscissa is 0")
    y_min = float(ys.min())
    y_max = float(ys.max())
    if y_max == y_min:
        raise FlatSignal(f"ordinate is constant ({y_min!r})")
    xn = _readonly(xs / x_max)
    yn = _readonly((ys - y_min) / (y_max - y_min))
    return NormalizedWaveform(xn, yn, x_max, y_min, y_max)


def segment_lengths(w: Waveform | NormalizedWaveform) -> np.ndarray:
    """Euclidean length of each of the ``N - 1`` consecutive chords."""
    return np.hypot(np.diff(w.xs), np.diff(w.ys))


def polyline_length(w: Waveform | NormalizedWaveform) -> float:
    """Total chord length, summed with exactly-rounded (compensated) summation."""
    if w.n < 2:
        raise TooShort("a polyline needs at least 2 points")
    return math.fsum(segment_lengths(w))


def diff(series: Sequence[float] | np.ndarray) -> np.ndarray:
    """Zero-anchored first differences: ``out[0] = 0``, ``out[t] = y[t] - y[t-1]``."""
    y = as_series(series)
    if y.size < 1:
        raise TooShort("diff needs at least one value")
    out = np.empty_like(y)
    out[0] = 0.0
    np.subtract(y[1:], y[:-1], out=out[1:])
    return out


def cumsum(series: Sequence[float] | np.ndarray) -> np.ndarray:
    """Zero-anchored running sum: ``out[0] = 0``, ``out[i] = out[i-1] + in[i]``.

    ``in[0]`` is ignored, so ``cumsum(diff(r)) == r - r[0]``.
    """
    y = as_series(series)
    if y.size < 1:
        raise TooShort("cumsum needs at least one value")
    out = np.empty_like(y)
    out[0] = 0.0
    np.cumsum(y[1:], out=out[1:])
    return out


def least_squares(xs: Sequence[float] | np.ndarray, ys: Sequence[float] | np.ndarray) -> LineFit:
    """Ordinary least-squares line ``y = intercept + slope * x``.

    ``r_squared`` is ``1 - SS_res / SS_tot``; a constant ``ys`` that the line
    reproduces exactly counts as a perfect fit.
    """
    x = as_series(xs)
    y = as_series(ys)
    if x.size != y.size:
        raise ValueError(f"xs and ys differ in length ({x.size} != {y.size})")
    if x.size < 2:
        raise TooShort("a line fit needs at least 2 points")
    x_mean = x.mean()
    y_mean = y.mean()
    dx = x - x_mean
    sxx = float(np.dot(dx, dx))
    if sxx == 0:
        raise DegenerateFit("all abscissae are equal")
    slope = float(np.dot(dx, y - y_mean)) / sxx
    intercept = float(y_mean - slope * x_mean)
    resid = y - (intercept + slope * x)
    ss_res = float(np.dot(resid, resid))
    dy = y - y_mean
    ss_tot = float(np.dot(dy, dy))
    if ss_tot == 0:
        r2 = 1.0 if ss_res == 0 else 0.0
    else:
        r2 = min(1.0, max(0.0, 1.0 - ss_res / ss_tot))
    return LineFit(slope, intercept, r2)
