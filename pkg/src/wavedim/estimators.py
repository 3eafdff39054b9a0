"""Fractal dimension and Hurst exponent estimators.

Sevcik
    Unit-square normalization followed by ``D = 1 + ln(L) / ln(2 N')``.
Katz
    ``D = log(N') / (log(N') + log(d / L))``. Kept for comparison: ``d / L``
    settles to a constant for long records, so ``D_K -> 1`` for every curve.
Higuchi
    Negative log-log slope of the mean decimated curve length against stride.
Hurst
    Slope of ``log(R / sigma)`` against ``log(n / 2)`` over dyadic segments.

:func:`vp_compare` compares two estimates with the Vysochanskij-Petunin
bound, which only assumes unimodality.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .core import (
    DimensionEstimate,
    LineFit,
    Method,
    Waveform,
    as_series,
    least_squares,
    normalize,
    segment_lengths,
)
from .errors import (
    DegenerateFit,
    FlatSignal,
    MissingVariance,
    NonPositiveLength,
    SeriesTooShort,
    StageTooLarge,
    TooShort,
    ZeroLength,
    ZeroVariance,
)

__all__ = [
    "LengthMode",
    "HiguchiConfig",
    "HurstConfig",
    "VpComparison",
    "sevcik_dimension",
    "sevcik_dimension_stream",
    "sevcik_on_koch",
    "katz_dimension",
    "planar_extent",
    "default_higuchi_k",
    "higuchi_curve_lengths",
    "higuchi_dimension",
    "rescaled_range",
    "hurst_exponent",
    "vp_compare",
    "KOCH_DIMENSION",
]

KOCH_DIMENSION = math.log(4) / math.log(3)

# ---------------------------------------------------------------------------
# Sevcik
# ---------------------------------------------------------------------------


def _sevcik_value(length: float, n_segments: int, finite_cover: bool) -> float:
    log_cells = math.log(2 * n_segments)
    if finite_cover:
        return 1.0 + (math.log(length) - math.log(2.0)) / log_cells
    return 1.0 + math.log(length) / log_cells


def sevcik_dimension(w: Waveform, *, finite_cover: bool = False) -> DimensionEstimate:
    """Sevcik fractal dimension of a waveform, with its variance.

    Parameters
    ----------
    w : Waveform
        At least 3 points, non-constant ordinate, abscissa starting at 0 or
        above.
    finite_cover : bool, default False
        Keep the ``-ln 2`` of the finite ball count, i.e. return
        ``1 + ln(L / 2) / ln(2 N')``. The default is the limiting form
        ``1 + ln(L) / ln(2 N')``, under which a straight line of ``N'``
        segments gets ``1 + ln(sqrt 2) / ln(2 N')``.

    Returns
    -------
    DimensionEstimate
        ``variance = sum((s_i - mean(s))**2) / (L**2 * ln(2 N')**2)`` where
        ``s_i`` are the normalized chord lengths summing to ``L``.
    """
    if w.n < 3:
        raise TooShort(f"Sevcik dimension needs N >= 3, got {w.n}")
    nw = normalize(w)
    s = segment_lengths(nw)
    length = math.fsum(s)
    n_seg = s.size
    mean = length / n_seg
    ss = math.fsum((s - mean) ** 2)
    log_cells = math.log(2 * n_seg)
    variance = ss / (length * length * log_cells * log_cells)
    return DimensionEstimate(
        value=_sevcik_value(length, n_seg, finite_cover),
        variance=variance,
        n=w.n,
        method=Method.SEVCIK,
    )


def sevcik_dimension_stream(
    chunks: Callable[[], Iterable[Sequence[float] | np.ndarray]],
    *,
    finite_cover: bool = False,
) -> DimensionEstimate:
    """Sevcik dimension of a series too long to hold in memory.

    ``chunks`` is called twice and must yield the same consecutive pieces of
    the series each time. The abscissa is the unit-spaced ``0 .. N-1``, as
    with :meth:`Waveform.from_series`. Memory use is one chunk.
    """
    n = 0
    y_min = math.inf
    y_max = -math.inf
    for chunk in chunks():
        c = as_series(chunk)
        if c.size == 0:
            continue
        n += c.size
        y_min = min(y_min, float(c.min()))
        y_max = max(y_max, float(c.max()))
    if n < 3:
        raise TooShort(f"Sevcik dimension needs N >= 3, got {n}")
    if y_max == y_min:
        raise FlatSignal(f"ordinate is constant ({y_min!r})")

    n_seg = n - 1
    dx = 1.0 / n_seg
    y_range = y_max - y_min
    partial_sums: list[float] = []
    # Chan et al. pairwise combination of (count, mean, M2) per chunk.
    count = 0
    mean = 0.0
    m2 = 0.0
    prev: float | None = None
    for chunk in chunks():
        c = as_series(chunk)
        if c.size == 0:
            continue
        yn = (c - y_min) / y_range
        if prev is not None:
            yn = np.concatenate(([prev], yn))
        prev = float(yn[-1])
        if yn.size < 2:
            continue
        s = np.hypot(dx, np.diff(yn))
        partial_sums.append(math.fsum(s))
        c_mean = partial_sums[-1] / s.size
        c_m2 = math.fsum((s - c_mean) ** 2)
        total = count + s.size
        delta = c_mean - mean
        mean += delta * s.size / total
        m2 += c_m2 + delta * delta * count * s.size / total
        count = total

    length = math.fsum(partial_sums)
    log_cells = math.log(2 * n_seg)
    variance = m2 / (length * length * log_cells * log_cells)
    return DimensionEstimate(
        value=_sevcik_value(length, n_seg, finite_cover),
        variance=variance,
        n=n,
        method=Method.SEVCIK,
    )


def _koch_counts(stage: int) -> tuple[int, int, int]:
    n_segments = 4**stage
    n_horizontal = (n_segments - 1) // 3 + 1
    return n_segments, n_horizontal, n_segments - n_horizontal


def sevcik_on_koch(stage: int, *, form: str = "sqrt13") -> DimensionEstimate:
    """Closed-form Sevcik dimension of the one-sided triadic Koch curve.

    At stage ``S`` the curve has ``4**S`` segments of which
    ``n_h = (4**S - 1) / 3 + 1`` are horizontal. Three closed forms are
    offered; they differ in the cell count ``N'`` and in the inclined chord
    length ``l_i`` after the ordinate is stretched by ``sqrt(12)``.

    ``"sqrt13"`` (default)
        ``N' = 3**S`` and ``l_i = sqrt(13) / 6**S``. Tends to ``ln 4 / ln 3``
        roughly like ``1/S`` and not monotonically (about 1.130 at stage 8).
    ``"triadic"``
        ``N' = 3**S`` and ``l_i = sqrt(37) / (2 * 3**S)``, the chord of the
        stretched curve. Decreases towards ``ln 4 / ln 3`` from stage 1 on
        (about 1.333 at stage 8).
    ``"vertex"``
        ``N' = 4**S`` with the same chord; equals :func:`sevcik_dimension` on
        :func:`wavedim.generators.koch_curve` to rounding. Its limit is
        ``1 + ln(4/3) / ln 4``, about 1.2075: it crosses ``ln 4 / ln 3``
        between stages 8 and 9.

    Parameters
    ----------
    stage : int
        ``0 <= stage <= 12``.
    form : {"sqrt13", "triadic", "vertex"}
    """
    if stage < 0:
        raise ValueError(f"stage must be >= 0, got {stage}")
    if stage > 12:
        raise StageTooLarge(f"closed form is supported up to stage 12, got {stage}")
    n_seg, n_h, n_i = _koch_counts(stage)
    if form == "sqrt13":
        length = n_h / 3**stage + n_i * math.sqrt(13) / 6**stage
        n_cells = 3**stage
    elif form == "triadic":
        length = (n_h + n_i * math.sqrt(37) / 2) / 3**stage
        n_cells = 3**stage
    elif form == "vertex":
        length = (n_h + n_i * math.sqrt(37) / 2) / 3**stage
        n_cells = n_seg
    else:
        raise ValueError(f"unknown form {form!r}")
    value = 1.0 + math.log(length) / math.log(2 * n_cells)
    return DimensionEstimate(value=value, variance=None, n=n_seg + 1, method=Method.SEVCIK)


# ---------------------------------------------------------------------------
# Katz
# ---------------------------------------------------------------------------

_BRUTE_FORCE_HULL = 2048


def _max_pairwise(points: np.ndarray) -> float:
    best = 0.0
    for start in range(0, len(points), 1024):
        block = points[start : start + 1024]
        d = np.hypot(block[:, None, 0] - points[None, :, 0], block[:, None, 1] - points[None, :, 1])
        best = max(best, float(d.max()))
    return best


def _calipers(hull: np.ndarray) -> float:
    # hull: counter-clockwise convex polygon without repeated vertices.
    h = len(hull)
    if h <= _BRUTE_FORCE_HULL:
        return _max_pairwise(hull)

    def area2(a, b, c):
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])

    pts = [tuple(p) for p in hull]
    best = 0.0
    j = 1
    for i in range(h):
        i_next = (i + 1) % h
        while area2(pts[i], pts[i_next], pts[(j + 1) % h]) > area2(pts[i], pts[i_next], pts[j]):
            j = (j + 1) % h
        for a in (pts[i], pts[i_next]):
            best = max(best, math.hypot(a[0] - pts[j][0], a[1] - pts[j][1]))
    return best


def planar_extent(xs: np.ndarray, ys: np.ndarray, mode: str = "exact") -> float:
    """Largest distance between two samples of a curve.

    ``mode="exact"`` finds the true diameter through the convex hull
    (rotating calipers on large hulls). ``mode="first"`` returns the largest
    distance from the first sample, a common shortcut that is exact for
    many, but not all, curves that do not cross themselves.
    """
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    if mode == "first":
        return float(np.hypot(xs - xs[0], ys - ys[0]).max())
    if mode != "exact":
        raise ValueError(f"unknown planar extent mode {mode!r}")
    points = np.column_stack([xs, ys])
    if len(points) <= _BRUTE_FORCE_HULL:
        return _max_pairwise(points)
    try:
        hull = ConvexHull(points)
    except QhullError:
        # Collinear input: lexicographic extremes are the two ends of the line.
        order = np.lexsort((ys, xs))
        a, b = points[order[0]], points[order[-1]]
        return float(math.hypot(*(b - a)))
    return _calipers(points[hull.vertices])


def katz_dimension(w: Waveform, *, extent: str = "exact") -> DimensionEstimate:
    """Katz waveform dimension ``log(N') / (log(N') + log(d / L))``.

    ``d`` is the planar extent (see :func:`planar_extent`) and ``L`` the raw,
    un-normalized polyline length. With ``extent="first"`` the estimate is
    flagged ``approximate``. No variance is defined.
    """
    if w.n < 3:
        raise TooShort(f"Katz dimension needs N >= 3, got {w.n}")
    length = math.fsum(segment_lengths(w))
    if length == 0:
        raise ZeroLength("all points coincide")
    d = planar_extent(w.xs, w.ys, extent)
    # d <= L always; a gap within a few ulps of L is rounding of a straight line.
    ratio = 1.0 if length - d <= 4 * np.finfo(float).eps * length else d / length
    log_n = math.log(w.n_segments)
    return DimensionEstimate(
        value=log_n / (log_n + math.log(ratio)),
        variance=None,
        n=w.n,
        method=Method.KATZ,
        approximate=extent == "first",
    )


# ---------------------------------------------------------------------------
# Higuchi
# ---------------------------------------------------------------------------


class LengthMode(str, enum.Enum):
    ABSOLUTE_DIFFERENCE = "abs"
    EUCLIDEAN_CHORD = "euclid"


def default_higuchi_k(n: int) -> list[int]:
    """Stride schedule ``1, 2, 3, 4`` then ``round(2**((j-1)/4))`` for ``j >= 11``.

    Values are rounded to integers, de-duplicated and capped at ``n // 4``.

    >>> default_higuchi_k(64)
    [1, 2, 3, 4, 6, 7, 8, 10, 11, 13, 16]
    """
    if n < 64:
        raise SeriesTooShort(f"default stride schedule needs N >= 64, got {n}")
    cap = n // 4
    ks = [1, 2, 3, 4]
    j = 11
    while True:
        k = int(round(2 ** ((j - 1) / 4)))
        if k > cap:
            break
        if k > ks[-1]:
            ks.append(k)
        j += 1
    return ks


@dataclass(frozen=True)
class HiguchiConfig:
    k_values: tuple[int, ...]
    length_mode: LengthMode = LengthMode.ABSOLUTE_DIFFERENCE

    def __post_init__(self) -> None:
        ks = tuple(int(k) for k in self.k_values)
        if not ks:
            raise ValueError("k_values is empty")
        if ks[0] < 1:
            raise ValueError("k values must be >= 1")
        if any(b <= a for a, b in zip(ks, ks[1:])):
            raise ValueError("k values must be strictly increasing")
        object.__setattr__(self, "k_values", ks)
        object.__setattr__(self, "length_mode", LengthMode(self.length_mode))

    @classmethod
    def default(cls, n: int, length_mode: LengthMode | str = LengthMode.ABSOLUTE_DIFFERENCE,
                k_max: int | None = None) -> "HiguchiConfig":
        """Default schedule for a series of length ``n``.

        Strides are limited to ``n // 10`` so that every stride satisfies the
        estimator's length requirement, and optionally to ``k_max``.
        """
        ks = [k for k in default_higuchi_k(n) if 10 * k <= n]
        if k_max is not None:
            ks = [k for k in ks if k <= k_max]
        return cls(tuple(ks), LengthMode(length_mode))


def higuchi_curve_lengths(
    series: Sequence[float] | np.ndarray,
    k_values: Sequence[int],
    length_mode: LengthMode | str = LengthMode.ABSOLUTE_DIFFERENCE,
) -> np.ndarray:
    """Mean normalized curve length ``<L(k)>`` for each stride ``k``.

    For offset ``m`` (1-based) the subsequence ``x(m), x(m+k), ...`` has
    ``floor((N-m)/k)`` steps and length
    ``(N-1) / (floor((N-m)/k) * k**2) * sum(|step|)``; ``<L(k)>`` averages
    the ``k`` offsets. In ``EUCLIDEAN_CHORD`` mode each ``|step|`` is
    replaced by ``sqrt(k**2 + step**2)``.
    """
    x = as_series(series)
    n = x.size
    mode = LengthMode(length_mode)
    out = np.empty(len(k_values))
    for idx, k in enumerate(k_values):
        k = int(k)
        if k < 1 or n - k < k:
            raise SeriesTooShort(f"stride {k} leaves fewer than one step per offset (N={n})")
        steps = x[k:] - x[:-k]
        if mode is LengthMode.ABSOLUTE_DIFFERENCE:
            steps = np.abs(steps)
        else:
            steps = np.hypot(float(k), steps)
        # Step j joins x[j] and x[j+k]; it belongs to offset m = j mod k + 1.
        offset = np.arange(steps.size) % k
        sums = np.bincount(offset, weights=steps, minlength=k)
        counts = np.bincount(offset, minlength=k)
        out[idx] = np.mean((n - 1) / (counts * float(k) * k) * sums)
    return out


def higuchi_dimension(
    series: Sequence[float] | np.ndarray,
    cfg: HiguchiConfig | None = None,
) -> tuple[DimensionEstimate, LineFit]:
    """Higuchi fractal dimension.

    Returns the estimate (``-slope`` of ``ln <L(k)>`` on ``ln k``) together
    with the fitted line for diagnostics.
    """
    x = as_series(series)
    n = x.size
    if cfg is None:
        if n < 64:
            raise SeriesTooShort(f"Higuchi dimension needs N >= 64 for the default strides, got {n}")
        cfg = HiguchiConfig.default(n)
    ks = cfg.k_values
    if len(ks) < 2:
        raise DegenerateFit("need at least two stride values")
    if n < 10 * ks[-1]:
        raise SeriesTooShort(f"N={n} is below 10 * max(k) = {10 * ks[-1]}")
    lengths = higuchi_curve_lengths(x, ks, cfg.length_mode)
    if np.any(lengths <= 0):
        raise NonPositiveLength("mean curve length is zero (constant series?)")
    fit = least_squares(np.log(ks), np.log(lengths))
    est = DimensionEstimate(value=-fit.slope, variance=None, n=n, method=Method.HIGUCHI)
    return est, fit


# ---------------------------------------------------------------------------
# Hurst
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HurstConfig:
    """Segmentation for rescaled-range analysis.

    Segment lengths are ``N, N//2, N//4, ...`` down to ``min_segment``; each
    scale tiles the record with non-overlapping segments from the start.
    The default of 16 keeps the small-sample bias of ``R/sigma`` modest.
    """

    min_segment: int = 16

    def __post_init__(self) -> None:
        if self.min_segment < 8:
            raise ValueError(f"min_segment must be >= 8, got {self.min_segment}")

    def scales(self, n: int) -> list[int]:
        out = []
        size = n
        while size >= self.min_segment:
            out.append(size)
            size //= 2
        return out


def rescaled_range(
    series: Sequence[float] | np.ndarray,
    cfg: HurstConfig | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Average ``R / sigma`` per segment length.

    ``R`` is the range of the running sum of deviations from the segment
    mean; ``sigma`` the population standard deviation of the segment.
    Constant segments are skipped, as are scales where every segment is
    constant.

    Returns
    -------
    scales, ratios : ndarray
        Segment lengths (descending) and the mean ``R / sigma`` at each.
    """
    cfg = cfg or HurstConfig()
    y = as_series(series)
    n = y.size
    if n < 2 * cfg.min_segment:
        raise SeriesTooShort(f"need N >= {2 * cfg.min_segment}, got {n}")
    scales = []
    ratios = []
    for size in cfg.scales(n):
        segs = y[: (n // size) * size].reshape(-1, size)
        dev = segs - segs.mean(axis=1, keepdims=True)
        run = np.cumsum(dev, axis=1)
        r = run.max(axis=1) - run.min(axis=1)
        sigma = segs.std(axis=1)
        ok = sigma > 0
        if not np.any(ok):
            continue
        scales.append(size)
        ratios.append(float(np.mean(r[ok] / sigma[ok])))
    if not scales:
        raise ZeroVariance("every segment is constant")
    return np.array(scales, dtype=np.int64), np.array(ratios)


def hurst_exponent(
    series: Sequence[float] | np.ndarray,
    cfg: HurstConfig | None = None,
) -> tuple[DimensionEstimate, LineFit]:
    """Hurst exponent from the rescaled range.

    ``H`` is the least-squares slope of ``ln <R/sigma>`` on ``ln(n / 2)``;
    the slope does not depend on the logarithm base. No Gaussian model is
    assumed, so no parametric interval is reported; use the fit's
    ``r_squared`` as the quality figure. ``H`` is not converted into a
    fractal dimension.
    """
    scales, ratios = rescaled_range(series, cfg)
    if scales.size < 2:
        raise DegenerateFit("rescaled range available at fewer than two scales")
    fit = least_squares(np.log(scales / 2.0), np.log(ratios))
    n = int(np.asarray(series).size)
    return DimensionEstimate(value=fit.slope, variance=None, n=n, method=Method.HURST), fit


# ---------------------------------------------------------------------------
# Vysochanskij-Petunin comparison
# ---------------------------------------------------------------------------

_VP_THRESHOLD = math.sqrt(8.0 / 3.0)


@dataclass(frozen=True)
class VpComparison:
    lam: float
    p_bound: float
    significant: bool


def vp_compare(a: DimensionEstimate, b: DimensionEstimate, alpha: float = 0.05) -> VpComparison:
    """Compare two estimates with the Vysochanskij-Petunin tail bound.

    ``lam = |a - b| / sqrt(var_a + var_b)``; the bound
    ``P(|X - mu| >= lam * sigma) <= 4 / (9 lam**2)`` applies for
    ``lam > sqrt(8/3)``, otherwise the bound is 1. The difference is called
    significant when the bound falls below ``alpha``.
    """
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    for est in (a, b):
        if est.variance is None or not est.variance > 0:
            raise MissingVariance(f"{est.method.value} estimate has no positive variance")
    lam = abs(a.value - b.value) / math.sqrt(a.variance + b.variance)
    p = 4.0 / (9.0 * lam * lam) if lam > _VP_THRESHOLD else 1.0
    return VpComparison(lam=lam, p_bound=p, significant=p < alpha)
