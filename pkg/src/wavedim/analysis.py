"""Sliding-window tortuosity and spectral diagnostics.

Tortuosity ``Q = D_S - 1`` is the Sevcik dimension's excess over a straight
line. :func:`sliding_q` tracks it along a record and :func:`q_compare`
measures how close two such profiles are to the identity line.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .core import LineFit, as_series, least_squares
from .errors import LengthMismatch, SeriesTooShort, TooShort, WindowTooLarge, ZeroPowerWarning

__all__ = [
    "QProfile",
    "QComparison",
    "Spectrum",
    "sliding_q",
    "q_compare",
    "power_spectrum",
    "spectral_slope",
    "hann_window",
]

# Rows of the (windows x window) difference matrix processed at once.
_BLOCK_ELEMENTS = 4_000_000


@dataclass(frozen=True)
class QProfile:
    """Tortuosity per window; flat windows hold NaN."""

    window: int
    centers: np.ndarray
    q: np.ndarray

    def __post_init__(self) -> None:
        if len(self.centers) != len(self.q):
            raise ValueError("centers and q differ in length")

    @property
    def missing(self) -> np.ndarray:
        return np.isnan(self.q)

    def __len__(self) -> int:
        return len(self.q)


def sliding_q(series, window: int) -> QProfile:
    """Sevcik tortuosity over every window of ``window`` consecutive samples.

    Each window gets its own abscissa ``0 .. window-1`` and is normalized on
    its own; the value is assigned to ``start + window // 2``. A record of
    ``N`` samples yields ``N - window + 1`` values.
    """
    y = as_series(series)
    n = y.size
    if window < 10:
        raise ValueError(f"window must be >= 10, got {window}")
    if window > n:
        raise WindowTooLarge(f"window {window} exceeds series length {n}")
    n_win = n - window + 1
    n_seg = window - 1
    dx = 1.0 / n_seg
    log_cells = math.log(2 * n_seg)
    steps = np.diff(y)
    q = np.empty(n_win)
    rows = max(1, _BLOCK_ELEMENTS // window)
    for start in range(0, n_win, rows):
        stop = min(n_win, start + rows)
        vals = sliding_window_view(y[start : stop + window - 1], window)
        span = vals.max(axis=1) - vals.min(axis=1)
        d = sliding_window_view(steps[start : stop + n_seg - 1], n_seg)
        flat = span == 0
        safe = np.where(flat, 1.0, span)
        length = np.hypot(dx, d / safe[:, None]).sum(axis=1)
        block = np.log(length) / log_cells
        block[flat] = np.nan
        q[start:stop] = block
    centers = np.arange(n_win, dtype=np.int64) + window // 2
    return QProfile(window=window, centers=centers, q=q)


@dataclass(frozen=True)
class QComparison:
    """Agreement of two tortuosity profiles.

    ``fit`` is the free least-squares line of ``b`` on ``a``;
    ``r_squared_identity`` is ``1 - sum((b - a)**2) / sum((b - mean(b))**2)``,
    i.e. measured about ``y = x``. It is not clamped and goes negative when
    the identity line fits worse than a constant.
    """

    fit: LineFit
    r_squared_identity: float
    a: np.ndarray
    b: np.ndarray


def q_compare(a: QProfile, b: QProfile) -> QComparison:
    """Pair two profiles point by point, dropping positions missing in either."""
    if a.window != b.window or len(a) != len(b):
        raise LengthMismatch(
            f"profiles differ (window {a.window} vs {b.window}, length {len(a)} vs {len(b)})"
        )
    keep = ~(a.missing | b.missing)
    qa = a.q[keep]
    qb = b.q[keep]
    if qa.size < 2:
        raise TooShort("fewer than two paired values")
    fit = least_squares(qa, qb)
    ss_res = float(np.dot(qb - qa, qb - qa))
    dev = qb - qb.mean()
    ss_tot = float(np.dot(dev, dev))
    if ss_tot == 0:
        r2 = 1.0 if ss_res == 0 else -math.inf
    else:
        r2 = 1.0 - ss_res / ss_tot
    return QComparison(fit=fit, r_squared_identity=r2, a=qa, b=qb)


def hann_window(m: int) -> np.ndarray:
    """Symmetric Hann window ``0.5 (1 - cos(2 pi i / (m - 1)))``."""
    i = np.arange(m)
    return 0.5 * (1.0 - np.cos(2.0 * np.pi * i / (m - 1)))


@dataclass(frozen=True)
class Spectrum:
    """One-sided power spectrum on bins ``0 .. M/2``.

    ``power`` is normalized so that its sum equals the energy of the
    windowed signal. ``psi`` is its square root, the per-bin magnitude.
    """

    freqs: np.ndarray
    power: np.ndarray
    window_fn: str = "hann"

    def __post_init__(self) -> None:
        freqs = np.asarray(self.freqs, dtype=np.float64)
        power = np.asarray(self.power, dtype=np.float64)
        if freqs.shape != power.shape or freqs.ndim != 1:
            raise ValueError("freqs and power must be 1-D and of equal length")
        if not (np.all(np.isfinite(power)) and np.all(power >= 0)):
            raise ValueError("power must be finite and non-negative")
        object.__setattr__(self, "freqs", freqs)
        object.__setattr__(self, "power", power)

    @property
    def psi(self) -> np.ndarray:
        return np.sqrt(self.power)

    @property
    def n_samples(self) -> int:
        """Transform length ``M`` the bins refer to."""
        return 2 * (len(self.freqs) - 1)


def power_spectrum(series) -> Spectrum:
    """Hann-windowed power spectrum.

    The series is truncated (not padded) to the largest power of two
    ``M <= N``. Interior bins carry ``2 |X_f|**2 / M``; the DC and Nyquist
    bins carry ``|X_f|**2 / M``. Frequencies are in cycles per sample.
    """
    y = as_series(series)
    if y.size < 64:
        raise SeriesTooShort(f"power spectrum needs N >= 64, got {y.size}")
    m = 1 << (y.size.bit_length() - 1)
    xw = y[:m] * hann_window(m)
    spec = np.fft.rfft(xw)
    power = (spec.real**2 + spec.imag**2) / m
    power[1:-1] *= 2.0
    freqs = np.arange(power.size) / m
    return Spectrum(freqs=freqs, power=power)


def spectral_slope(s: Spectrum) -> LineFit:
    """Least-squares slope of ``log power`` on ``log freq`` over bins ``1 .. M/8``.

    The DC bin and the top seven eighths of the band are left out. Bins with
    zero power are floored at ``1e-300`` with a :class:`ZeroPowerWarning`.
    """
    hi = s.n_samples // 8
    if hi < 16:
        raise SeriesTooShort(f"need at least 16 usable bins, have {max(hi, 0)}")
    f = s.freqs[1 : hi + 1]
    p = s.power[1 : hi + 1]
    if np.any(p == 0):
        warnings.warn(
            f"{int(np.sum(p == 0))} bin(s) with zero power floored at 1e-300",
            ZeroPowerWarning,
            stacklevel=2,
        )
        p = np.where(p == 0, 1e-300, p)
    return least_squares(np.log(f), np.log(p))
