"""Fractal dimension estimators for sampled waveforms.

Sevcik, Katz and Higuchi dimensions, the Hurst rescaled-range exponent,
Hann-windowed spectra and seeded reference-signal generators.
"""
from __future__ import annotations

__version__ = "0.1.0"

from .analysis import QComparison, QProfile, Spectrum, power_spectrum, q_compare, sliding_q, spectral_slope
from .core import (
    DimensionEstimate,
    LineFit,
    Method,
    NormalizedWaveform,
    Waveform,
    cumsum,
    diff,
    least_squares,
    normalize,
    polyline_length,
)
from .errors import WaveDimError
from .estimators import (
    HiguchiConfig,
    HurstConfig,
    LengthMode,
    VpComparison,
    default_higuchi_k,
    higuchi_dimension,
    hurst_exponent,
    katz_dimension,
    sevcik_dimension,
    sevcik_dimension_stream,
    sevcik_on_koch,
    vp_compare,
)
from .generators import (
    LorenzParams,
    MandelbrotWindow,
    RngSeed,
    brownian_walk,
    gaussian_white,
    koch_curve,
    lorenz_trajectory,
    mandelbrot_grid,
    sine_wave,
    uniform_digits,
)
