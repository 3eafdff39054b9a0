"""Seeded reference signals.

Every random generator draws from numpy's PCG64 bit generator seeded with a
64-bit integer, so a given ``(parameters, seed)`` pair reproduces the same
values bit for bit on a given numpy build. Gaussian values are produced with
the Box-Muller transform rather than numpy's ziggurat sampler.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .core import Waveform, as_series
from .errors import NumericalBlowup, StageTooLarge, TooShort

__all__ = [
    "RngSeed",
    "make_rng",
    "gaussian_white",
    "brownian_walk",
    "uniform_digits",
    "iter_uniform_digits",
    "koch_curve",
    "sine_wave",
    "LorenzParams",
    "lorenz_equilibrium",
    "lorenz_trajectory",
    "MandelbrotWindow",
    "escape_count",
    "mandelbrot_grid",
]

_MAX_SEED = 2**64 - 1


@dataclass(frozen=True)
class RngSeed:
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0 <= int(self.seed) <= _MAX_SEED:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        object.__setattr__(self, "seed", int(self.seed))

    def generator(self) -> np.random.Generator:
        return np.random.Generator(np.random.PCG64(self.seed))


def make_rng(seed: RngSeed | int) -> np.random.Generator:
    if not isinstance(seed, RngSeed):
        seed = RngSeed(seed)
    return seed.generator()


def gaussian_white(
    n: int,
    mean: float = 0.0,
    variance: float = 1.0,
    seed: RngSeed | int = 0,
) -> np.ndarray:
    """``n`` independent Gaussian values by the Box-Muller transform.

    Each pair of uniforms ``u1`` in ``(0, 1]`` and ``u2`` in ``[0, 1)`` yields
    ``r cos(2 pi u2)`` and ``r sin(2 pi u2)`` with ``r = sqrt(-2 ln u1)``;
    the pairs are interleaved and an odd tail value is dropped.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if variance < 0:
        raise ValueError(f"variance must be >= 0, got {variance}")
    rng = make_rng(seed)
    pairs = (n + 1) // 2
    u = rng.random((pairs, 2))
    r = np.sqrt(-2.0 * np.log1p(-u[:, 0]))
    theta = 2.0 * np.pi * u[:, 1]
    z = np.column_stack([r * np.cos(theta), r * np.sin(theta)]).ravel()[:n]
    if variance == 0:
        return np.full(n, float(mean))
    return mean + math.sqrt(variance) * z


def brownian_walk(noise) -> np.ndarray:
    """Random walk driven by ``noise``: ``b[0] = 0``, ``b[i] = b[i-1] + g[i-1]``.

    The last noise value is not used, so the walk has the same length as the
    noise.
    """
    g = as_series(noise)
    if g.size < 1:
        raise TooShort("noise must have at least one value")
    out = np.empty_like(g)
    out[0] = 0.0
    np.cumsum(g[:-1], out=out[1:])
    return out


def uniform_digits(n: int, seed: RngSeed | int = 0) -> np.ndarray:
    """``n`` independent decimal digits, uniform on ``0..9``, as ``int8``."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return make_rng(seed).integers(0, 10, size=n, dtype=np.int8)


def iter_uniform_digits(n: int, seed: RngSeed | int = 0, chunk: int = 10_000_000) -> Iterator[np.ndarray]:
    """Yield ``n`` uniform digits in pieces of at most ``chunk`` values.

    The sequence depends on ``chunk``; use the same value to reproduce it.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    rng = make_rng(seed)
    done = 0
    while done < n:
        size = min(chunk, n - done)
        yield rng.integers(0, 10, size=size, dtype=np.int8)
        done += size


# Lattice steps for the six directions k * 60 degrees, in the basis
# e0 = (1, 0), e1 = (1/2, sqrt(3)/2).
_HEX_STEPS = np.array([(1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)], dtype=np.int64)


def koch_curve(stage: int) -> Waveform:
    """One-sided triadic Koch curve from ``(0, 0)`` to ``(1, 0)``.

    Bumps point towards ``+y``. Vertices are built on an integer triangular
    lattice and converted to floats once, so vertex coordinates carry no
    accumulated rounding. The result has ``4**stage + 1`` points, every
    segment ``3**-stage`` long, and a peak height of ``1 / sqrt(12)`` for
    ``stage >= 1``. The abscissa folds back on itself, so the waveform is
    marked ``parametric``.
    """
    if stage < 0:
        raise ValueError(f"stage must be >= 0, got {stage}")
    if stage > 10:
        raise StageTooLarge(f"stage {stage} exceeds 10 (more than 2**20 points)")
    dirs = np.zeros(1, dtype=np.int64)
    for _ in range(stage):
        dirs = ((dirs[:, None] + np.array([0, 1, -1, 0])) % 6).ravel()
    lattice = np.zeros((dirs.size + 1, 2), dtype=np.int64)
    np.cumsum(_HEX_STEPS[dirs], axis=0, out=lattice[1:])
    unit = 3.0**-stage
    a = lattice[:, 0].astype(np.float64)
    b = lattice[:, 1].astype(np.float64)
    xs = (a + 0.5 * b) * unit
    ys = b * (math.sqrt(3.0) / 2.0) * unit
    return Waveform(xs, ys, parametric=True)


def sine_wave(n: int, period: float) -> Waveform:
    """``y_i = sin(2 pi i / period)`` on the abscissa ``0 .. n-1``."""
    if n < 2:
        raise TooShort(f"n must be >= 2, got {n}")
    if not period > 0:
        raise ValueError(f"period must be > 0, got {period}")
    i = np.arange(n, dtype=np.float64)
    return Waveform(i, np.sin(2.0 * np.pi * i / period))


@dataclass(frozen=True)
class LorenzParams:
    """Lorenz system parameters, start point and integration grid.

    Defaults: ``sigma = 3``, ``rho = 26.5``, ``beta = 1`` from ``(-1, 0, 1)``.
    """

    sigma: float = 3.0
    rho: float = 26.5
    beta: float = 1.0
    x0: float = -1.0
    y0: float = 0.0
    z0: float = 1.0
    dt: float = 0.01
    steps: int = 40_000

    def __post_init__(self) -> None:
        if not self.dt > 0:
            raise ValueError(f"dt must be > 0, got {self.dt}")
        if self.steps < 1:
            raise ValueError(f"steps must be >= 1, got {self.steps}")


def lorenz_equilibrium(p: LorenzParams, sign: int = 1) -> tuple[float, float, float]:
    """Non-trivial fixed point ``(+-sqrt(beta (rho - 1)), same, rho - 1)``; needs ``rho > 1``."""
    if p.rho <= 1:
        raise ValueError("non-trivial equilibria exist only for rho > 1")
    c = math.sqrt(p.beta * (p.rho - 1.0))
    s = 1.0 if sign >= 0 else -1.0
    return s * c, s * c, p.rho - 1.0


_BLOWUP = 1e6


def lorenz_trajectory(p: LorenzParams, method: str = "rk4") -> np.ndarray:
    """Integrate ``x' = sigma (y - x)``, ``y' = rho x - x z - y``, ``z' = x y - beta z``.

    Parameters
    ----------
    p : LorenzParams
    method : {"rk4", "euler"}
        Classical fourth-order Runge-Kutta (default) or forward Euler, the
        crude explicit iteration kept for comparison.

    Returns
    -------
    ndarray, shape (steps, 3)
        The states after each step; the initial state is not included.

    Raises
    ------
    NumericalBlowup
        If a coordinate exceeds ``1e6`` in magnitude or becomes non-finite.
    """
    sigma, rho, beta, h = float(p.sigma), float(p.rho), float(p.beta), float(p.dt)

    def rhs(x, y, z):
        return sigma * (y - x), rho * x - x * z - y, x * y - beta * z

    out = np.empty((p.steps, 3))
    x, y, z = float(p.x0), float(p.y0), float(p.z0)
    if method == "rk4":
        for i in range(p.steps):
            k1 = rhs(x, y, z)
            k2 = rhs(x + 0.5 * h * k1[0], y + 0.5 * h * k1[1], z + 0.5 * h * k1[2])
            k3 = rhs(x + 0.5 * h * k2[0], y + 0.5 * h * k2[1], z + 0.5 * h * k2[2])
            k4 = rhs(x + h * k3[0], y + h * k3[1], z + h * k3[2])
            x += h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
            y += h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])
            z += h / 6.0 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2])
            if not max(abs(x), abs(y), abs(z)) <= _BLOWUP:
                raise NumericalBlowup(f"trajectory left |coord| <= 1e6 at step {i + 1}")
            out[i] = x, y, z
    elif method == "euler":
        for i in range(p.steps):
            dx, dy, dz = rhs(x, y, z)
            x, y, z = x + h * dx, y + h * dy, z + h * dz
            if not max(abs(x), abs(y), abs(z)) <= _BLOWUP:
                raise NumericalBlowup(f"trajectory left |coord| <= 1e6 at step {i + 1}")
            out[i] = x, y, z
    else:
        raise ValueError(f"unknown method {method!r}")
    return out


@dataclass(frozen=True)
class MandelbrotWindow:
    """Rectangle of the complex plane rendered on a ``width x height`` grid."""

    x_min: float = -3.0
    x_max: float = 3.0
    y_min: float = -2.0
    y_max: float = 2.0
    width: int = 600
    height: int = 400
    max_iter: int = 1024
    escape_radius: float = 2.0

    def __post_init__(self) -> None:
        if not self.x_min < self.x_max:
            raise ValueError("x_min must be < x_max")
        if not self.y_min < self.y_max:
            raise ValueError("y_min must be < y_max")
        if self.width < 1 or self.height < 1:
            raise ValueError("width and height must be >= 1")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if not self.escape_radius >= 2:
            raise ValueError("escape_radius must be >= 2")

    def real_axis(self) -> np.ndarray:
        """Pixel-center real parts, left to right."""
        step = (self.x_max - self.x_min) / self.width
        mid = 0.5 * (self.x_min + self.x_max)
        return mid + (np.arange(self.width) + 0.5 - 0.5 * self.width) * step

    def imag_axis(self) -> np.ndarray:
        """Pixel-center imaginary parts, top row (``y_max``) first.

        Offsets from the window center are half-integer multiples of the
        pixel size, so a window symmetric about the real axis yields
        exactly negated rows.
        """
        step = (self.y_max - self.y_min) / self.height
        mid = 0.5 * (self.y_min + self.y_max)
        return mid + (0.5 * self.height - np.arange(self.height) - 0.5) * step


def escape_count(c: complex, max_iter: int = 1024, escape_radius: float = 2.0) -> int:
    """First ``n`` with ``|Z_n| > escape_radius`` for ``Z_0 = 0``, else ``max_iter``."""
    zr = zi = 0.0
    cr, ci = float(c.real), float(c.imag)
    r2 = escape_radius * escape_radius
    for n in range(1, max_iter + 1):
        zr, zi = zr * zr - zi * zi + cr, 2.0 * zr * zi + ci
        if zr * zr + zi * zi > r2:
            return n
    return max_iter


def mandelbrot_grid(w: MandelbrotWindow) -> np.ndarray:
    """Escape counts for every pixel center, shape ``(height, width)``.

    Same rule as :func:`escape_count`; pixels that never escape hold
    ``max_iter``. Row 0 is the top edge of the window.
    """
    cr_axis = w.real_axis()
    ci_axis = w.imag_axis()
    cr = np.broadcast_to(cr_axis[None, :], (w.height, w.width)).ravel()
    ci = np.broadcast_to(ci_axis[:, None], (w.height, w.width)).ravel()
    counts = np.full(cr.size, w.max_iter, dtype=np.int64)
    idx = np.arange(cr.size)
    zr = np.zeros(cr.size)
    zi = np.zeros(cr.size)
    r2 = w.escape_radius * w.escape_radius
    for n in range(1, w.max_iter + 1):
        zr, zi = zr * zr - zi * zi + cr, 2.0 * zr * zi + ci
        out = zr * zr + zi * zi > r2
        if out.any():
            counts[idx[out]] = n
            keep = ~out
            idx, zr, zi, cr, ci = idx[keep], zr[keep], zi[keep], cr[keep], ci[keep]
            if idx.size == 0:
                break
    return counts.reshape(w.height, w.width)
