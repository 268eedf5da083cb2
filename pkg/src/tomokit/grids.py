"""Uniform grids, sampled fields, quadrature and Fourier sums.

Grids are endpoint-inclusive: ``n`` points, ``n - 1`` intervals.  The
frequency grid conjugate to a grid with step ``h`` has ``n`` points with
spacing ``2*pi/(n*h)`` starting at ``-pi/h``, so it covers ``[-pi/h, pi/h)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import GridError


@dataclass(frozen=True)
class Grid1D:
    min: float
    max: float
    n: int

    def __post_init__(self):
        if not (np.isfinite(self.min) and np.isfinite(self.max)) or self.min >= self.max:
            raise GridError("invalid-range", f"need min < max, got [{self.min}, {self.max}]")
        if int(self.n) != self.n or self.n < 2:
            raise GridError("invalid-count", f"need n >= 2, got {self.n}")
        object.__setattr__(self, "min", float(self.min))
        object.__setattr__(self, "max", float(self.max))
        object.__setattr__(self, "n", int(self.n))

    @property
    def step(self) -> float:
        return (self.max - self.min) / (self.n - 1)

    @property
    def span(self) -> float:
        return self.max - self.min

    @cached_property
    def points(self) -> np.ndarray:
        pts = self.min + self.step * np.arange(self.n)
        pts[-1] = self.max
        pts.setflags(write=False)
        return pts

    def point(self, i: int) -> float:
        return float(self.points[i])

    def index(self, x: float) -> int:
        """Index of the grid point nearest to ``x``."""
        return int(np.clip(np.rint((x - self.min) / self.step), 0, self.n - 1))

    def contains(self, x, pad: float = 0.0):
        return (x >= self.min - pad) & (x <= self.max + pad)

    @cached_property
    def weights(self) -> np.ndarray:
        """Trapezoid weights."""
        w = np.full(self.n, self.step)
        w[0] = w[-1] = 0.5 * self.step
        w.setflags(write=False)
        return w

    def conjugate(self) -> "Grid1D":
        """Frequency grid covering ``[-pi/step, pi/step)`` with ``n`` points."""
        dk = 2.0 * np.pi / (self.n * self.step)
        kmin = -np.pi / self.step
        return Grid1D(kmin, kmin + (self.n - 1) * dk, self.n)

    def __str__(self):
        return f"{self.min:.17g}:{self.max:.17g}:{self.n}"


def make_uniform_grid(min: float, max: float, n: int) -> Grid1D:
    return Grid1D(min, max, n)


def parse_grid(text: str) -> Grid1D:
    """Parse the ``"min:max:n"`` grid syntax."""
    parts = text.split(":")
    if len(parts) != 3:
        raise GridError("invalid-range", f"grid must be written 'min:max:n', got {text!r}")
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise GridError("invalid-range", f"cannot parse grid {text!r}") from exc
    return Grid1D(lo, hi, n)


def symmetric_grid(half_width: float, n: int) -> Grid1D:
    return Grid1D(-half_width, half_width, n)


@dataclass(frozen=True)
class Grid2D:
    """Rectangular phase-plane grid; arrays are indexed ``[i_q, j_p]``."""

    gq: Grid1D
    gp: Grid1D

    @property
    def shape(self):
        return (self.gq.n, self.gp.n)

    def mesh(self):
        return np.meshgrid(self.gq.points, self.gp.points, indexing="ij")

    @property
    def cell_weights(self) -> np.ndarray:
        return np.outer(self.gq.weights, self.gp.weights)


@dataclass(frozen=True, eq=False)
class SampledField1D:
    grid: Grid1D
    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, copy=True)
        if vals.ndim != 1 or vals.shape[0] != self.grid.n:
            raise GridError("invalid-count", f"expected {self.grid.n} values, got shape {vals.shape}")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.values)

    def __add__(self, other):
        return SampledField1D(self.grid, self.values + _values_of(other))

    def __mul__(self, scalar):
        return SampledField1D(self.grid, self.values * scalar)

    __rmul__ = __mul__


def _values_of(other):
    return other.values if isinstance(other, SampledField1D) else other


def trapezoid_integral(field: SampledField1D):
    """Trapezoid-rule integral of ``field`` over its grid."""
    val = np.dot(field.grid.weights, field.values)
    return complex(val) if np.iscomplexobj(val) else float(val)


def trapezoid_2d(values: np.ndarray, grid: Grid2D):
    """Trapezoid-rule integral over the phase plane."""
    val = grid.gq.weights @ np.asarray(values) @ grid.gp.weights
    return complex(val) if np.iscomplexobj(val) else float(val)


def fourier_sum(values, grid: Grid1D, k0: float, sign: int, axis: int = -1) -> np.ndarray:
    """Exact sums ``sum_j values[j] * exp(sign*1j*k_m*x_j)``.

    ``k_m = k0 + m*dk`` with ``dk = 2*pi/(n*step)``; evaluated with one FFT.
    Works along ``axis`` so a stack of slices is transformed in one call.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    values = np.moveaxis(np.asarray(values), axis, -1)
    n, h, x0 = grid.n, grid.step, grid.min
    j = np.arange(n)
    k = k0 + j * 2.0 * np.pi / (n * h)
    u = values * np.exp(sign * 1j * k0 * h * j)
    s = np.fft.fft(u, axis=-1) if sign < 0 else n * np.fft.ifft(u, axis=-1)
    return np.moveaxis(s * np.exp(sign * 1j * k * x0), -1, axis)


def dft_1d(field: SampledField1D, sign: int = -1, out_grid: Grid1D | None = None) -> SampledField1D:
    """Riemann-sum Fourier transform ``F(k) = sum_j f_j exp(sign*i*k*x_j) * step``.

    The output grid defaults to the conjugate grid; any grid with the same
    ``n`` and step ``2*pi/(n*step)`` is accepted.
    """
    grid = field.grid
    out = grid.conjugate() if out_grid is None else out_grid
    _check_conjugate(grid, out)
    vals = fourier_sum(field.values, grid, out.min, sign) * grid.step
    return SampledField1D(out, vals)


def inverse_dft_1d(spectrum: SampledField1D, sign: int = -1, out_grid: Grid1D | None = None) -> SampledField1D:
    """Inverse of :func:`dft_1d` with the same ``sign``.

    ``f(x) = (1/2pi) sum_m F(k_m) exp(-sign*i*k_m*x) * dk``; ``dft_1d``
    followed by this call on the original grid is the identity.
    """
    kgrid = spectrum.grid
    out = kgrid.conjugate() if out_grid is None else out_grid
    _check_conjugate(kgrid, out)
    vals = fourier_sum(spectrum.values, kgrid, out.min, -sign) * kgrid.step / (2.0 * np.pi)
    return SampledField1D(out, vals)


def _check_conjugate(a: Grid1D, b: Grid1D):
    if a.n != b.n or not np.isclose(a.step * b.step * a.n, 2.0 * np.pi, rtol=1e-9):
        raise GridError("invalid-range", "output grid is not conjugate to the input grid")


def periodic_sinc(u, h: float, n: int):
    """Band-limited interpolation kernel of an ``n``-point grid with step ``h``.

    Even ``n`` splits the Nyquist term symmetrically, which keeps real data real.
    """
    u = np.asarray(u, dtype=float)
    L = n * h
    num = np.sin(np.pi * u / h)
    if n % 2 == 0:
        den = n * np.tan(np.pi * u / L)
    else:
        den = n * np.sin(np.pi * u / L)
    small = np.abs(den) < 1e-12
    out = np.where(small, 1.0, num / np.where(small, 1.0, den))
    return out


def interp_bandlimited(values, grid: Grid1D, x) -> np.ndarray:
    """Trigonometric interpolation of samples at arbitrary ``x``.

    Points outside ``[grid.min, grid.max]`` evaluate to zero: samples are
    taken to describe a function supported on the grid.
    """
    x = np.asarray(x, dtype=float)
    values = np.asarray(values)
    kern = periodic_sinc(x[..., None] - grid.points, grid.step, grid.n)
    out = kern @ values
    eps = 1e-12 * grid.step
    return np.where(grid.contains(x, eps), out, 0.0)


def edge_mass(values, grid: Grid1D, fraction: float = 0.02) -> float:
    """Integral of ``|values|`` over the outer ``fraction`` of the grid on each side."""
    m = max(1, int(np.ceil(fraction * grid.n)))
    a = np.abs(np.asarray(values))
    return float((a[:m].sum() + a[-m:].sum()) * grid.step)
