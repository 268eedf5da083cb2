"""Symplectic tomograms: forward transforms, Gaussian closed forms, inversion.

A tomogram ``W(X, mu, nu)`` is the probability density of ``X = mu q + nu p``.
Forward transforms never discretize ``delta(X - mu q - nu p)``: every slice
is obtained from the characteristic function along the ray,
``c(k) = <exp(i k X)> = chi(k mu, k nu)``, followed by an exact inverse DFT
onto the X grid (Fourier-slice theorem).

Slices sampled on the unit circle ``(cos t, sin t)`` determine the tomogram
everywhere through homogeneity, ``W(lX, l mu, l nu) = W(X, mu, nu) / |l|``.
:class:`PolarCharacteristic` turns such a set into ``chi(k1, k2)`` at
arbitrary points, which is what ray resampling, free evolution, group
functions and the density-matrix reconstruction are built on.

Density-matrix kernel
---------------------
With ``[q, p] = i``, ``exp(-i(mu q + nu p)) = exp(-i mu q/2) exp(-i nu p) exp(-i mu q/2)``
and ``exp(-i nu p)|q'> = |q' + nu>``, so

    <q| exp(-i(mu q + nu p)) |q'> = exp(-i mu (q + q')/2) delta(q - q' - nu).

Inserting this in ``rho = (1/2pi) int W(X, mu, nu) exp(i(X - mu q - nu p)) dX dmu dnu``
fixes ``nu = q - q'`` and leaves

    rho(q, q') = (1/2pi) int dmu int dX W(X, mu, q - q') exp(i(X - mu (q + q')/2))
               = (1/2pi) int dmu chi(mu, q - q') exp(-i mu (q + q')/2),

where ``int dX W(X, mu, nu) exp(iX) = chi(mu, nu)`` by homogeneity.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence, Union

import numpy as np
from scipy.special import ndtr

from .errors import GridError, NonPhysicalError, RayError, SamplingError
from .grids import Grid1D, Grid2D, edge_mass, fourier_sum, interp_bandlimited
from .states import (
    DensityMatrix,
    GaussianParams,
    PhaseSpaceField,
    PointState,
    as_density,
    check_leakage,
    classical_characteristic,
    quantum_characteristic_many,
)

NONNEG_TOL = 1e-9
NORM_TOL = 1e-6
EDGE_TOL = 1e-6
MIN_ANGLES = 64


@dataclass(frozen=True)
class Ray:
    """Direction ``(mu, nu)`` of the observable ``X = mu q + nu p``."""

    mu: float
    nu: float

    def __post_init__(self):
        mu, nu = float(self.mu), float(self.nu)
        if not (math.isfinite(mu) and math.isfinite(nu)) or (mu == 0.0 and nu == 0.0):
            raise RayError("degenerate-ray", f"({self.mu}, {self.nu})")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "nu", nu)

    @classmethod
    def from_angle(cls, theta: float, s: float = 1.0) -> "Ray":
        """``mu = s cos(theta)``, ``nu = sin(theta) / s``."""
        if s <= 0:
            raise RayError("degenerate-ray", f"scale s must be positive, got {s}")
        return cls(s * math.cos(theta), math.sin(theta) / s)

    @property
    def norm(self) -> float:
        return math.hypot(self.mu, self.nu)

    @property
    def theta(self) -> float:
        return math.atan2(self.nu, self.mu)

    def scaled(self, lam: float) -> "Ray":
        return Ray(lam * self.mu, lam * self.nu)

    def as_tuple(self):
        return (self.mu, self.nu)


RaySet = Sequence[Ray]


def unit_circle_rays(n: int, s: float = 1.0) -> tuple[Ray, ...]:
    """``n`` rays with angles ``a*pi/n`` on ``[0, pi)``."""
    return tuple(Ray.from_angle(a * np.pi / n, s) for a in range(n))


@dataclass(frozen=True, eq=False)
class TomogramSlice:
    ray: Ray
    xgrid: Grid1D
    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=float, copy=True)
        if vals.shape != (self.xgrid.n,):
            raise GridError("invalid-count", f"expected {self.xgrid.n} values, got {vals.shape}")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def integral(self) -> float:
        return float(self.xgrid.weights @ self.values)

    def violations(self, nonneg_tol: float = NONNEG_TOL, norm_tol: float = NORM_TOL) -> list[str]:
        out = []
        if self.values.min() < -nonneg_tol:
            out.append(f"ray {self.ray.as_tuple()}: negative value {self.values.min():.3e}")
        if abs(self.integral() - 1.0) > norm_tol:
            out.append(f"ray {self.ray.as_tuple()}: integral {self.integral():.12g}")
        return out


@dataclass(frozen=True)
class DeltaSlice:
    """Analytic slice ``delta(X - center)`` of a point state."""

    ray: Ray
    center: float


@dataclass(frozen=True, eq=False)
class TomogramField:
    slices: tuple
    time: float = 0.0

    def __post_init__(self):
        slices = tuple(self.slices)
        if not slices:
            raise SamplingError("insufficient-sampling", "a tomogram needs at least one slice")
        seen = set()
        for sl in slices:
            key = sl.ray.as_tuple()
            if key in seen:
                raise RayError("duplicate-ray", f"ray {key} appears twice")
            seen.add(key)
        object.__setattr__(self, "slices", slices)
        object.__setattr__(self, "time", float(self.time))

    @classmethod
    def from_matrix(cls, rays: RaySet, xgrid: Grid1D, values, time: float = 0.0) -> "TomogramField":
        values = np.asarray(values, dtype=float)
        return cls(tuple(TomogramSlice(r, xgrid, v) for r, v in zip(rays, values)), time)

    @property
    def rays(self) -> tuple[Ray, ...]:
        return tuple(sl.ray for sl in self.slices)

    @cached_property
    def xgrid(self) -> Grid1D:
        g = self.slices[0].xgrid
        if any(sl.xgrid != g for sl in self.slices[1:]):
            raise GridError("inconsistent-xgrids", "slices are sampled on different X grids")
        return g

    @cached_property
    def matrix(self) -> np.ndarray:
        """Slice values stacked as ``[ray, X]`` (requires a common X grid)."""
        _ = self.xgrid
        m = np.vstack([sl.values for sl in self.slices])
        m.setflags(write=False)
        return m

    def slice_for(self, ray: Ray) -> TomogramSlice | None:
        for sl in self.slices:
            if sl.ray == ray:
                return sl
        return None

    def violations(self, nonneg_tol: float = NONNEG_TOL, norm_tol: float = NORM_TOL) -> list[str]:
        out = []
        for sl in self.slices:
            out.extend(sl.violations(nonneg_tol, norm_tol))
        return out

    @cached_property
    def polar(self) -> "PolarCharacteristic":
        return PolarCharacteristic(self)


@dataclass(frozen=True)
class GaussianTomogram:
    params: GaussianParams
    time: float = 0.0

    def to_dict(self) -> dict:
        return {**self.params.to_dict(), "time": float(self.time)}

    @classmethod
    def from_dict(cls, d: dict) -> "GaussianTomogram":
        return cls(GaussianParams.from_dict(d), float(d.get("time", 0.0)))


def sigma_xx(g: GaussianTomogram | GaussianParams, ray: Ray) -> float:
    """Variance of ``X = mu q + nu p``: ``mu^2 sqq + nu^2 spp + 2 mu nu sqp``."""
    p = g.params if isinstance(g, GaussianTomogram) else g
    return ray.mu ** 2 * p.sqq + ray.nu ** 2 * p.spp + 2 * ray.mu * ray.nu * p.sqp


def gaussian_mean(g: GaussianTomogram | GaussianParams, ray: Ray) -> float:
    p = g.params if isinstance(g, GaussianTomogram) else g
    return ray.mu * p.qbar + ray.nu * p.pbar


def gaussian_tomogram_eval(g: GaussianTomogram | GaussianParams, ray: Ray, X):
    """Normal density in ``X`` with mean ``mu qbar + nu pbar`` and variance ``sigma_xx``."""
    var = sigma_xx(g, ray)
    x = np.asarray(X, dtype=float)
    out = np.exp(-0.5 * (x - gaussian_mean(g, ray)) ** 2 / var) / math.sqrt(2 * np.pi * var)
    return float(out) if out.ndim == 0 else out


def sample_gaussian_tomogram(g: GaussianTomogram | GaussianParams, rays: RaySet, xgrid: Grid1D,
                             tol: float = EDGE_TOL) -> TomogramField:
    """Closed-form slices on ``xgrid``; raises ``xgrid-too-small`` if a slice loses more than ``tol`` mass."""
    time = g.time if isinstance(g, GaussianTomogram) else 0.0
    for r in rays:
        m, sd = gaussian_mean(g, r), math.sqrt(sigma_xx(g, r))
        lost = ndtr((xgrid.min - m) / sd) + ndtr((m - xgrid.max) / sd)
        if lost > tol:
            raise GridError("xgrid-too-small", f"ray {r.as_tuple()}: {lost:.2e} probability outside the X grid")
    vals = [gaussian_tomogram_eval(g, r, xgrid.points) for r in rays]
    return TomogramField.from_matrix(rays, xgrid, vals, time)


# --------------------------------------------------------------------------
# forward transforms


def _slices_from_line_characteristic(c, xgrid: Grid1D, tol: float, what: str) -> np.ndarray:
    """Invert ``c[..., m] = <exp(i k_m X)>`` (k on the conjugate grid) to densities."""
    kgrid = xgrid.conjugate()
    w = fourier_sum(c, kgrid, xgrid.min, -1) * kgrid.step / (2 * np.pi)
    w = np.atleast_2d(w.real)
    for row in w:
        leak = edge_mass(row, xgrid)
        if leak > tol:
            raise GridError("xgrid-too-small", f"{what}: {leak:.2e} probability at the X-grid edges")
    return w


def _support_interval(marginal, grid: Grid1D, tol: float):
    """Smallest interval holding all but ``tol`` of a 1-D marginal's mass."""
    cdf = np.cumsum(np.abs(marginal) * grid.weights)
    total = cdf[-1]
    lo = grid.points[min(np.searchsorted(cdf, 0.5 * tol * total), grid.n - 1)]
    hi = grid.points[min(np.searchsorted(cdf, (1 - 0.5 * tol) * total), grid.n - 1)]
    return lo, hi


def radon_classical(f, rays: RaySet, xgrid: Grid1D | None = None, tol: float = EDGE_TOL):
    """Tomogram of a classical state.

    * :class:`PhaseSpaceField` -> sampled :class:`TomogramField`, computed from
      ``classical_characteristic`` along each ray.  Frequencies beyond the
      phase grid's Nyquist band are set to zero.
    * :class:`GaussianParams` -> samples of :func:`gaussian_tomogram_eval`.
    * :class:`PointState` -> tuple of analytic :class:`DeltaSlice`.
    """
    rays = tuple(rays)
    if isinstance(f, PointState):
        return tuple(DeltaSlice(r, r.mu * f.qbar + r.nu * f.pbar) for r in rays)
    if xgrid is None:
        raise GridError("xgrid-too-small", "an X grid is required for sampled tomograms")
    if isinstance(f, GaussianParams):
        return sample_gaussian_tomogram(f, rays, xgrid)
    if not isinstance(f, PhaseSpaceField):
        raise TypeError(f"unsupported classical state {type(f).__name__}")

    gq, gp = f.grid.gq, f.grid.gp
    qlo, qhi = _support_interval(f.position_marginal(), gq, tol)
    plo, phi = _support_interval(f.momentum_marginal(), gp, tol)
    k = xgrid.conjugate().points
    rows = []
    for r in rays:
        xs = [r.mu * a + r.nu * b for a in (qlo, qhi) for b in (plo, phi)]
        if min(xs) < xgrid.min or max(xs) > xgrid.max:
            raise GridError(
                "xgrid-too-small",
                f"ray {r.as_tuple()}: support maps to [{min(xs):.3g}, {max(xs):.3g}], "
                f"X grid is [{xgrid.min}, {xgrid.max}]",
            )
        band = (np.abs(k * r.mu) <= np.pi / gq.step) & (np.abs(k * r.nu) <= np.pi / gp.step)
        rows.append(_line_characteristic(
            lambda kk, r=r: classical_characteristic(f, kk * r.mu, kk * r.nu), k, band))
    w = _slices_from_line_characteristic(np.array(rows), xgrid, tol, "radon_classical")
    return TomogramField.from_matrix(rays, xgrid, w)


def _line_characteristic(chi_ray, k, band):
    """``chi_ray(k)`` on the sorted grid ``k`` inside ``band``, zero elsewhere.

    Only ``k >= 0`` is evaluated where a mirrored partner exists; negative
    frequencies follow from ``chi(-k) = conj(chi(k))`` (real densities).
    """
    c = np.zeros(k.shape, dtype=complex)
    nonneg = band & (k >= 0)
    c[nonneg] = chi_ray(k[nonneg])
    neg = np.nonzero(band & (k < 0))[0]
    if neg.size:
        j = np.clip(np.searchsorted(k, -k[neg]), 0, k.size - 1)
        ok = np.isclose(k[j], -k[neg], rtol=0, atol=1e-9 * (abs(k[0]) + 1)) & nonneg[j]
        c[neg[ok]] = np.conj(c[j[ok]])
        rest = neg[~ok]
        if rest.size:
            c[rest] = chi_ray(k[rest])
    return c


def tomogram_quantum(state, rays: RaySet, xgrid: Grid1D, tol: float = EDGE_TOL) -> TomogramField:
    """Tomogram of a quantum state (wavefunction or density matrix).

    ``W(X, mu, nu) = (1/2pi) int exp(-ikX) chi(k mu, k nu) dk`` with ``chi`` the
    quantum characteristic function; ``nu = 0`` slices use
    ``W(X, mu, 0) = rho(X/mu, X/mu) / |mu|`` directly.
    """
    rho = as_density(state)
    check_leakage(rho, max(tol, 1e-6))
    g = rho.grid
    k = xgrid.conjugate().points
    rows, direct = [], {}
    for idx, r in enumerate(rays):
        if r.nu == 0.0:
            direct[idx] = interp_bandlimited(rho.diagonal(), g, xgrid.points / r.mu) / abs(r.mu)
            rows.append(np.zeros(k.shape, dtype=complex))
            continue
        band = (np.abs(k * r.mu) <= np.pi / g.step) & (np.abs(k * r.nu) < g.span)
        rows.append(_line_characteristic(
            lambda kk, r=r: quantum_characteristic_many(rho, kk * r.mu, kk * r.nu), k, band))
    w = _slices_from_line_characteristic(np.array(rows), xgrid, tol, "tomogram_quantum")
    for idx, vals in direct.items():
        w[idx] = vals
    return TomogramField.from_matrix(tuple(rays), xgrid, w)


# --------------------------------------------------------------------------
# unit-circle ray sets


def polar_angles(rays: RaySet, min_angles: int = 1):
    """Angles of a uniform unit-circle ray set, or raise.

    Rays must have unit norm, angles in ``[0, pi)`` and uniform spacing
    ``pi / n`` (any offset).
    """
    n = len(rays)
    if n < min_angles:
        raise SamplingError("insufficient-angular-sampling", f"{n} angles < {min_angles}")
    norms = np.array([r.norm for r in rays])
    if np.any(np.abs(norms - 1.0) > 1e-9):
        raise SamplingError("insufficient-angular-sampling", "rays are not on the unit circle")
    theta = np.array([r.theta for r in rays])
    if np.any(theta < -1e-12) or np.any(theta >= np.pi - 1e-12):
        raise SamplingError("insufficient-angular-sampling", "ray angles must lie in [0, pi)")
    theta = np.clip(theta, 0.0, None)
    order = np.argsort(theta)
    gaps = np.diff(theta[order])
    if n > 1 and np.any(np.abs(gaps - np.pi / n) > 1e-9):
        raise SamplingError("insufficient-angular-sampling", "ray angles are not uniformly spaced over [0, pi)")
    return theta, order


class PolarCharacteristic:
    """``chi(k1, k2)`` of a tomogram stored on a uniform unit-circle ray set.

    For each stored angle the slice characteristic ``chi_a(k)`` is tabulated on
    a fine radial grid (zero-padded FFT, exact for the sampled slice).  Values
    off the table are obtained with 4-point Lagrange interpolation in ``k`` and
    trigonometric interpolation over the ``2n`` directions of the full circle,
    which is exact for angular band limits below ``n``.
    """

    def __init__(self, field: TomogramField, cutoff: float = 1e-14, radial_step: float | None = None):
        theta, order = polar_angles(field.rays)
        xg = field.xgrid
        n = len(theta)
        self.n_angles = n
        self.theta0 = float(theta[order[0]])
        wmat = field.matrix[order] * xg.weights

        # band limit from the conjugate-grid spectrum
        kg = xg.conjugate()
        spectrum = np.abs(fourier_sum(wmat, xg, kg.min, +1))
        live = np.nonzero(spectrum.max(axis=0) > cutoff)[0]
        kmax = np.pi / xg.step
        if live.size:
            kmax = min(kmax, max(abs(kg.points[live[0]]), abs(kg.points[live[-1]])) + 2 * kg.step)
        self.kmax = float(kmax)

        xext = max(abs(xg.min), abs(xg.max))
        dk = radial_step or min(0.02, 0.05 / xext)
        pad = int(np.ceil(kg.step / dk))
        pad += pad % 2
        dk = kg.step / pad
        npad = xg.n * pad
        big = Grid1D(xg.min, xg.min + (npad - 1) * xg.step, npad)
        padded = np.zeros((n, npad))
        padded[:, : xg.n] = wmat
        kbig = big.conjugate()
        full = fourier_sum(padded, big, kbig.min, +1)
        nr = int(np.ceil(self.kmax / dk)) + 4
        i0 = npad // 2  # index of k = 0
        r = np.arange(-3, nr + 1)
        self.dk = dk
        self.r0 = -3
        full = np.concatenate([full, np.zeros((n, 1))], axis=1)  # column -1 -> zero
        ip, ineg = i0 + r, i0 - r
        ip[(ip < 0) | (ip >= npad)] = -1
        ineg[(ineg < 0) | (ineg >= npad)] = -1
        table = np.concatenate([full[:, ip], full[:, ineg]], axis=0)  # [direction, radial]
        self._m = np.fft.fftfreq(2 * n, 1.0 / (2 * n))
        coef = np.fft.fft(table, axis=0) / (2 * n)
        # split the Nyquist mode symmetrically between -n and +n
        coef = np.vstack([coef, 0.5 * coef[n]])
        coef[n] *= 0.5
        self._m = np.append(self._m, float(n))
        self._coef = np.ascontiguousarray(coef.T)  # [radial, mode]

    def __call__(self, k1, k2) -> np.ndarray:
        k1a, k2a = np.broadcast_arrays(np.asarray(k1, dtype=float), np.asarray(k2, dtype=float))
        shape = k1a.shape
        k1f, k2f = k1a.ravel(), k2a.ravel()
        s = np.hypot(k1f, k2f)
        phi = np.arctan2(k2f, k1f) - self.theta0
        out = np.zeros(s.shape, dtype=complex)
        live = s <= self.kmax
        u = s[live] / self.dk - self.r0
        base = np.floor(u).astype(int) - 1
        frac = u - base
        lw = np.stack(
            [
                -(frac - 1) * (frac - 2) * (frac - 3) / 6,
                frac * (frac - 2) * (frac - 3) / 2,
                -frac * (frac - 1) * (frac - 3) / 2,
                frac * (frac - 1) * (frac - 2) / 6,
            ],
            axis=1,
        )
        ph = phi[live]
        res = np.empty(u.shape, dtype=complex)
        for start in range(0, u.size, 2048):
            sl = slice(start, start + 2048)
            rows = base[sl, None] + np.arange(4)
            c = np.einsum("pr,prm->pm", lw[sl], self._coef[rows])
            e = np.exp(1j * np.outer(ph[sl], self._m))
            res[sl] = np.sum(c * e, axis=1)
        out[live] = res
        return out.reshape(shape)


def _parallel_slice(field: TomogramField, ray: Ray):
    """Stored slice parallel to ``ray`` and the scale ``c`` with ``ray = c * stored``."""
    for sl in field.slices:
        r = sl.ray
        cross = r.mu * ray.nu - r.nu * ray.mu
        if abs(cross) <= 1e-12 * r.norm * ray.norm:
            c = (ray.mu * r.mu + ray.nu * r.nu) / r.norm ** 2
            return sl, c
    return None, None


def resample(field: TomogramField, rays: RaySet, xgrid: Grid1D | None = None,
             code: str = "ray-not-representable", tol: float = EDGE_TOL) -> TomogramField:
    """Slices of ``field`` at arbitrary rays via homogeneity.

    A stored slice parallel to the target is rescaled with band-limited
    interpolation in X; otherwise the unit-circle characteristic table is used.
    Raises :class:`RayError` with ``code`` when neither route applies.
    """
    xg = xgrid or field.xgrid
    rows = []
    polar_rows, polar_idx = [], []
    for i, r in enumerate(rays):
        sl, c = _parallel_slice(field, r)
        if sl is not None:
            if c == 1.0 and sl.xgrid == xg:
                rows.append(np.array(sl.values))
            else:
                rows.append(interp_bandlimited(sl.values, sl.xgrid, xg.points / c) / abs(c))
            continue
        try:
            table = field.polar
        except SamplingError as exc:
            raise RayError(code, f"ray {r.as_tuple()} is not in the set and the set is not a unit-circle grid") from exc
        rows.append(None)
        polar_idx.append(i)
        k = xg.conjugate().points
        polar_rows.append(table(k * r.mu, k * r.nu))
    if polar_rows:
        w = _slices_from_line_characteristic(np.array(polar_rows), xg, tol, "resample")
        for i, vals in zip(polar_idx, w):
            rows[i] = vals
    return TomogramField.from_matrix(tuple(rays), xg, np.array(rows), field.time)


def field_characteristic(field: TomogramField, k1, k2):
    """``chi(k1, k2) = int exp(i s X) W(X, theta) dX`` for ``(k1, k2) = s (cos theta, sin theta)``."""
    k1a, k2a = np.broadcast_arrays(np.asarray(k1, dtype=float), np.asarray(k2, dtype=float))
    return field.polar(k1a, k2a)


# --------------------------------------------------------------------------
# inverse transforms


def inverse_radon(W: TomogramField, grid: Grid2D, clip_tol: float = 1e-6,
                  min_angles: int = MIN_ANGLES, cutoff: float = 1e-14) -> PhaseSpaceField:
    """Phase-space density from unit-circle slices.

    ``f(q, p) = (1/4pi^2) int_0^pi dtheta int |k| chi_theta(k) exp(-ik(q cos + p sin)) dk``,
    the polar form of the full inversion integral (the scale direction is
    removed by homogeneity).  The angular integral uses the periodic
    trapezoid rule; the radial one Gauss-Legendre nodes on ``[0, K]``, with
    ``chi_theta`` evaluated exactly from each slice at every node.  Values in
    ``[-clip_tol, 0)`` are clipped to zero.
    """
    theta, _ = polar_angles(W.rays, min_angles)
    xg = W.xgrid
    wmat = W.matrix * xg.weights
    n = len(theta)

    kg = xg.conjugate()
    spectrum = np.abs(fourier_sum(wmat, xg, kg.min, +1))
    live = np.nonzero(spectrum.max(axis=0) > cutoff)[0]
    K = np.pi / xg.step
    if live.size:
        K = min(K, max(abs(kg.points[live[0]]), abs(kg.points[live[-1]])) + 2 * kg.step)

    q, p = grid.gq.points, grid.gp.points
    rmax = math.hypot(max(abs(q[0]), abs(q[-1])), max(abs(p[0]), abs(p[-1])))
    xmax = max(abs(xg.min), abs(xg.max))
    m = int(np.ceil(0.6 * K * (rmax + xmax))) + 32
    nodes, wts = np.polynomial.legendre.leggauss(m)
    k = 0.5 * K * (nodes + 1)
    wk = 0.5 * K * wts * k

    chi = np.exp(1j * np.outer(k, xg.points)) @ wmat.T  # [node, angle]
    f = np.zeros(grid.shape)
    for a in range(n):
        c, s = math.cos(theta[a]), math.sin(theta[a])
        A = np.exp(-1j * np.outer(q * c, k))
        B = (wk * chi[:, a])[:, None] * np.exp(-1j * np.outer(k, p * s))
        f += 2.0 * (A @ B).real
    f *= (np.pi / n) / (4 * np.pi ** 2)
    f[(f < 0) & (f >= -clip_tol)] = 0.0
    return PhaseSpaceField(grid, f)


def reconstruct_density(W: TomogramField, grid: Grid1D, tol: float = 1e-6, strict: bool = True,
                        min_angles: int = MIN_ANGLES) -> DensityMatrix:
    """Density matrix from unit-circle slices.

    Evaluates ``rho(q, q') = (1/2pi) int dmu chi(mu, q - q') exp(-i mu (q + q')/2)``
    (see the module docstring) with ``chi`` from the polar characteristic
    table and a trapezoid rule in ``mu``.  The result is Hermitized.

    If its smallest eigenvalue is below ``-tol`` and ``strict`` is set, a
    :class:`NonPhysicalError` (code ``non-physical-result``) is raised with the
    matrix attached.
    """
    polar_angles(W.rays, min_angles)
    table = W.polar
    K = table.kmax
    qmax = max(abs(grid.min), abs(grid.max))
    xg = W.xgrid
    reach = qmax + max(abs(xg.min), abs(xg.max))
    dmu = min(2 * np.pi / (2 * reach), 0.25)
    nmu = int(np.ceil(K / dmu))
    mu = dmu * np.arange(-nmu, nmu + 1)

    n, h = grid.n, grid.step
    q = grid.points
    half = np.exp(-0.5j * np.outer(q, mu))  # [i, m]
    rho = np.zeros((n, n), dtype=complex)
    for d in range(0, n):
        nu = d * h
        if nu > K:
            break
        chi = table(mu, np.full(mu.shape, nu))
        i = np.arange(d, n)
        j = i - d
        vals = (half[i] * half[j]) @ chi * dmu / (2 * np.pi)
        rho[i, j] = vals
        if d:
            rho[j, i] = np.conj(vals)
    out = DensityMatrix(grid, rho)
    lam = out.min_eigenvalue()
    if strict and lam < -tol:
        raise NonPhysicalError(
            "non-physical-result",
            f"reconstructed operator has eigenvalue {lam:.4g} < -{tol:g}",
            min_eigenvalue=lam,
            result=out,
        )
    return out


TomogramLike = Union[TomogramField, GaussianTomogram]
