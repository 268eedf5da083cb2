"""Classical phase-space states, quantum states and their characteristic functions.

Units: m = hbar = 1, ``[q, p] = i``.  Momentum representation uses
``psi~(p) ~ sum_j psi(q_j) exp(-i p q_j)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .errors import GridError, StateError
from .grids import Grid1D, Grid2D, trapezoid_2d

SUPPORT_TOL = 1e-6


@dataclass(frozen=True)
class GaussianParams:
    """First and second moments of a Gaussian state."""

    qbar: float
    pbar: float
    sqq: float
    spp: float
    sqp: float = 0.0

    def __post_init__(self):
        for name in ("qbar", "pbar", "sqq", "spp", "sqp"):
            val = float(getattr(self, name))
            if not math.isfinite(val):
                raise StateError("covariance-not-positive-definite", f"{name} is not finite")
            object.__setattr__(self, name, val)
        if self.sqq <= 0 or self.spp <= 0 or self.det <= 0:
            raise StateError(
                "covariance-not-positive-definite",
                f"sqq={self.sqq}, spp={self.spp}, sqp={self.sqp}",
            )

    @classmethod
    def vacuum(cls, qbar: float = 0.0, pbar: float = 0.0) -> "GaussianParams":
        return cls(qbar, pbar, 0.5, 0.5, 0.0)

    @property
    def det(self) -> float:
        """The Schrodinger-Robertson combination ``sqq*spp - sqp**2``."""
        return self.sqq * self.spp - self.sqp ** 2

    @property
    def mean(self) -> np.ndarray:
        return np.array([self.qbar, self.pbar])

    @property
    def cov(self) -> np.ndarray:
        return np.array([[self.sqq, self.sqp], [self.sqp, self.spp]])

    def to_dict(self) -> dict:
        return {"qbar": self.qbar, "pbar": self.pbar, "sqq": self.sqq, "spp": self.spp, "sqp": self.sqp}

    @classmethod
    def from_dict(cls, d: dict) -> "GaussianParams":
        return cls(d["qbar"], d["pbar"], d["sqq"], d["spp"], d.get("sqp", 0.0))


@dataclass(frozen=True)
class PointState:
    """Fluctuation-free classical state ``delta(q - qbar) delta(p - pbar)``.

    Kept analytic everywhere; it is never sampled on a grid.
    """

    qbar: float
    pbar: float

    def to_dict(self) -> dict:
        return {"qbar": float(self.qbar), "pbar": float(self.pbar)}

    @classmethod
    def from_dict(cls, d: dict) -> "PointState":
        return cls(float(d["qbar"]), float(d["pbar"]))


def _readonly(a, dtype=None):
    a = np.array(a, dtype=dtype, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class PhaseSpaceField:
    """Real density ``f(q_i, p_j)`` sampled on a :class:`Grid2D`."""

    grid: Grid2D
    values: np.ndarray

    def __post_init__(self):
        vals = _readonly(self.values, float)
        if vals.shape != self.grid.shape:
            raise GridError("invalid-count", f"values shape {vals.shape} != grid shape {self.grid.shape}")
        object.__setattr__(self, "values", vals)

    def integral(self) -> float:
        return trapezoid_2d(self.values, self.grid)

    def moments(self) -> GaussianParams:
        """Means and covariances by quadrature (returned as Gaussian moments)."""
        q, p = self.grid.mesh()
        f = self.values
        norm = trapezoid_2d(f, self.grid)
        mq = trapezoid_2d(q * f, self.grid) / norm
        mp = trapezoid_2d(p * f, self.grid) / norm
        sqq = trapezoid_2d((q - mq) ** 2 * f, self.grid) / norm
        spp = trapezoid_2d((p - mp) ** 2 * f, self.grid) / norm
        sqp = trapezoid_2d((q - mq) * (p - mp) * f, self.grid) / norm
        return GaussianParams(mq, mp, sqq, spp, sqp)

    def position_marginal(self) -> np.ndarray:
        return self.values @ self.grid.gp.weights

    def momentum_marginal(self) -> np.ndarray:
        return self.grid.gq.weights @ self.values

    def violations(self, tol: float = 1e-6) -> list[str]:
        out = []
        if self.values.min() < -tol:
            out.append(f"negative value {self.values.min():.3e}")
        if abs(self.integral() - 1.0) > tol:
            out.append(f"integral {self.integral():.12g} != 1")
        return out


@dataclass(frozen=True, eq=False)
class WaveFunction:
    grid: Grid1D
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = _readonly(self.amplitudes, complex)
        if amps.shape != (self.grid.n,):
            raise GridError("invalid-count", f"expected {self.grid.n} amplitudes, got {amps.shape}")
        object.__setattr__(self, "amplitudes", amps)

    def density(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def norm(self) -> float:
        return float(self.grid.weights @ self.density())

    def momentum_density(self) -> tuple[Grid1D, np.ndarray]:
        """``|psi~(p)|^2`` on the conjugate grid, normalized like a density."""
        from .grids import SampledField1D, dft_1d

        spectrum = dft_1d(SampledField1D(self.grid, self.amplitudes), sign=-1)
        return spectrum.grid, np.abs(spectrum.values) ** 2 / (2.0 * np.pi)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Position-representation kernel ``rho(q_i, q_j)``; Hermitized on construction."""

    grid: Grid1D
    entries: np.ndarray

    def __post_init__(self):
        rho = np.array(self.entries, dtype=complex, copy=True)
        if rho.shape != (self.grid.n, self.grid.n):
            raise GridError("invalid-count", f"expected {self.grid.n}x{self.grid.n} matrix, got {rho.shape}")
        rho = 0.5 * (rho + rho.conj().T)
        object.__setattr__(self, "entries", _readonly(rho))

    def diagonal(self) -> np.ndarray:
        return self.entries.diagonal().real

    def trace(self) -> float:
        return float(self.grid.weights @ self.diagonal())

    def operator_matrix(self) -> np.ndarray:
        """Symmetrically weighted kernel ``sqrt(w) rho sqrt(w)`` whose spectrum is that of the operator."""
        s = np.sqrt(self.grid.weights)
        return s[:, None] * self.entries * s[None, :]

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.operator_matrix())

    def min_eigenvalue(self) -> float:
        return float(self.eigenvalues()[0])

    def purity(self) -> float:
        return overlap(self, self)

    def violations(self, tol: float = 1e-6) -> list[str]:
        out = []
        if abs(self.trace() - 1.0) > tol:
            out.append(f"trace {self.trace():.12g} != 1")
        lam = self.min_eigenvalue()
        if lam < -tol:
            out.append(f"negative eigenvalue {lam:.3e}")
        return out


def overlap(a: DensityMatrix, b: DensityMatrix) -> float:
    """``Tr[a b]`` by quadrature; the fidelity against a pure state."""
    if a.grid != b.grid:
        raise GridError("invalid-range", "density matrices live on different grids")
    w = a.grid.weights
    return float(np.real(np.sum((w[:, None] * a.entries * w[None, :]) * b.entries.T)))


def gaussian_phase_density(params: GaussianParams, grid: Grid2D, tol: float = SUPPORT_TOL) -> PhaseSpaceField:
    """Sample the bivariate normal density with the given moments.

    Raises ``grid-too-small`` if the grid does not reach five standard
    deviations on either axis, or if the probability outside it exceeds ``tol``.
    """
    sq, sp = math.sqrt(params.sqq), math.sqrt(params.spp)
    for g, m, s, name in ((grid.gq, params.qbar, sq, "q"), (grid.gp, params.pbar, sp, "p")):
        if g.min > m - 5 * s or g.max < m + 5 * s:
            raise GridError("grid-too-small", f"{name}-grid [{g.min}, {g.max}] does not span mean +- 5 sigma")
    tail = (
        ndtr((grid.gq.min - params.qbar) / sq) + ndtr((params.qbar - grid.gq.max) / sq)
        + ndtr((grid.gp.min - params.pbar) / sp) + ndtr((params.pbar - grid.gp.max) / sp)
    )
    if tail > tol:
        raise GridError("grid-too-small", f"truncated probability {tail:.2e} exceeds {tol:.1e}")
    q, p = grid.mesh()
    dq, dp = q - params.qbar, p - params.pbar
    det = params.det
    quad = (params.spp * dq ** 2 - 2 * params.sqp * dq * dp + params.sqq * dp ** 2) / det
    f = np.exp(-0.5 * quad) / (2 * np.pi * math.sqrt(det))
    return PhaseSpaceField(grid, f)


def gaussian_wavefunction(params: GaussianParams, grid: Grid1D) -> WaveFunction:
    """Minimum-uncertainty pure Gaussian ``psi(q)``."""
    if abs(params.sqp) > 1e-12 or not math.isclose(params.sqq * params.spp, 0.25, rel_tol=1e-9):
        raise StateError(
            "not-minimum-uncertainty",
            f"need sqq*spp = 1/4 and sqp = 0, got {params.sqq * params.spp:.6g}, sqp={params.sqp}",
        )
    q = grid.points
    psi = (2 * np.pi * params.sqq) ** -0.25 * np.exp(
        -((q - params.qbar) ** 2) / (4 * params.sqq) + 1j * params.pbar * q
    )
    return WaveFunction(grid, psi)


def density_from_wavefunction(psi: WaveFunction) -> DensityMatrix:
    a = psi.amplitudes
    return DensityMatrix(psi.grid, np.outer(a, a.conj()))


def as_density(state) -> DensityMatrix:
    if isinstance(state, DensityMatrix):
        return state
    if isinstance(state, WaveFunction):
        return density_from_wavefunction(state)
    raise TypeError(f"expected a WaveFunction or DensityMatrix, got {type(state).__name__}")


def classical_characteristic(f, k1, k2):
    """``chi(k1, k2) = <exp(i(k1 q + k2 p))>`` of a classical state.

    Sampled fields are integrated with the 2-D trapezoid rule; Gaussian
    parameters and point states use closed forms.  ``k1`` and ``k2`` may be
    arrays of equal shape.
    """
    k1a, k2a = np.broadcast_arrays(np.asarray(k1, dtype=float), np.asarray(k2, dtype=float))
    if isinstance(f, PointState):
        out = np.exp(1j * (k1a * f.qbar + k2a * f.pbar))
    elif isinstance(f, GaussianParams):
        var = k1a ** 2 * f.sqq + k2a ** 2 * f.spp + 2 * k1a * k2a * f.sqp
        out = np.exp(1j * (k1a * f.qbar + k2a * f.pbar) - 0.5 * var)
    elif isinstance(f, PhaseSpaceField):
        out = _sampled_characteristic(f, k1a.ravel(), k2a.ravel()).reshape(k1a.shape)
    else:
        raise TypeError(f"unsupported classical state {type(f).__name__}")
    return complex(out) if out.ndim == 0 else out


def _sampled_characteristic(f: PhaseSpaceField, k1, k2):
    gq, gp = f.grid.gq, f.grid.gp
    fw = gq.weights[:, None] * f.values * gp.weights[None, :]
    out = np.empty(k1.shape, dtype=complex)
    for start in range(0, k1.size, 1024):
        sl = slice(start, start + 1024)
        a = np.exp(1j * np.outer(k1[sl], gq.points))
        b = np.exp(1j * np.outer(k2[sl], gp.points))
        out[sl] = np.einsum("mi,im->m", a, fw @ b.T)
    return out


def shifted_diagonals(rho: DensityMatrix, shifts) -> np.ndarray:
    """``S[m, j] = rho(q_j + shifts[m], q_j)`` with band-limited interpolation.

    Points whose shifted argument falls off the grid are zero.
    """
    g = rho.grid
    n, h = g.n, g.step
    kappa = 2 * np.pi * np.fft.fftfreq(n, h)
    coef = np.fft.fft(rho.entries, axis=0)
    if n % 2 == 0:
        # split the Nyquist term into +-pi/h halves
        coef = np.vstack([coef, 0.5 * coef[n // 2]])
        coef[n // 2] *= 0.5
        kappa = np.append(kappa, np.pi / h)
    coef = coef * np.exp(1j * np.outer(kappa, g.points - g.min)) / n
    shifts = np.asarray(shifts, dtype=float)
    s = np.exp(1j * np.outer(shifts, kappa)) @ coef
    target = g.points[None, :] + shifts[:, None]
    s[~g.contains(target, 1e-12 * h)] = 0.0
    return s


def quantum_characteristic_many(rho: DensityMatrix, k1, k2) -> np.ndarray:
    """Vectorized ``Tr[rho exp(i(k1 q + k2 p))]`` without argument checks.

    Uses ``exp(i(k1 q + k2 p)) = exp(i k1 q) exp(i k2 p) exp(i k1 k2 / 2)``
    and ``<q|exp(i k2 p)|q'> = delta(q + k2 - q')``, giving
    ``chi = exp(i k1 k2/2) * integral rho(q + k2, q) exp(i k1 q) dq``.
    """
    k1 = np.asarray(k1, dtype=float).ravel()
    k2 = np.asarray(k2, dtype=float).ravel()
    g = rho.grid
    out = np.empty(k1.shape, dtype=complex)
    for start in range(0, k1.size, 1024):
        sl = slice(start, start + 1024)
        s = shifted_diagonals(rho, k2[sl])
        phase = np.exp(1j * np.outer(k1[sl], g.points))
        out[sl] = np.exp(0.5j * k1[sl] * k2[sl]) * ((s * phase) @ g.weights)
    return out


def quantum_characteristic(rho, k1, k2, tol: float = SUPPORT_TOL):
    """``chi(k1, k2) = Tr[rho exp(i(k1 q + k2 p))]`` for a quantum state.

    Raises ``argument-outside-grid`` when ``|k2|`` exceeds the grid span (the
    shifted kernel no longer overlaps the grid) and ``grid-leakage`` when
    more than ``tol`` probability sits at the grid edges, where truncation
    would corrupt the shifted kernel.
    """
    rho = as_density(rho)
    k1a, k2a = np.broadcast_arrays(np.asarray(k1, dtype=float), np.asarray(k2, dtype=float))
    if np.any(np.abs(k2a) > rho.grid.span):
        raise GridError("argument-outside-grid", f"|k2| exceeds the grid span {rho.grid.span}")
    check_leakage(rho, tol)
    out = quantum_characteristic_many(rho, k1a, k2a).reshape(k1a.shape)
    return complex(out) if out.ndim == 0 else out


def check_leakage(rho: DensityMatrix, tol: float = SUPPORT_TOL, fraction: float = 0.02):
    from .grids import edge_mass

    leak = edge_mass(rho.diagonal(), rho.grid, fraction)
    if leak > tol:
        raise GridError("grid-leakage", f"probability {leak:.2e} in the grid edge band exceeds {tol:.1e}")
