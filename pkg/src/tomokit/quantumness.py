"""Tomographic statistics and the classical/quantum admissibility tests.

Weyl-Heisenberg group
---------------------
Elements ``g = (mu, nu, tau)`` multiply as

    (mu_a, nu_a, tau_a) o (mu_b, nu_b, tau_b)
        = (mu_a + mu_b, nu_a + nu_b, tau_a + tau_b + (mu_a nu_b - nu_a mu_b) / 2).

With ``U(g) = exp(i tau) exp(i(mu q + nu p))`` and ``[q, p] = i`` the
Baker-Campbell-Hausdorff formula gives ``U(b) U(a) = U(a o b)``.  The group
function ``phi(g) = Tr[rho U(g)] = exp(i tau) chi(mu, nu)`` then satisfies

    sum_jk conj(c_j) c_k phi(g_j^-1 o g_k) = Tr[rho B B^dagger] >= 0,
    B = sum_k c_k U(g_k),

so every quantum tomogram yields positive semidefinite matrices
``phi(g_j^-1 o g_k)``; a negative eigenvalue certifies that no density
operator has this tomogram.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .errors import RayError, SamplingError, TomokitError
from .grids import edge_mass
from .states import GaussianParams, classical_characteristic
from .tomography import (
    NONNEG_TOL,
    NORM_TOL,
    GaussianTomogram,
    Ray,
    TomogramField,
    TomogramSlice,
    _parallel_slice,
    gaussian_mean,
    resample,
    sigma_xx,
)

SR_BOUND = 0.25
SR_TOL_ANALYTIC = 1e-9
SR_TOL_SAMPLED = 1e-4
PT_TOL = 1e-9
PT_TOL_SAMPLED = 1e-6
MOMENT_TOL = 1e-6


@dataclass(frozen=True)
class CovarianceRecord:
    mean_q: float
    mean_p: float
    sqq: float
    spp: float
    sqp: float
    source: str = "sampled"

    def to_params(self) -> GaussianParams:
        return GaussianParams(self.mean_q, self.mean_p, self.sqq, self.spp, self.sqp)


@dataclass(frozen=True)
class WHElement:
    mu: float
    nu: float
    tau: float = 0.0

    def __post_init__(self):
        for name in ("mu", "nu", "tau"):
            val = float(getattr(self, name))
            if not math.isfinite(val):
                raise ValueError(f"{name} must be finite")
            object.__setattr__(self, name, val)

    @classmethod
    def identity(cls) -> "WHElement":
        return cls(0.0, 0.0, 0.0)

    def inverse(self) -> "WHElement":
        return WHElement(-self.mu, -self.nu, -self.tau)

    def __matmul__(self, other: "WHElement") -> "WHElement":
        return wh_compose(self, other)


def wh_compose(a: WHElement, b: WHElement) -> WHElement:
    """Group product ``a o b`` (see the module docstring)."""
    return WHElement(a.mu + b.mu, a.nu + b.nu, a.tau + b.tau + 0.5 * (a.mu * b.nu - a.nu * b.mu))


def wh_lattice(n: int = 7, extent: float = 2.0) -> tuple[WHElement, ...]:
    """``n x n`` elements with ``(mu, nu)`` on ``[-extent, extent]^2`` and ``tau = 0``."""
    axis = np.linspace(-extent, extent, n)
    return tuple(WHElement(m, v, 0.0) for m in axis for v in axis)


@dataclass(frozen=True)
class ClassificationReport:
    nonneg_ok: bool
    norm_ok: bool
    homogeneity_residual: float | None
    sr_lhs: float
    sr_ok: bool
    pt_min_eigenvalue: float
    pt_ok: bool
    verdict: str
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class ClassifyConfig:
    """Element lattice and tolerances used by :func:`classify`.

    ``sr_tol`` of ``None`` selects 1e-9 for Gaussian tomograms and 1e-4 for
    sampled fields; ``pt_tol`` of ``None`` selects 1e-9 and 1e-6.  Pure
    states put zero eigenvalues in the positive-type matrix, so sampled
    fields need a tolerance above their quadrature noise.  ``refinements`` is the number of times the lattice
    spacing is halved after a passing positive-type test.
    """

    lattice_n: int = 7
    lattice_extent: float = 2.0
    refinements: int = 1
    sr_tol: float | None = None
    pt_tol: float | None = None
    nonneg_tol: float = NONNEG_TOL
    norm_tol: float = NORM_TOL

    def lattices(self):
        n = self.lattice_n
        out = [wh_lattice(n, self.lattice_extent)]
        for _ in range(self.refinements):
            n = 2 * n - 1
            out.append(wh_lattice(n, self.lattice_extent))
        return out


# --------------------------------------------------------------------------
# moments


def _normal_moment(mean: float, var: float, n: int) -> float:
    prev, cur = 1.0, mean
    if n == 0:
        return 1.0
    for k in range(2, n + 1):
        prev, cur = cur, mean * cur + (k - 1) * var * prev
    return cur


def tomographic_moment(W, n: int, ray: Ray | None = None, tol: float = MOMENT_TOL) -> float:
    """``<X^n>`` of one slice.

    ``W`` is a :class:`TomogramSlice` (trapezoid quadrature, ``n <= 4``) or a
    Gaussian tomogram together with ``ray`` (closed-form normal moments).
    Raises ``tail-truncation`` when the mass near the X-grid edges times
    ``max|X|^n`` exceeds ``tol``.
    """
    if n < 0 or int(n) != n:
        raise ValueError(f"moment order must be a non-negative integer, got {n}")
    n = int(n)
    if isinstance(W, (GaussianTomogram, GaussianParams)):
        if ray is None:
            raise RayError("missing-ray", "a ray is required for Gaussian moments")
        return _normal_moment(gaussian_mean(W, ray), sigma_xx(W, ray), n)
    if not isinstance(W, TomogramSlice):
        raise TypeError(f"unsupported slice type {type(W).__name__}")
    if n > 4:
        raise SamplingError("tail-truncation", "sampled moments are limited to n <= 4")
    g = W.xgrid
    xmax = max(abs(g.min), abs(g.max))
    tail = edge_mass(W.values, g) * xmax ** n
    if tail > tol:
        raise SamplingError("tail-truncation", f"edge mass x |X|^{n} = {tail:.2e} exceeds {tol:.1e}")
    return float(g.weights @ (g.points ** n * W.values))


def _mean_var(W: TomogramField, ray: Ray, tol: float):
    """Mean and variance of ``X`` along ``ray``, using homogeneity when the ray is not stored."""
    sl, c = _parallel_slice(W, ray)
    if sl is None:
        # bring the parallel unit-circle direction in from the characteristic table
        unit = Ray(ray.mu / ray.norm, ray.nu / ray.norm)
        try:
            sl = resample(W, [unit], code="missing-ray").slices[0]
        except TomokitError as exc:
            if exc.code == "xgrid-too-small":
                raise
            raise RayError("missing-ray", f"ray {ray.as_tuple()} is neither stored nor reachable") from exc
        c = ray.norm
    m0 = tomographic_moment(sl, 0, tol=tol)
    m1 = tomographic_moment(sl, 1, tol=tol) / m0
    m2 = tomographic_moment(sl, 2, tol=tol) / m0
    return c * m1, c * c * (m2 - m1 * m1)


def covariance_from_tomogram(W, tol: float = MOMENT_TOL) -> CovarianceRecord:
    """Means and covariances from the rays ``(1,0)``, ``(0,1)`` and ``(1,1)``.

    ``sqp = (Var_X(1,1) - sqq - spp) / 2``.  Unstored rays are reached by
    homogeneity from a parallel slice or the unit-circle table; otherwise
    ``missing-ray`` is raised.
    """
    if isinstance(W, (GaussianTomogram, GaussianParams)):
        p = W.params if isinstance(W, GaussianTomogram) else W
        sqq, spp = sigma_xx(p, Ray(1, 0)), sigma_xx(p, Ray(0, 1))
        sqp = 0.5 * (sigma_xx(p, Ray(1, 1)) - sqq - spp)
        return CovarianceRecord(gaussian_mean(p, Ray(1, 0)), gaussian_mean(p, Ray(0, 1)), sqq, spp, sqp, "analytic")
    mq, sqq = _mean_var(W, Ray(1.0, 0.0), tol)
    mp, spp = _mean_var(W, Ray(0.0, 1.0), tol)
    _, sdiag = _mean_var(W, Ray(1.0, 1.0), tol)
    return CovarianceRecord(mq, mp, sqq, spp, 0.5 * (sdiag - sqq - spp), "sampled")


def sr_test(c: CovarianceRecord, tol: float | None = None) -> tuple[float, bool]:
    """Schrodinger-Robertson check ``sqq spp - sqp^2 >= 1/4 - tol``."""
    if tol is None:
        tol = SR_TOL_ANALYTIC if c.source == "analytic" else SR_TOL_SAMPLED
    lhs = c.sqq * c.spp - c.sqp ** 2
    return lhs, bool(lhs >= SR_BOUND - tol)


# --------------------------------------------------------------------------
# group function and positive type


def _line_transform(sl, c: float) -> complex:
    """``int exp(i c X) W(X) dX`` for one stored slice."""
    g = sl.xgrid
    return complex(np.sum(g.weights * sl.values * np.exp(1j * c * g.points)))


def _chi_many(W, mu: np.ndarray, nu: np.ndarray) -> np.ndarray:
    """``int exp(iX) W(X, mu, nu) dX`` for arrays of rays; 1 at the origin."""
    mu = np.asarray(mu, dtype=float)
    nu = np.asarray(nu, dtype=float)
    if isinstance(W, (GaussianTomogram, GaussianParams)):
        p = W.params if isinstance(W, GaussianTomogram) else W
        return np.asarray(classical_characteristic(p, mu, nu), dtype=complex)
    out = np.ones(mu.shape, dtype=complex)
    live = ~((mu == 0) & (nu == 0))
    if not live.any():
        return out
    pairs, inv = np.unique(np.stack([mu[live], nu[live]], axis=1), axis=0, return_inverse=True)
    try:
        vals = W.polar(pairs[:, 0], pairs[:, 1])
    except TomokitError:
        vals = np.empty(len(pairs), dtype=complex)
        for i, (m, v) in enumerate(pairs):
            r = Ray(m, v)
            sl, c = _parallel_slice(W, r)
            if sl is None:
                raise RayError("unreachable-ray", f"ray {r.as_tuple()} is neither stored nor reachable")
            vals[i] = _line_transform(sl, c)
    out[live] = vals[inv.ravel()]
    return out


def group_function(W, g: WHElement) -> complex:
    """``phi(g) = exp(i tau) int exp(iX) W(X, mu, nu) dX``; ``phi(0, 0, tau) = exp(i tau)``."""
    val = _chi_many(W, np.array([g.mu]), np.array([g.nu]))[0]
    return complex(np.exp(1j * g.tau) * val)


def positive_type_matrix(W, elements: Sequence[WHElement]) -> np.ndarray:
    """Hermitian part of ``M[j, k] = phi(g_j^-1 o g_k)``."""
    elems = list(elements)
    if len({(e.mu, e.nu, e.tau) for e in elems}) != len(elems):
        raise ValueError("positive-type elements must be distinct")
    mu = np.array([e.mu for e in elems])
    nu = np.array([e.nu for e in elems])
    tau = np.array([e.tau for e in elems])
    dmu = mu[None, :] - mu[:, None]
    dnu = nu[None, :] - nu[:, None]
    phase = tau[None, :] - tau[:, None] + 0.5 * (-mu[:, None] * nu[None, :] + nu[:, None] * mu[None, :])
    m = np.exp(1j * phase) * _chi_many(W, dmu, dnu)
    return 0.5 * (m + m.conj().T)


def positive_type_test(W, elements: Sequence[WHElement], tol: float = PT_TOL) -> tuple[float, bool]:
    """Smallest eigenvalue of the group-function matrix and whether it is ``>= -tol``."""
    lam = float(np.linalg.eigvalsh(positive_type_matrix(W, elements))[0])
    return lam, bool(lam >= -tol)


# --------------------------------------------------------------------------
# classification


def classify(W, config: ClassifyConfig | None = None) -> ClassificationReport:
    """Run the admissibility gates on a tomogram and combine them into a verdict.

    * ``invalid``: a slice is negative or not normalized.
    * ``classical-only``: the Schrodinger-Robertson or positive-type test fails.
    * ``quantum-admissible``: the positive-type test passes on the base lattice
      and on every refinement.  This is a necessary condition only.
    * ``indeterminate``: the base lattice passes but a refinement could not
      be evaluated.
    """
    from .dynamics import scaling_constraint_residual

    cfg = config or ClassifyConfig()
    analytic = isinstance(W, (GaussianTomogram, GaussianParams))
    if isinstance(W, GaussianParams):
        W = GaussianTomogram(W)
    details: dict = {}
    if analytic:
        nonneg_ok = norm_ok = True
    else:
        vals = W.matrix
        nonneg_ok = bool(vals.min() >= -cfg.nonneg_tol)
        norms = vals @ W.xgrid.weights
        norm_ok = bool(np.all(np.abs(norms - 1.0) <= cfg.norm_tol))
        details["min_value"] = float(vals.min())
        details["max_norm_error"] = float(np.max(np.abs(norms - 1.0)))

    try:
        homog = float(scaling_constraint_residual(W))
    except SamplingError:
        homog = None

    if not (nonneg_ok and norm_ok):
        return ClassificationReport(nonneg_ok, norm_ok, homog, math.nan, False, math.nan, False, "invalid", details)

    cov = covariance_from_tomogram(W)
    sr_lhs, sr_ok = sr_test(cov, cfg.sr_tol)
    details["covariance"] = asdict(cov)

    pt_tol = cfg.pt_tol if cfg.pt_tol is not None else (PT_TOL if analytic else PT_TOL_SAMPLED)
    lattices = cfg.lattices()
    pt_min, pt_ok = positive_type_test(W, lattices[0], pt_tol)
    details["pt_lattice_sizes"] = [len(lattices[0])]
    complete = True
    if pt_ok:
        for lat in lattices[1:]:
            try:
                lam, ok = positive_type_test(W, lat, pt_tol)
            except RayError:
                complete = False
                break
            details["pt_lattice_sizes"].append(len(lat))
            pt_min = min(pt_min, lam)
            if not ok:
                pt_ok = False
                break

    if not (sr_ok and pt_ok):
        verdict = "classical-only"
    elif complete:
        verdict = "quantum-admissible"
    else:
        verdict = "indeterminate"
    return ClassificationReport(nonneg_ok, norm_ok, homog, float(sr_lhs), sr_ok, float(pt_min), pt_ok, verdict, details)
