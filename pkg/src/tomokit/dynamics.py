"""Free motion (V = 0, m = hbar = 1) in the phase-space, wavefunction,
density-matrix and tomographic pictures, plus residuals of the tomographic
kinetic equation and of the homogeneity constraint.

Every picture realizes the same shear ``(q, p) -> (q + p t, p)``.  For
tomograms it acts on the ray only: ``W(X, mu, nu, t) = W0(X, mu, nu + mu t)``.
"""
from __future__ import annotations

from typing import Sequence

import numpy as np

from .errors import GridError, SamplingError
from .grids import Grid1D, edge_mass
from .states import DensityMatrix, GaussianParams, PhaseSpaceField, PointState, WaveFunction
from .tomography import (
    GaussianTomogram,
    Ray,
    TomogramField,
    gaussian_mean,
    gaussian_tomogram_eval,
    resample,
    sigma_xx,
    unit_circle_rays,
)

LEAK_TOL = 1e-6
FD_STEP = 1e-2


def integrals_of_motion(q: float, p: float, t: float) -> tuple[float, float]:
    """Initial point ``(q0, p0) = (q - p t, p)`` of the trajectory through ``(q, p)`` at time ``t``."""
    return q - p * t, p


# --------------------------------------------------------------------------
# classical


def _shear_params(g: GaussianParams, t: float) -> GaussianParams:
    return GaussianParams(
        g.qbar + g.pbar * t,
        g.pbar,
        g.sqq + 2 * t * g.sqp + t * t * g.spp,
        g.spp,
        g.sqp + t * g.spp,
    )


def _kappa(grid: Grid1D):
    return 2 * np.pi * np.fft.fftfreq(grid.n, grid.step)


def evolve_classical(f0, t: float, tol: float = LEAK_TOL):
    """Liouville flow ``f(q, p, t) = f0(q - p t, p)``.

    Point states and Gaussian moments are advanced in closed form.  Sampled
    fields are shifted along ``q`` row by row with band-limited (FFT)
    interpolation; raises ``support-leaves-grid`` when more than ``tol`` of
    the probability would be carried across the q-grid boundary.
    """
    t = float(t)
    if isinstance(f0, PointState):
        return PointState(f0.qbar + f0.pbar * t, f0.pbar)
    if isinstance(f0, GaussianParams):
        return _shear_params(f0, t)
    if not isinstance(f0, PhaseSpaceField):
        raise TypeError(f"unsupported classical state {type(f0).__name__}")
    if t == 0.0:
        return f0
    gq, gp = f0.grid.gq, f0.grid.gp
    shift = gp.points * t  # per p-column displacement in q
    moved = gq.points[:, None] + shift[None, :]
    lost = np.where(gq.contains(moved), 0.0, np.abs(f0.values))
    carried = float(gq.weights @ lost @ gp.weights)
    if carried > tol:
        raise GridError("support-leaves-grid", f"probability {carried:.2e} is sheared off the q grid")
    n = gq.n
    kappa = _kappa(gq)
    phase = np.exp(-1j * np.outer(kappa, shift))
    if n % 2 == 0:
        # Nyquist mode split symmetrically keeps the shifted data real
        phase[n // 2] = np.cos(np.pi / gq.step * shift)
    out = np.fft.ifft(np.fft.fft(f0.values, axis=0) * phase, axis=0).real
    return PhaseSpaceField(f0.grid, out)


# --------------------------------------------------------------------------
# quantum


def _free_unitary(a: np.ndarray, grid: Grid1D, t: float) -> np.ndarray:
    """Apply ``exp(-i p^2 t / 2)`` along axis 0."""
    kappa = _kappa(grid)
    return np.fft.ifft(np.exp(-0.5j * t * kappa ** 2)[:, None] * np.fft.fft(a, axis=0), axis=0)


def _guard(density, grid: Grid1D, tol: float, guard: float):
    leak = edge_mass(density, grid, guard)
    if leak > tol:
        raise GridError("packet-leaves-grid", f"probability {leak:.2e} in the guard band exceeds {tol:.1e}")


def evolve_wavefunction(psi0: WaveFunction, t: float, tol: float = LEAK_TOL, guard: float = 0.02) -> WaveFunction:
    """Free Schrodinger evolution by momentum-space phase multiplication.

    Raises ``packet-leaves-grid`` if the evolved packet has more than ``tol``
    probability in the outer ``guard`` fraction of the grid, the signature of
    wrap-around aliasing.
    """
    t = float(t)
    if t == 0.0:
        return psi0
    g = psi0.grid
    amps = _free_unitary(psi0.amplitudes[:, None], g, t)[:, 0]
    _guard(np.abs(amps) ** 2, g, tol, guard)
    return WaveFunction(g, amps)


def free_propagator_kernel(grid: Grid1D, t: float) -> np.ndarray:
    """``G(q, q', t) = (2 pi i t)^(-1/2) exp(i (q - q')^2 / (2t))`` on the grid."""
    if t == 0.0:
        raise ValueError("the free kernel is singular at t = 0")
    d = grid.points[:, None] - grid.points[None, :]
    return np.exp(0.5j * d ** 2 / t) / np.sqrt(2j * np.pi * t)


def evolve_wavefunction_kernel(psi0: WaveFunction, t: float) -> WaveFunction:
    """Quadrature of the propagator integral; a cross-check for moderate ``t`` only.

    Accurate when the kernel's local frequency ``|q - q'|/t`` stays below the
    grid Nyquist limit over the packet's support.
    """
    g = psi0.grid
    return WaveFunction(g, free_propagator_kernel(g, t) @ (g.weights * psi0.amplitudes))


def evolve_density(rho0: DensityMatrix, t: float, tol: float = LEAK_TOL, guard: float = 0.02) -> DensityMatrix:
    """``rho(t) = U rho0 U^dagger`` with the spectral free propagator."""
    t = float(t)
    if t == 0.0:
        return rho0
    g = rho0.grid
    a = _free_unitary(rho0.entries, g, t)
    out = _free_unitary(a.conj().T, g, t).conj().T
    _guard(out.diagonal().real, g, tol, guard)
    return DensityMatrix(g, out)


# --------------------------------------------------------------------------
# tomographic


def sheared_ray(ray: Ray, t: float) -> Ray:
    return Ray(ray.mu, ray.nu + ray.mu * t)


def evolve_tomogram(W0, t: float, rays: Sequence[Ray] | None = None):
    """Tomographic free propagator ``W(X, mu, nu, t) = W0(X, mu, nu + mu t)``.

    Gaussian tomograms advance their parameters by the classical shear.  For
    sampled fields each output ray ``(mu, nu)`` (by default the input rays)
    reads ``W0`` at ``(mu, nu + mu t)``: directly if that ray is stored,
    otherwise through homogeneity from a parallel stored slice or the
    unit-circle characteristic table.  Raises ``ray-not-representable`` when
    neither is available.
    """
    t = float(t)
    if isinstance(W0, GaussianTomogram):
        return GaussianTomogram(_shear_params(W0.params, t), W0.time + t)
    if not isinstance(W0, TomogramField):
        raise TypeError(f"unsupported tomogram {type(W0).__name__}")
    rays = tuple(W0.rays if rays is None else rays)
    targets = [sheared_ray(r, t) for r in rays]
    stored = {r: sl for r, sl in zip(W0.rays, W0.slices)}
    if all(r in stored for r in targets):
        vals = [stored[r].values for r in targets]
        return TomogramField.from_matrix(rays, W0.xgrid, vals, W0.time + t)
    moved = resample(W0, targets, code="ray-not-representable")
    return TomogramField.from_matrix(rays, W0.xgrid, moved.matrix, W0.time + t)


def trajectory(W0, times: Sequence[float], rays: Sequence[Ray] | None = None) -> list:
    """``[evolve_tomogram(W0, t) for t in times]`` (works for every picture's tomogram)."""
    return [evolve_tomogram(W0, t, rays) if isinstance(W0, TomogramField) else evolve_tomogram(W0, t)
            for t in times]


def nu_stencil_rays(base: Sequence[Ray], h: float = FD_STEP) -> tuple[Ray, ...]:
    """``base`` plus the neighbours ``(mu, nu +- h)`` needed for ``d/dnu``."""
    out = []
    for r in base:
        for cand in (r, Ray(r.mu, r.nu - h), Ray(r.mu, r.nu + h)):
            if cand not in out:
                out.append(cand)
    return tuple(out)


def scaling_stencil_rays(base: Sequence[Ray], h: float = FD_STEP) -> tuple[Ray, ...]:
    """``base`` plus ``(mu +- h, nu)`` and ``(mu, nu +- h)``."""
    out = []
    for r in base:
        for cand in (r, Ray(r.mu - h, r.nu), Ray(r.mu + h, r.nu), Ray(r.mu, r.nu - h), Ray(r.mu, r.nu + h)):
            if cand not in out:
                out.append(cand)
    return tuple(out)


def _neighbours(rays, axis: int):
    """``(centre, minus, plus, step)`` index triples with symmetric neighbours along mu (0) or nu (1)."""
    pos = {r.as_tuple(): i for i, r in enumerate(rays)}
    keys = list(pos)
    found = []
    for i, r in enumerate(rays):
        c = r.as_tuple()
        for key in keys:
            d = key[axis] - c[axis]
            if d <= 0 or key[1 - axis] != c[1 - axis]:
                continue
            mirror = list(c)
            mirror[axis] = c[axis] - d
            j = _lookup(pos, tuple(mirror), d)
            if j is not None:
                found.append((i, j, pos[key], d))
    # keep the smallest step per centre
    best = {}
    for i, j, k, d in found:
        if i not in best or d < best[i][3]:
            best[i] = (i, j, k, d)
    return list(best.values())


def _lookup(pos, key, scale):
    if key in pos:
        return pos[key]
    tol = 1e-9 * max(scale, 1.0)
    for other, idx in pos.items():
        if abs(other[0] - key[0]) <= tol and abs(other[1] - key[1]) <= tol:
            return idx
    return None


def free_kinetic_residual(Ws: Sequence[TomogramField]) -> float:
    """``max |dW/dt - mu dW/dnu|`` by centred differences over a trajectory.

    ``Ws`` must hold at least three fields at uniformly spaced times with a
    common ray set and X grid; rays need stored neighbours ``(mu, nu +- d)``.
    Raises ``insufficient-sampling`` otherwise.
    """
    Ws = list(Ws)
    if len(Ws) < 3:
        raise SamplingError("insufficient-sampling", "need at least three time samples")
    times = np.array([w.time for w in Ws])
    dts = np.diff(times)
    if np.any(dts <= 0) or np.any(np.abs(dts - dts[0]) > 1e-9 * max(1.0, abs(dts[0]))):
        raise SamplingError("insufficient-sampling", "time samples must be increasing and uniformly spaced")
    dt = float(dts[0])
    rays = Ws[0].rays
    if any(w.rays != rays for w in Ws) or any(w.xgrid != Ws[0].xgrid for w in Ws):
        raise SamplingError("insufficient-sampling", "trajectory fields must share rays and X grid")
    stencil = _neighbours(rays, 1)
    if not stencil:
        raise SamplingError("insufficient-sampling", "no ray has (mu, nu +- d) neighbours")
    stack = np.stack([w.matrix for w in Ws])  # [time, ray, X]
    worst = 0.0
    for i, jm, jp, d in stencil:
        dwdt = (stack[2:, i] - stack[:-2, i]) / (2 * dt)
        dwdnu = (stack[1:-1, jp] - stack[1:-1, jm]) / (2 * d)
        worst = max(worst, float(np.max(np.abs(dwdt - rays[i].mu * dwdnu))))
    return worst


def _gaussian_scaling_residual(g: GaussianTomogram, rays, X) -> float:
    p = g.params
    worst = 0.0
    for r in rays:
        v = sigma_xx(g, r)
        m = gaussian_mean(g, r)
        w = gaussian_tomogram_eval(g, r, X)
        u = X - m
        dv_dmu = 2 * r.mu * p.sqq + 2 * r.nu * p.sqp
        dv_dnu = 2 * r.nu * p.spp + 2 * r.mu * p.sqp
        dlog_dv = u ** 2 / (2 * v ** 2) - 1 / (2 * v)
        dx = -u / v * w
        dmu = w * (u * p.qbar / v + dlog_dv * dv_dmu)
        dnu = w * (u * p.pbar / v + dlog_dv * dv_dnu)
        worst = max(worst, float(np.max(np.abs(X * dx + r.mu * dmu + r.nu * dnu + w))))
    return worst


def _spectral_derivative(values: np.ndarray, grid: Grid1D) -> np.ndarray:
    kappa = _kappa(grid)
    if grid.n % 2 == 0:
        kappa[grid.n // 2] = 0.0
    return np.fft.ifft(1j * kappa * np.fft.fft(values, axis=-1), axis=-1).real


def scaling_constraint_residual(W, rays: Sequence[Ray] | None = None, xgrid: Grid1D | None = None) -> float:
    """``max |(X d/dX + mu d/dmu + nu d/dnu + 1) W|``, the differential form of homogeneity.

    Gaussian tomograms use analytic derivatives (on ``rays``/``xgrid``, by
    default 16 unit-circle rays on ``[-8, 8]``).  Sampled fields use a
    spectral ``d/dX`` and centred differences over stored ``(mu +- h, nu)``
    and ``(mu, nu +- h)`` neighbours; raises ``insufficient-sampling`` if no
    ray has both pairs.
    """
    if isinstance(W, GaussianTomogram):
        rays = unit_circle_rays(16) if rays is None else rays
        xgrid = Grid1D(-8.0, 8.0, 513) if xgrid is None else xgrid
        return _gaussian_scaling_residual(W, rays, xgrid.points)
    rays_all = W.rays
    mu_st = {i: (jm, jp, d) for i, jm, jp, d in _neighbours(rays_all, 0)}
    nu_st = {i: (jm, jp, d) for i, jm, jp, d in _neighbours(rays_all, 1)}
    centres = sorted(set(mu_st) & set(nu_st))
    if not centres:
        raise SamplingError("insufficient-sampling", "no ray has both (mu +- h) and (nu +- h) neighbours")
    m = W.matrix
    X = W.xgrid.points
    worst = 0.0
    for i in centres:
        r = rays_all[i]
        jm, jp, d = mu_st[i]
        dmu = (m[jp] - m[jm]) / (2 * d)
        jm, jp, d = nu_st[i]
        dnu = (m[jp] - m[jm]) / (2 * d)
        dx = _spectral_derivative(m[i], W.xgrid)
        worst = max(worst, float(np.max(np.abs(X * dx + r.mu * dmu + r.nu * dnu + m[i]))))
    return worst


def schrodinger_robertson(g: GaussianParams) -> float:
    return g.sqq * g.spp - g.sqp ** 2


__all__ = [
    "integrals_of_motion", "evolve_classical", "evolve_wavefunction", "evolve_wavefunction_kernel",
    "free_propagator_kernel", "evolve_density", "evolve_tomogram", "sheared_ray", "trajectory",
    "nu_stencil_rays", "scaling_stencil_rays", "free_kinetic_residual", "scaling_constraint_residual",
    "schrodinger_robertson",
]
