"""CSV and JSON serialization.

Floats are written with 17 significant digits so every value round-trips
exactly; JSON uses sorted keys and ``\\n`` line endings, which makes
artifacts byte-reproducible.

CSV layouts (one header line):

* tomogram: ``mu,nu,x,w``; trajectories prepend ``t``
* point-state slices: ``mu,nu,center``
* phase-space field: ``q,p,f``
* wavefunction: ``q,re,im``
* density matrix: ``q,qprime,re,im`` (row-major)
* 1-D field: ``x,value`` or ``x,re,im``
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import GridError, StateError
from .grids import Grid1D, Grid2D, SampledField1D
from .states import DensityMatrix, GaussianParams, PhaseSpaceField, PointState, WaveFunction
from .tomography import DeltaSlice, GaussianTomogram, Ray, TomogramField, TomogramSlice

FMT = ".17g"


def fmt(x) -> str:
    return format(float(x), FMT)


def write_rows(path, header: str, columns: Sequence[np.ndarray]):
    cols = [np.asarray(c, dtype=float).ravel() for c in columns]
    lines = [header]
    lines.extend(",".join(format(v, FMT) for v in row) for row in zip(*(c.tolist() for c in cols)))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    return len(lines) - 1


def _read_table(path, expected: Sequence[str]) -> np.ndarray:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
        cols = [c.strip() for c in header.split(",")]
        if cols != list(expected):
            raise ValueError(f"{path}: expected header {','.join(expected)!r}, got {header!r}")
        try:
            data = np.loadtxt(fh, delimiter=",", ndmin=2)
        except ValueError as exc:
            raise ValueError(f"{path}: {exc}") from exc
    if data.size == 0:
        raise ValueError(f"{path}: no data rows")
    if data.shape[1] != len(expected):
        raise ValueError(f"{path}: expected {len(expected)} columns, got {data.shape[1]}")
    return data


def _grid_from_points(x: np.ndarray, what: str) -> Grid1D:
    n = x.size
    if n < 2:
        raise GridError("invalid-count", f"{what}: need at least two grid points")
    g = Grid1D(float(x[0]), float(x[-1]), n)
    if not np.allclose(x, g.points, rtol=0, atol=1e-9 * max(1.0, g.span)):
        raise GridError("invalid-range", f"{what}: points are not uniformly spaced")
    return g


def _unique_in_order(a: np.ndarray) -> np.ndarray:
    _, idx = np.unique(a, return_index=True)
    return a[np.sort(idx)]


# -- JSON ------------------------------------------------------------------


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=True) + "\n"


def write_json(path, obj):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps(obj))


def read_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def params_to_json(p: GaussianParams | GaussianTomogram) -> dict:
    return p.to_dict()


# -- tomograms -------------------------------------------------------------


def write_tomogram(path, W: TomogramField) -> int:
    xg = W.xgrid
    nr = len(W.rays)
    mu = np.repeat([r.mu for r in W.rays], xg.n)
    nu = np.repeat([r.nu for r in W.rays], xg.n)
    x = np.tile(xg.points, nr)
    return write_rows(path, "mu,nu,x,w", [mu, nu, x, W.matrix])


def write_trajectory(path, fields: Iterable[TomogramField]) -> int:
    cols = [[], [], [], [], []]
    for W in fields:
        xg, nr = W.xgrid, len(W.rays)
        cols[0].append(np.full(nr * xg.n, W.time))
        cols[1].append(np.repeat([r.mu for r in W.rays], xg.n))
        cols[2].append(np.repeat([r.nu for r in W.rays], xg.n))
        cols[3].append(np.tile(xg.points, nr))
        cols[4].append(W.matrix.ravel())
    return write_rows(path, "t,mu,nu,x,w", [np.concatenate(c) for c in cols])


def _field_from_rows(rows: np.ndarray, time: float, what: str) -> TomogramField:
    _, first, inv = np.unique(rows[:, :2], axis=0, return_index=True, return_inverse=True)
    inv = inv.ravel()
    slices = []
    for u in np.argsort(first):
        sel = inv == u
        r = Ray(float(rows[first[u], 0]), float(rows[first[u], 1]))
        slices.append(TomogramSlice(r, _grid_from_points(rows[sel, 2], f"{what} ray {r.as_tuple()}"), rows[sel, 3]))
    return TomogramField(tuple(slices), time)


def read_tomogram(path, time: float = 0.0) -> TomogramField:
    return _field_from_rows(_read_table(path, ["mu", "nu", "x", "w"]), time, str(path))


def read_trajectory(path) -> list[TomogramField]:
    rows = _read_table(path, ["t", "mu", "nu", "x", "w"])
    return [_field_from_rows(rows[rows[:, 0] == t, 1:], float(t), str(path)) for t in _unique_in_order(rows[:, 0])]


def write_delta_slices(path, slices: Sequence[DeltaSlice]) -> int:
    return write_rows(path, "mu,nu,center", [
        [s.ray.mu for s in slices], [s.ray.nu for s in slices], [s.center for s in slices]])


# -- states ----------------------------------------------------------------


def write_phase_field(path, f: PhaseSpaceField) -> int:
    q, p = f.grid.mesh()
    return write_rows(path, "q,p,f", [q, p, f.values])


def read_phase_field(path) -> PhaseSpaceField:
    rows = _read_table(path, ["q", "p", "f"])
    gq = _grid_from_points(_unique_in_order(rows[:, 0]), "q")
    gp = _grid_from_points(_unique_in_order(rows[:, 1]), "p")
    if rows.shape[0] != gq.n * gp.n:
        raise GridError("invalid-count", f"{path}: expected {gq.n * gp.n} rows")
    return PhaseSpaceField(Grid2D(gq, gp), rows[:, 2].reshape(gq.n, gp.n))


def write_wavefunction(path, psi: WaveFunction) -> int:
    a = psi.amplitudes
    return write_rows(path, "q,re,im", [psi.grid.points, a.real, a.imag])


def read_wavefunction(path) -> WaveFunction:
    rows = _read_table(path, ["q", "re", "im"])
    return WaveFunction(_grid_from_points(rows[:, 0], "q"), rows[:, 1] + 1j * rows[:, 2])


def write_density(path, rho: DensityMatrix) -> int:
    q = rho.grid.points
    qq, qp = np.meshgrid(q, q, indexing="ij")
    e = rho.entries
    return write_rows(path, "q,qprime,re,im", [qq, qp, e.real, e.imag])


def read_density(path) -> DensityMatrix:
    rows = _read_table(path, ["q", "qprime", "re", "im"])
    g = _grid_from_points(_unique_in_order(rows[:, 0]), "q")
    if rows.shape[0] != g.n * g.n:
        raise GridError("invalid-count", f"{path}: expected {g.n * g.n} rows")
    return DensityMatrix(g, (rows[:, 2] + 1j * rows[:, 3]).reshape(g.n, g.n))


def write_field_1d(path, field: SampledField1D) -> int:
    if field.is_complex:
        return write_rows(path, "x,re,im", [field.grid.points, field.values.real, field.values.imag])
    return write_rows(path, "x,value", [field.grid.points, field.values])


def read_field_1d(path) -> SampledField1D:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
    if header == "x,re,im":
        rows = _read_table(path, ["x", "re", "im"])
        return SampledField1D(_grid_from_points(rows[:, 0], "x"), rows[:, 1] + 1j * rows[:, 2])
    rows = _read_table(path, ["x", "value"])
    return SampledField1D(_grid_from_points(rows[:, 0], "x"), rows[:, 1])


def load_state(path):
    """Build a state from a JSON description.

    ``kind`` selects the type: ``gaussian`` (default when absent; keys
    ``qbar, pbar, sqq, spp, sqp``), ``point`` (``qbar, pbar``), or
    ``phase-field`` / ``wavefunction`` / ``density`` with a ``file`` key
    naming a CSV relative to the JSON file.  A ``time`` key, if present,
    is returned alongside.
    """
    path = Path(path)
    d = read_json(path)
    if not isinstance(d, dict):
        raise StateError("invalid-state", f"{path}: expected a JSON object")
    kind = d.get("kind", "gaussian")
    try:
        if kind == "gaussian":
            return GaussianParams.from_dict(d)
        if kind == "point":
            return PointState.from_dict(d)
        readers = {"phase-field": read_phase_field, "wavefunction": read_wavefunction, "density": read_density}
        if kind in readers:
            return readers[kind](path.parent / d["file"])
    except KeyError as exc:
        raise StateError("invalid-state", f"{path}: missing key {exc}") from exc
    raise StateError("invalid-state", f"{path}: unknown state kind {kind!r}")


def state_to_json(state) -> dict:
    if isinstance(state, GaussianParams):
        return {"kind": "gaussian", **state.to_dict()}
    if isinstance(state, PointState):
        return {"kind": "point", **state.to_dict()}
    if isinstance(state, GaussianTomogram):
        return {"kind": "gaussian", **state.to_dict()}
    raise TypeError(f"{type(state).__name__} is stored as CSV")
