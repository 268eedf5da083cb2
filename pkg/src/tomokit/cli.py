"""``tomokit`` command-line front end.

Exit codes: 0 success, 1 usage or configuration error, 2 numerical
contract violation (the failing check is named on stderr), 3 I/O error.
Every artifact ``out`` gets a sidecar ``out.json`` recording the command
configuration, tolerances and library version.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import io as tio
from .dynamics import (
    evolve_classical,
    evolve_density,
    evolve_tomogram,
    evolve_wavefunction,
    free_kinetic_residual,
    nu_stencil_rays,
    scaling_constraint_residual,
    scaling_stencil_rays,
    trajectory,
)
from .errors import NonPhysicalError, TomokitError
from .grids import Grid2D, parse_grid
from .quantumness import ClassifyConfig, classify, covariance_from_tomogram, sr_test, tomographic_moment
from .states import (
    GaussianParams,
    PhaseSpaceField,
    PointState,
    WaveFunction,
    as_density,
    gaussian_wavefunction,
)
from .tomography import (
    GaussianTomogram,
    Ray,
    TomogramField,
    inverse_radon,
    radon_classical,
    reconstruct_density,
    resample,
    sample_gaussian_tomogram,
    tomogram_quantum,
    unit_circle_rays,
)

COMMANDS = ("tomogram", "evolve", "reconstruct-phase", "reconstruct-density", "moments", "classify", "residuals")
PICTURES = ("phase", "tomogram", "wavefunction", "density")
DEFAULT_TOLS = {
    "edge": 1e-6,      # X-grid edge mass of emitted slices
    "leak": 1e-6,      # guard-band mass for quantum evolution
    "clip": 1e-6,      # inverse_radon clipping of small negatives
    "density": 1e-6,   # eigenvalue floor for density reconstruction
    "moment": 1e-6,    # tail-truncation bound for sampled moments
    "nonneg": 1e-9,
    "norm": 1e-6,
    "pt": None,        # None selects the analytic/sampled default
    "sr": None,        # None selects the analytic/sampled default
}


class UsageError(Exception):
    """Bad flags or configuration (exit code 1)."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _common(p: argparse.ArgumentParser):
    p.add_argument("--state", help="state JSON (gaussian, point, phase-field, wavefunction, density)")
    p.add_argument("--tomogram", help="tomogram CSV with header mu,nu,x,w")
    p.add_argument("--angles", type=int, default=128, help="number of unit-circle angles on [0, pi)")
    p.add_argument("--s", type=float, default=1.0, help="ray scaling: mu = s cos(theta), nu = sin(theta)/s")
    p.add_argument("--xgrid", default="-8:8:512", help="X grid min:max:n")
    p.add_argument("--qgrid", help="position grid min:max:n")
    p.add_argument("--pgrid", help="momentum grid min:max:n")
    p.add_argument("--t", type=float, help="evolution time")
    p.add_argument("--times", help="comma-separated evolution times")
    p.add_argument("--picture", choices=PICTURES, default="tomogram")
    p.add_argument("--ray", help="ray as mu,nu")
    p.add_argument("--order", type=int, default=2, help="highest moment order")
    p.add_argument("--step", type=float, default=1e-2, help="finite-difference step for residuals")
    p.add_argument("--out", help="output artifact path")
    p.add_argument("--tol", action="append", default=[], metavar="NAME=VALUE", help="tolerance override")
    p.add_argument("--quantum", action="store_true", help="treat a Gaussian state as a quantum state")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tomokit", description="Symplectic tomography of free motion.")
    parser.add_argument("--version", action="version", version=f"tomokit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    helps = {
        "tomogram": "sample the tomogram of a state on unit-circle rays",
        "evolve": "free evolution in a chosen picture",
        "reconstruct-phase": "inverse Radon transform to a phase-space density",
        "reconstruct-density": "density-matrix reconstruction from a tomogram",
        "moments": "tomographic moments and covariances",
        "classify": "classical/quantum admissibility report",
        "residuals": "kinetic-equation and homogeneity residuals",
    }
    for name in COMMANDS:
        _common(sub.add_parser(name, help=helps[name]))
    return parser


# -- configuration helpers ------------------------------------------------


def _tolerances(items) -> dict:
    tols = dict(DEFAULT_TOLS)
    for item in items:
        name, sep, value = item.partition("=")
        if not sep or name not in tols:
            raise UsageError(f"--tol expects NAME=VALUE with NAME in {sorted(tols)}, got {item!r}")
        try:
            tols[name] = float(value)
        except ValueError:
            raise UsageError(f"--tol {name}: {value!r} is not a number") from None
    return tols


def _grid(text, flag):
    if text is None:
        raise UsageError(f"{flag} is required for this command")
    try:
        return parse_grid(text)
    except TomokitError as exc:
        raise UsageError(f"{flag}: {exc}") from None


def _times(args) -> list[float]:
    if args.times is not None:
        try:
            vals = [float(v) for v in args.times.split(",") if v.strip()]
        except ValueError:
            raise UsageError(f"--times: cannot parse {args.times!r}") from None
        if not vals:
            raise UsageError("--times is empty")
        return vals
    if args.t is None:
        raise UsageError("--t or --times is required")
    return [args.t]


def _ray(text) -> Ray:
    try:
        mu, nu = (float(v) for v in text.split(","))
        return Ray(mu, nu)
    except (ValueError, TomokitError):
        raise UsageError(f"--ray expects mu,nu with (mu, nu) != (0, 0), got {text!r}") from None


def _rays(args):
    if args.angles < 1:
        raise UsageError("--angles must be positive")
    if not args.s > 0:
        raise UsageError("--s must be positive")
    return unit_circle_rays(args.angles, args.s)


def _load(loader, path):
    """Run a reader, mapping malformed content to usage errors (missing files stay I/O errors)."""
    try:
        return loader(path)
    except (OSError, UsageError):
        raise
    except (TomokitError, ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"{path}: {exc}") from None


def _source(args):
    """The input object: a state from --state or a TomogramField from --tomogram."""
    if (args.state is None) == (args.tomogram is None):
        raise UsageError("exactly one of --state or --tomogram is required")
    if args.state is not None:
        state = _load(tio.load_state, args.state)
        if args.quantum and isinstance(state, PointState):
            raise UsageError("a point state has no quantum counterpart")
        return state
    return _load(tio.read_tomogram, args.tomogram)


def _require_out(args):
    if not args.out:
        raise UsageError("--out is required for this command")
    return args.out


# -- state -> tomogram -----------------------------------------------------


def _quantum_gaussian_check(g: GaussianParams):
    lhs = g.det
    if lhs < 0.25 - 1e-9:
        raise TomokitError(
            "schrodinger-robertson",
            f"sqq*spp - sqp^2 = {lhs:.6g} < 1/4: not a quantum state",
        )


def _tomogram_of(state, args, tols, rays=None, xgrid=None):
    rays = _rays(args) if rays is None else rays
    xgrid = _grid(args.xgrid, "--xgrid") if xgrid is None else xgrid
    if isinstance(state, TomogramField):
        return state
    if isinstance(state, GaussianTomogram):
        return sample_gaussian_tomogram(state, rays, xgrid)
    if isinstance(state, GaussianParams):
        if args.quantum:
            _quantum_gaussian_check(state)
        return sample_gaussian_tomogram(state, rays, xgrid)
    if isinstance(state, PointState):
        return radon_classical(state, rays)
    if isinstance(state, PhaseSpaceField):
        return radon_classical(state, rays, xgrid, tols["edge"])
    return tomogram_quantum(state, rays, xgrid, tols["edge"])


def _analytic_or_field(state, args, tols):
    """Gaussian states stay analytic; everything else becomes a sampled field."""
    if isinstance(state, GaussianParams):
        if args.quantum:
            _quantum_gaussian_check(state)
        return GaussianTomogram(state)
    if isinstance(state, PointState):
        raise UsageError("point states have singular tomograms; use a Gaussian or sampled state")
    return _tomogram_of(state, args, tols)


# -- artifacts -------------------------------------------------------------


class _Run:
    def __init__(self, args, tols):
        self.args = args
        self.tols = tols

    def config(self) -> dict:
        a = vars(self.args).copy()
        a.pop("tol", None)
        return a

    def emit(self, path, rows: int | None, what: str, extra: dict | None = None):
        side = {
            "artifact": Path(path).name,
            "command": self.args.command,
            "config": self.config(),
            "tolerances": self.tols,
            "version": __version__,
        }
        side.update(extra or {})
        tio.write_json(f"{path}.json", side)
        size = f"{rows} rows" if rows is not None else "JSON"
        print(f"wrote {path} ({what}, {size})")


def _field_meta(W: TomogramField) -> dict:
    return {"rays": [[r.mu, r.nu] for r in W.rays], "xgrid": str(W.xgrid), "time": W.time}


# -- commands --------------------------------------------------------------


def cmd_tomogram(args, run: _Run) -> int:
    out = _require_out(args)
    state = _source(args)
    if isinstance(state, TomogramField):
        raise UsageError("tomogram takes --state, not --tomogram")
    W = _tomogram_of(state, args, run.tols)
    if isinstance(W, tuple):
        rows = tio.write_delta_slices(out, W)
        run.emit(out, rows, "point-state delta slices", {"rays": [[s.ray.mu, s.ray.nu] for s in W], "time": 0.0})
        return 0
    rows = tio.write_tomogram(out, W)
    run.emit(out, rows, "tomogram", _field_meta(W))
    return 0


def _write_timed(out, header, blocks):
    """``blocks`` is a list of ``(t, columns)``; a leading ``t`` column is added when there are several."""
    if len(blocks) == 1:
        return tio.write_rows(out, header, blocks[0][1])
    cols = []
    for t, block in blocks:
        n = np.asarray(block[0]).size
        cols.append([np.full(n, t)] + [np.asarray(c).ravel() for c in block])
    merged = [np.concatenate([c[i] for c in cols]) for i in range(len(cols[0]))]
    return tio.write_rows(out, "t," + header, merged)


def cmd_evolve(args, run: _Run) -> int:
    out = _require_out(args)
    times = _times(args)
    src = _source(args)
    pic = args.picture
    meta = {"times": times}

    if pic == "tomogram":
        if isinstance(src, PointState):
            rays = _rays(args)
            blocks = []
            for t in times:
                sl = radon_classical(evolve_classical(src, t), rays)
                blocks.append((t, [[s.ray.mu for s in sl], [s.ray.nu for s in sl], [s.center for s in sl]]))
            rows = _write_timed(out, "mu,nu,center", blocks)
            run.emit(out, rows, "point-state delta slices", meta)
            return 0
        if isinstance(src, GaussianParams):
            if args.quantum:
                _quantum_gaussian_check(src)
            rays, xg = _rays(args), _grid(args.xgrid, "--xgrid")
            fields = [sample_gaussian_tomogram(evolve_tomogram(GaussianTomogram(src), t), rays, xg) for t in times]
        else:
            W0 = _tomogram_of(src, args, run.tols)
            fields = [evolve_tomogram(W0, t) for t in times]
        if len(fields) == 1:
            rows = tio.write_tomogram(out, fields[0])
            meta.update(_field_meta(fields[0]))
        else:
            rows = tio.write_trajectory(out, fields)
            meta.update({"rays": [[r.mu, r.nu] for r in fields[0].rays], "xgrid": str(fields[0].xgrid)})
        run.emit(out, rows, "tomogram" if len(fields) == 1 else "tomogram trajectory", meta)
        return 0

    if isinstance(src, TomogramField):
        raise UsageError(f"--picture {pic} needs --state")

    if pic == "phase":
        if isinstance(src, (GaussianParams, PointState)):
            states = [evolve_classical(src, t) for t in times]
            payload = [{"t": t, **tio.state_to_json(s)} for t, s in zip(times, states)]
            tio.write_json(out, payload[0] if len(payload) == 1 else payload)
            run.emit(out, None, "phase-space moments", meta)
            return 0
        if not isinstance(src, PhaseSpaceField):
            raise UsageError("--picture phase needs a classical state")
        blocks = []
        for t in times:
            f = evolve_classical(src, t, run.tols["leak"])
            q, p = f.grid.mesh()
            blocks.append((t, [q, p, f.values]))
        rows = _write_timed(out, "q,p,f", blocks)
        run.emit(out, rows, "phase-space density", meta)
        return 0

    if isinstance(src, GaussianParams):
        src = gaussian_wavefunction(src, _grid(args.qgrid, "--qgrid"))
    if isinstance(src, (PointState, PhaseSpaceField)):
        raise UsageError(f"--picture {pic} needs a quantum state")

    if pic == "wavefunction":
        if not isinstance(src, WaveFunction):
            raise UsageError("--picture wavefunction needs a wavefunction state")
        blocks = []
        for t in times:
            psi = evolve_wavefunction(src, t, run.tols["leak"])
            blocks.append((t, [psi.grid.points, psi.amplitudes.real, psi.amplitudes.imag]))
        rows = _write_timed(out, "q,re,im", blocks)
        run.emit(out, rows, "wavefunction", meta)
        return 0

    rho0 = as_density(src)
    blocks = []
    for t in times:
        rho = evolve_density(rho0, t, run.tols["leak"])
        qq, qp = np.meshgrid(rho.grid.points, rho.grid.points, indexing="ij")
        blocks.append((t, [qq, qp, rho.entries.real, rho.entries.imag]))
    rows = _write_timed(out, "q,qprime,re,im", blocks)
    run.emit(out, rows, "density matrix", meta)
    return 0


def _field_input(args, run):
    src = _source(args)
    if isinstance(src, PointState):
        raise UsageError("point states have singular tomograms")
    return _tomogram_of(src, args, run.tols)


def cmd_reconstruct_phase(args, run: _Run) -> int:
    out = _require_out(args)
    W = _field_input(args, run)
    grid = Grid2D(_grid(args.qgrid or "-6:6:256", "--qgrid"), _grid(args.pgrid or "-6:6:256", "--pgrid"))
    f = inverse_radon(W, grid, clip_tol=run.tols["clip"])
    rows = tio.write_phase_field(out, f)
    run.emit(out, rows, "phase-space density", {"qgrid": str(grid.gq), "pgrid": str(grid.gp), "time": W.time})
    return 0


def cmd_reconstruct_density(args, run: _Run) -> int:
    out = _require_out(args)
    W = _field_input(args, run)
    grid = _grid(args.qgrid or "-8:8:256", "--qgrid")
    rho = reconstruct_density(W, grid, tol=run.tols["density"], strict=True)
    rows = tio.write_density(out, rho)
    run.emit(out, rows, "density matrix", {
        "qgrid": str(grid), "time": W.time, "trace": rho.trace(), "min_eigenvalue": rho.min_eigenvalue()})
    return 0


def _slice_along(W, ray: Ray, args, run):
    """Slice of a sampled field along ``ray`` on the field's X grid."""
    sl = W.slice_for(ray)
    if sl is not None:
        return sl
    return resample(W, [ray], code="missing-ray", tol=run.tols["edge"]).slices[0]


def cmd_moments(args, run: _Run) -> int:
    src = _source(args)
    W = _analytic_or_field(src, args, run.tols)
    if args.order < 0:
        raise UsageError("--order must be non-negative")
    if args.ray is not None:
        ray = _ray(args.ray)
        if isinstance(W, GaussianTomogram):
            moms = [tomographic_moment(W, n, ray) for n in range(args.order + 1)]
        else:
            sl = _slice_along(W, ray, args, run)
            moms = [tomographic_moment(sl, n, tol=run.tols["moment"]) for n in range(args.order + 1)]
        result = {"ray": [ray.mu, ray.nu], "order": args.order, "moments": moms}
        if args.order >= 2:
            mean = moms[1] / moms[0]
            result.update(mean=mean, variance=moms[2] / moms[0] - mean * mean)
    else:
        cov = covariance_from_tomogram(W, run.tols["moment"])
        lhs, ok = sr_test(cov, run.tols["sr"])
        result = {"covariance": vars(cov).copy(), "sr_lhs": lhs, "sr_ok": ok}
    result["time"] = W.time
    text = tio.dumps(result)
    if args.out:
        tio.write_json(args.out, result)
        run.emit(args.out, None, "moments")
    else:
        sys.stdout.write(text)
    return 0


def _report_table(rep) -> str:
    def show(v):
        if isinstance(v, float):
            return format(v, ".6g")
        return str(v)

    rows = [
        ("nonneg_ok", rep.nonneg_ok),
        ("norm_ok", rep.norm_ok),
        ("homogeneity_residual", rep.homogeneity_residual),
        ("sr_lhs", rep.sr_lhs),
        ("sr_ok", rep.sr_ok),
        ("pt_min_eigenvalue", rep.pt_min_eigenvalue),
        ("pt_ok", rep.pt_ok),
        ("verdict", rep.verdict),
    ]
    width = max(len(k) for k, _ in rows)
    return "\n".join(f"{k.ljust(width)}  {show(v)}" for k, v in rows) + "\n"


def cmd_classify(args, run: _Run) -> int:
    src = _source(args)
    W = _analytic_or_field(src, args, run.tols)
    cfg = ClassifyConfig(
        sr_tol=run.tols["sr"],
        pt_tol=run.tols["pt"],
        nonneg_tol=run.tols["nonneg"],
        norm_tol=run.tols["norm"],
    )
    rep = classify(W, cfg)
    sys.stdout.write(_report_table(rep))
    if args.out:
        tio.write_json(args.out, rep.to_dict())
        run.emit(args.out, None, "classification report")
    return 0


def cmd_residuals(args, run: _Run) -> int:
    src = _source(args)
    W = _analytic_or_field(src, args, run.tols)
    h = args.step
    if not h > 0:
        raise UsageError("--step must be positive")
    t = args.t or 0.0
    base = unit_circle_rays(min(args.angles, 8))
    if isinstance(W, GaussianTomogram):
        xg = _grid(args.xgrid, "--xgrid")
        at_t = evolve_tomogram(W, t)
        scal = scaling_constraint_residual(sample_gaussian_tomogram(at_t, scaling_stencil_rays(base, h), xg))
        analytic = scaling_constraint_residual(at_t)
        traj = [sample_gaussian_tomogram(G, nu_stencil_rays(base, h), xg)
                for G in trajectory(W, [t - h, t, t + h])]
    else:
        scal = scaling_constraint_residual(evolve_tomogram(W, t, scaling_stencil_rays(base, h)))
        analytic = None
        traj = trajectory(W, [t - h, t, t + h], nu_stencil_rays(base, h))
    result = {
        "step": h,
        "time": t,
        "scaling_constraint_residual": scal,
        "scaling_constraint_residual_analytic": analytic,
        "free_kinetic_residual": free_kinetic_residual(traj),
    }
    if args.out:
        tio.write_json(args.out, result)
        run.emit(args.out, None, "residuals")
    else:
        sys.stdout.write(tio.dumps(result))
    return 0


HANDLERS = {
    "tomogram": cmd_tomogram,
    "evolve": cmd_evolve,
    "reconstruct-phase": cmd_reconstruct_phase,
    "reconstruct-density": cmd_reconstruct_density,
    "moments": cmd_moments,
    "classify": cmd_classify,
    "residuals": cmd_residuals,
}


# flags whose values may begin with "-" (grids, rays, time lists)
_SIGNED_VALUE_FLAGS = ("--xgrid", "--qgrid", "--pgrid", "--ray", "--times", "--t")


def _attach_signed_values(argv):
    """Rewrite ``--xgrid -8:8:512`` as ``--xgrid=-8:8:512`` so argparse does not read the value as a flag."""
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok in _SIGNED_VALUE_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def run(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = parser.parse_args(_attach_signed_values(argv))
        tols = _tolerances(args.tol)
        return HANDLERS[args.command](args, _Run(args, tols))
    except UsageError as exc:
        print(f"tomokit: error: {exc}", file=sys.stderr)
        return 1
    except NonPhysicalError as exc:
        print(f"tomokit: {exc} (min eigenvalue {exc.min_eigenvalue:.6g})", file=sys.stderr)
        return 2
    except TomokitError as exc:
        print(f"tomokit: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"tomokit: I/O error: {exc}", file=sys.stderr)
        return 3


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
