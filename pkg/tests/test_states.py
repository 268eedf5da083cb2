import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tomokit.errors import GridError, StateError
from tomokit.grids import Grid1D, Grid2D
from tomokit.states import (
    DensityMatrix,
    GaussianParams,
    PointState,
    WaveFunction,
    classical_characteristic,
    density_from_wavefunction,
    gaussian_phase_density,
    gaussian_wavefunction,
    overlap,
    quantum_characteristic,
    shifted_diagonals,
)

PHASE = Grid2D(Grid1D(-6, 6, 128), Grid1D(-6, 6, 128))
ks = st.floats(-3, 3, allow_nan=False)


@st.composite
def gaussians(draw, min_det=0.05):
    # means within 0.5 and sigma below 0.9 keep mean +- 5 sigma inside [-6, 6]
    sqq = draw(st.floats(0.2, 0.8))
    spp = draw(st.floats(0.2, 0.8))
    rho = draw(st.floats(-0.8, 0.8))
    sqp = rho * np.sqrt(sqq * spp)
    if sqq * spp - sqp ** 2 < min_det:
        sqp = 0.0
    return GaussianParams(draw(st.floats(-0.5, 0.5)), draw(st.floats(-0.5, 0.5)), sqq, spp, sqp)


@pytest.mark.parametrize(
    "args", [(0, 0, -1, 1, 0), (0, 0, 1, 0, 0), (0, 0, 1, 1, 1), (0, 0, 1, 1, 2), (np.nan, 0, 1, 1, 0)]
)
def test_covariance_validation(args):
    with pytest.raises(StateError) as exc:
        GaussianParams(*args)
    assert exc.value.code == "covariance-not-positive-definite"


def test_params_json_round_trip():
    g = GaussianParams(0.1, -0.2, 0.7, 0.5, 0.1)
    assert GaussianParams.from_dict(g.to_dict()) == g
    assert PointState.from_dict(PointState(1, 2).to_dict()) == PointState(1.0, 2.0)


def test_vacuum_phase_density_peak():
    f = gaussian_phase_density(GaussianParams.vacuum(), PHASE)
    i = PHASE.gq.index(0.0)
    # 128 points on [-6, 6] do not contain 0; evaluate on an odd grid instead
    g = Grid2D(Grid1D(-6, 6, 121), Grid1D(-6, 6, 121))
    f0 = gaussian_phase_density(GaussianParams.vacuum(), g)
    assert f0.values[60, 60] == pytest.approx(1 / np.pi, rel=1e-14)
    assert f.values[i, i] <= 1 / np.pi


@given(gaussians())
@settings(max_examples=20, deadline=None)
def test_phase_density_normalized_with_moments(g):
    f = gaussian_phase_density(g, PHASE)
    assert f.integral() == pytest.approx(1.0, abs=1e-6)
    m = f.moments()
    assert m.qbar == pytest.approx(g.qbar, abs=1e-6)
    assert m.pbar == pytest.approx(g.pbar, abs=1e-6)
    assert m.sqq == pytest.approx(g.sqq, abs=1e-6)
    assert m.sqp == pytest.approx(g.sqp, abs=1e-6)
    assert f.violations() == []


def test_phase_density_grid_too_small():
    with pytest.raises(GridError) as exc:
        gaussian_phase_density(GaussianParams(0, 0, 4, 1), PHASE)
    assert exc.value.code == "grid-too-small"


def test_ground_state(ground, qgrid):
    assert ground.norm() == pytest.approx(1.0, abs=1e-8)
    q2 = qgrid.weights @ (qgrid.points ** 2 * ground.density())
    assert q2 == pytest.approx(0.5, abs=1e-10)


def test_not_minimum_uncertainty(qgrid):
    with pytest.raises(StateError) as exc:
        gaussian_wavefunction(GaussianParams(0, 0, 0.4, 0.4), qgrid)
    assert exc.value.code == "not-minimum-uncertainty"


def test_momentum_boost_moves_momentum_density():
    g = Grid1D(-12, 12, 512)
    psi = gaussian_wavefunction(GaussianParams(0, 2.0, 0.5, 0.5), g)
    kg, dens = psi.momentum_density()
    assert kg.weights @ dens == pytest.approx(1.0, abs=1e-10)
    assert kg.weights @ (kg.points * dens) == pytest.approx(2.0, abs=1e-10)


def test_ground_momentum_density(ground):
    kg, dens = ground.momentum_density()
    np.testing.assert_allclose(dens, np.exp(-kg.points ** 2) / np.sqrt(np.pi), atol=1e-10)


def test_projector_properties(ground, ground_rho):
    np.testing.assert_allclose(ground_rho.diagonal(), ground.density(), atol=1e-15)
    assert np.array_equal(ground_rho.entries, ground_rho.entries.conj().T)
    lam = np.sort(ground_rho.eigenvalues())[::-1]
    assert lam[0] == pytest.approx(1.0, abs=1e-8)
    assert np.max(np.abs(lam[1:])) < 1e-8
    assert ground_rho.trace() == pytest.approx(1.0, abs=1e-10)
    assert ground_rho.purity() == pytest.approx(1.0, abs=1e-8)
    assert ground_rho.violations() == []


def test_density_hermitized_on_construction():
    g = Grid1D(-1, 1, 3)
    m = np.array([[1, 2j, 0], [0, 1, 0], [0, 0, 1]])
    rho = DensityMatrix(g, m)
    assert np.array_equal(rho.entries, rho.entries.conj().T)


def test_overlap_of_orthogonal_states():
    g = Grid1D(-10, 10, 256)
    a = gaussian_wavefunction(GaussianParams(0, 0, 0.5, 0.5), g)
    x = g.points
    b = WaveFunction(g, np.sqrt(2) * x * a.amplitudes)  # first excited state
    assert b.norm() == pytest.approx(1.0, abs=1e-10)
    assert overlap(density_from_wavefunction(a), density_from_wavefunction(b)) == pytest.approx(0, abs=1e-12)


@given(ks, ks)
def test_point_characteristic(k1, k2):
    s = PointState(0.7, -1.1)
    assert classical_characteristic(s, k1, k2) == pytest.approx(np.exp(1j * (0.7 * k1 - 1.1 * k2)))


@given(ks, ks)
@settings(max_examples=30)
def test_vacuum_characteristics(k1, k2):
    want = np.exp(-(k1 ** 2 + k2 ** 2) / 4)
    assert classical_characteristic(GaussianParams.vacuum(), k1, k2) == pytest.approx(want, abs=1e-15)


def test_sampled_characteristic_matches_closed_form():
    g = GaussianParams(0.3, -0.2, 0.6, 0.5, 0.1)
    f = gaussian_phase_density(g, PHASE)
    k1, k2 = np.meshgrid(np.linspace(-4, 4, 9), np.linspace(-4, 4, 9))
    np.testing.assert_allclose(classical_characteristic(f, k1, k2), classical_characteristic(g, k1, k2), atol=1e-10)
    assert classical_characteristic(f, 0, 0) == pytest.approx(1.0, abs=1e-12)


@given(gaussians(), ks, ks)
@settings(max_examples=20, deadline=None)
def test_classical_characteristic_bounded_and_hermitian(g, k1, k2):
    f = gaussian_phase_density(g, PHASE)
    c = classical_characteristic(f, k1, k2)
    assert abs(c) <= 1 + 1e-10
    assert classical_characteristic(f, -k1, -k2) == pytest.approx(np.conj(c), abs=1e-12)


def test_quantum_characteristic_ground(ground_rho):
    k1, k2 = np.meshgrid(np.linspace(-5, 5, 11), np.linspace(-5, 5, 11))
    got = quantum_characteristic(ground_rho, k1, k2)
    np.testing.assert_allclose(got, np.exp(-(k1 ** 2 + k2 ** 2) / 4), atol=1e-12)
    assert quantum_characteristic(ground_rho, 0, 0) == pytest.approx(1.0, abs=1e-12)


@given(ks, ks)
@settings(max_examples=25, deadline=None)
def test_quantum_characteristic_conjugate_symmetry(k1, k2):
    g = Grid1D(-10, 10, 128)
    rho = density_from_wavefunction(gaussian_wavefunction(GaussianParams(0.5, -0.7, 0.25, 1.0), g))
    c = quantum_characteristic(rho, k1, k2)
    assert quantum_characteristic(rho, -k1, -k2) == pytest.approx(np.conj(c), abs=1e-10)
    assert abs(c) <= 1 + 1e-10


def test_coherent_state_quantum_equals_classical():
    g = Grid1D(-12, 12, 512)
    p = GaussianParams(0.8, -0.6, 0.5, 0.5)
    rho = density_from_wavefunction(gaussian_wavefunction(p, g))
    k1, k2 = np.meshgrid(np.linspace(-4, 4, 9), np.linspace(-4, 4, 9))
    np.testing.assert_allclose(quantum_characteristic(rho, k1, k2), classical_characteristic(p, k1, k2), atol=1e-6)


def test_squeezed_state_orientation():
    # sqq = 1/8 narrows the position density; chi(k, 0) = exp(-k^2 sqq / 2)
    g = Grid1D(-10, 10, 400)
    p = GaussianParams(0, 0, 0.125, 2.0)
    rho = density_from_wavefunction(gaussian_wavefunction(p, g))
    for k1, k2 in [(3.0, 0.0), (0.0, 1.0), (1.0, 0.5)]:
        assert quantum_characteristic(rho, k1, k2) == pytest.approx(classical_characteristic(p, k1, k2), abs=1e-10)


def test_argument_outside_grid(ground_rho, qgrid):
    with pytest.raises(GridError) as exc:
        quantum_characteristic(ground_rho, 0.0, qgrid.span * 1.01)
    assert exc.value.code == "argument-outside-grid"


def test_grid_leakage():
    g = Grid1D(-3, 3, 64)
    rho = density_from_wavefunction(gaussian_wavefunction(GaussianParams(2.0, 0, 0.5, 0.5), g))
    with pytest.raises(GridError) as exc:
        quantum_characteristic(rho, 0.1, 0.1)
    assert exc.value.code == "grid-leakage"


def test_shifted_diagonals_integer_and_fractional(ground_rho, qgrid):
    h = qgrid.step
    s = shifted_diagonals(ground_rho, [0.0, 3 * h, 0.37])
    np.testing.assert_allclose(s[0], ground_rho.diagonal(), atol=1e-14)
    np.testing.assert_allclose(s[1, :-3], ground_rho.entries.diagonal(-3), atol=1e-14)
    x = qgrid.points
    want = np.pi ** -0.5 * np.exp(-((x + 0.37) ** 2 + x ** 2) / 2)
    np.testing.assert_allclose(s[2], want, atol=1e-12)
