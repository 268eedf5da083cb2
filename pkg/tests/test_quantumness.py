import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from tomokit.dynamics import evolve_tomogram
from tomokit.errors import RayError, SamplingError
from tomokit.grids import Grid1D
from tomokit.quantumness import (
    ClassifyConfig,
    CovarianceRecord,
    WHElement,
    classify,
    covariance_from_tomogram,
    group_function,
    positive_type_matrix,
    positive_type_test,
    sr_test,
    tomographic_moment,
    wh_compose,
    wh_lattice,
)
from tomokit.states import GaussianParams
from tomokit.tomography import (
    GaussianTomogram,
    Ray,
    TomogramField,
    TomogramSlice,
    sample_gaussian_tomogram,
)

VAC = GaussianTomogram(GaussianParams.vacuum())
SUB = GaussianTomogram(GaussianParams(0.0, 0.0, 0.4, 0.4))
coord = st.floats(-3, 3, allow_nan=False)
elements = st.builds(WHElement, coord, coord, coord)


def cov(sqq, spp, sqp=0.0, source="analytic"):
    return CovarianceRecord(0.0, 0.0, sqq, spp, sqp, source)


# -- moments ---------------------------------------------------------------


def test_slice_moments(xgrid):
    g = GaussianParams(0.5, -0.2, 0.7, 0.6, 0.1)
    r = Ray(0.8, 0.6)
    sl = sample_gaussian_tomogram(g, [r], xgrid).slices[0]
    m = 0.8 * 0.5 - 0.6 * 0.2
    v = 0.64 * 0.7 + 0.36 * 0.6 + 2 * 0.48 * 0.1
    assert tomographic_moment(sl, 0) == pytest.approx(1.0, abs=1e-10)
    assert tomographic_moment(sl, 1) == pytest.approx(m, abs=1e-10)
    assert tomographic_moment(sl, 2) == pytest.approx(v + m * m, abs=1e-10)


@pytest.mark.parametrize("n, expected", [(0, 1.0), (1, 0.0), (2, 0.5), (3, 0.0), (4, 0.75)])
def test_gaussian_moments_closed_form(n, expected):
    assert tomographic_moment(VAC, n, Ray(1, 0)) == pytest.approx(expected)


def test_gaussian_moment_needs_ray():
    with pytest.raises(RayError, match="missing-ray"):
        tomographic_moment(VAC, 2)


def test_tail_truncation():
    xg = Grid1D(-1.5, 1.5, 128)
    sl = TomogramSlice(Ray(1, 0), xg, np.full(xg.n, 1 / 3))
    with pytest.raises(SamplingError, match="tail-truncation"):
        tomographic_moment(sl, 2)
    with pytest.raises(SamplingError, match="tail-truncation"):
        tomographic_moment(sl, 5)


def test_covariance_of_sampled_fields(vacuum_field, sub_field):
    c = covariance_from_tomogram(vacuum_field)
    assert (c.sqq, c.spp, c.sqp) == pytest.approx((0.5, 0.5, 0.0), abs=1e-4)
    assert c.source == "sampled"
    c = covariance_from_tomogram(sub_field)
    assert (c.sqq, c.spp, c.sqp) == pytest.approx((0.4, 0.4, 0.0), abs=1e-4)


def test_covariance_after_shear(vacuum_field):
    c = covariance_from_tomogram(evolve_tomogram(vacuum_field, 1.0))
    assert (c.sqq, c.spp, c.sqp) == pytest.approx((1.0, 0.5, 0.5), abs=1e-4)


def test_covariance_missing_ray(xgrid):
    W = sample_gaussian_tomogram(GaussianParams.vacuum(), [Ray(1, 0), Ray(0, 1), Ray(0.6, 0.8)], xgrid)
    with pytest.raises(RayError, match="missing-ray"):
        covariance_from_tomogram(W)


def test_covariance_analytic_roundtrip():
    g = GaussianParams(0.3, -0.1, 0.9, 0.4, 0.2)
    back = covariance_from_tomogram(GaussianTomogram(g)).to_params()
    assert back.to_dict() == pytest.approx(g.to_dict(), abs=1e-15)


# -- Schrodinger-Robertson -------------------------------------------------


@pytest.mark.parametrize(
    "c, lhs, ok",
    [
        (cov(0.5, 0.5), 0.25, True),
        (cov(0.4, 0.4), 0.16, False),
        (cov(1.0, 1.0, 0.3), 0.91, True),
        (cov(1.0, 0.2, 0.3), 0.11, False),
    ],
)
def test_sr_examples(c, lhs, ok):
    val, passed = sr_test(c)
    assert val == pytest.approx(lhs)
    assert passed is ok


def test_sr_tolerance_depends_on_source():
    assert sr_test(cov(0.5, 0.5 - 1e-5, source="sampled"))[1]
    assert not sr_test(cov(0.5, 0.5 - 1e-5, source="analytic"))[1]


# -- Weyl-Heisenberg group -------------------------------------------------


def test_compose_example():
    a, b = WHElement(1, 0, 0), WHElement(0, 1, 0)
    assert wh_compose(a, b) == WHElement(1, 1, 0.5)
    assert wh_compose(b, a) == WHElement(1, 1, -0.5)


@given(elements)
def test_inverse_and_identity(g):
    e = WHElement.identity()
    assert g @ e == g and e @ g == g
    assert g @ g.inverse() == e
    assert g.inverse() @ g == e


@given(elements, elements, elements)
def test_associativity(a, b, c):
    lhs, rhs = (a @ b) @ c, a @ (b @ c)
    assert (lhs.mu, lhs.nu) == pytest.approx((rhs.mu, rhs.nu), abs=1e-12)
    assert lhs.tau == pytest.approx(rhs.tau, abs=1e-9)


def _unitary(g, q, p):
    return np.exp(1j * g.tau) * expm(1j * (g.mu * q + g.nu * p))


def test_composition_matches_operator_product():
    # truncated oscillator basis; only the low block is free of truncation error
    n = 40
    a = np.diag(np.sqrt(np.arange(1, n)), 1)
    q = (a + a.T) / np.sqrt(2)
    p = 1j * (a.T - a) / np.sqrt(2)
    ga, gb = WHElement(0.4, -0.3, 0.2), WHElement(-0.2, 0.5, -0.1)
    lhs = _unitary(gb, q, p) @ _unitary(ga, q, p)
    rhs = _unitary(wh_compose(ga, gb), q, p)
    assert np.max(np.abs(lhs[:10, :10] - rhs[:10, :10])) < 1e-8


def test_lattice_size():
    lat = wh_lattice(7, 2.0)
    assert len(lat) == 49
    assert {e.mu for e in lat} == set(np.linspace(-2, 2, 7))


# -- group function and positive type --------------------------------------


def test_group_function_identity(vacuum_field):
    assert group_function(vacuum_field, WHElement.identity()) == 1.0
    assert group_function(VAC, WHElement(0, 0, 0.7)) == pytest.approx(np.exp(0.7j))


@pytest.mark.parametrize("mu, nu", [(1.0, 0.0), (0.6, -1.2), (-1.5, 1.5)])
def test_group_function_vacuum(vacuum_field, mu, nu):
    exact = np.exp(-(mu ** 2 + nu ** 2) / 4)
    assert group_function(VAC, WHElement(mu, nu)) == pytest.approx(exact, abs=1e-14)
    assert group_function(vacuum_field, WHElement(mu, nu)) == pytest.approx(exact, abs=1e-8)


@settings(max_examples=30, deadline=None)
@given(st.builds(WHElement, st.floats(-2, 2), st.floats(-2, 2), coord))
def test_group_function_conjugate_symmetry(g):
    G = GaussianTomogram(GaussianParams(0.4, -0.3, 0.8, 0.6, 0.1))
    assert group_function(G, g.inverse()) == pytest.approx(np.conj(group_function(G, g)), abs=1e-12)


def test_positive_type_matrix_structure(vacuum_field):
    m = positive_type_matrix(vacuum_field, wh_lattice(5, 1.5))
    assert np.allclose(m, m.conj().T)
    assert np.allclose(np.diag(m), 1.0)


def test_positive_type_vacuum_passes(vacuum_field):
    lam, ok = positive_type_test(vacuum_field, wh_lattice(5, 2.0))
    assert ok
    lam, ok = positive_type_test(VAC, wh_lattice(5, 2.0))
    assert ok


def test_positive_type_squeezed_below_bound_fails():
    W = GaussianTomogram(GaussianParams(0.0, 0.0, 0.1, 0.1))
    lam, ok = positive_type_test(W, wh_lattice(5, 2.0))
    assert lam < -1e-3 and not ok


def test_positive_type_single_element():
    m = positive_type_matrix(SUB, [WHElement(0.3, 0.4, 1.0)])
    assert np.allclose(m, [[1.0]])


def test_positive_type_duplicate_elements():
    with pytest.raises(ValueError):
        positive_type_matrix(VAC, [WHElement(1, 0), WHElement(1, 0)])


def test_positive_type_interlacing():
    lat = list(wh_lattice(7, 2.0))
    lam_sub, _ = positive_type_test(SUB, lat[::3])
    lam_all, _ = positive_type_test(SUB, lat)
    assert lam_all <= lam_sub + 1e-12


# -- classification --------------------------------------------------------


def test_classify_vacuum_and_sub_heisenberg(vacuum_field, sub_field):
    assert classify(VAC).verdict == "quantum-admissible"
    assert classify(SUB).verdict == "classical-only"
    assert classify(vacuum_field).verdict == "quantum-admissible"
    rep = classify(sub_field)
    assert rep.verdict == "classical-only"
    assert not rep.sr_ok and not rep.pt_ok


@pytest.mark.parametrize("t", [0.5, 1.0, 5.0])
def test_verdict_invariant_under_evolution(t):
    assert classify(evolve_tomogram(VAC, t)).verdict == "quantum-admissible"
    assert classify(evolve_tomogram(SUB, t)).verdict == "classical-only"


@pytest.mark.parametrize("t", [0.5, 1.0])
def test_sampled_verdict_invariant_under_evolution(vacuum_field, sub_field, t):
    # the vacuum sits on the positive-type boundary; sampling noise must not flip it
    assert classify(evolve_tomogram(vacuum_field, t)).verdict == "quantum-admissible"
    assert classify(evolve_tomogram(sub_field, t)).verdict == "classical-only"


def test_classify_invalid_on_negative_values(vacuum_field):
    m = vacuum_field.matrix.copy()
    m[0, 256] = -1e-3
    rep = classify(TomogramField.from_matrix(vacuum_field.rays, vacuum_field.xgrid, m))
    assert rep.verdict == "invalid"
    assert not rep.nonneg_ok


def test_classify_invalid_on_bad_norm(vacuum_field):
    bad = TomogramField.from_matrix(vacuum_field.rays, vacuum_field.xgrid, 1.01 * vacuum_field.matrix)
    assert classify(bad).verdict == "invalid"


def test_classify_indeterminate_without_refinement(xgrid):
    # axis-only rays: base lattice reachable by homogeneity, refined one not
    lat = ClassifyConfig(lattice_n=2, lattice_extent=1.0, refinements=1)
    rays = [Ray(1, 0), Ray(0, 1), Ray(1, 1), Ray(1, -1)]
    W = sample_gaussian_tomogram(GaussianParams.vacuum(), rays, xgrid)
    assert classify(W, lat).verdict == "indeterminate"


def test_report_serializes():
    d = classify(VAC).to_dict()
    assert d["verdict"] == "quantum-admissible"
    assert d["sr_lhs"] == pytest.approx(0.25)
