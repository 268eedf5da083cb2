import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import erf

from tomokit.errors import GridError
from tomokit.grids import (
    Grid1D,
    Grid2D,
    SampledField1D,
    dft_1d,
    edge_mass,
    fourier_sum,
    interp_bandlimited,
    inverse_dft_1d,
    make_uniform_grid,
    parse_grid,
    trapezoid_2d,
    trapezoid_integral,
)

finite = st.floats(-50, 50, allow_nan=False)


def test_three_point_grid():
    g = make_uniform_grid(-1, 1, 3)
    np.testing.assert_array_equal(g.points, [-1.0, 0.0, 1.0])


def test_integer_lattice_step():
    assert make_uniform_grid(0, 10, 11).step == 1.0


@pytest.mark.parametrize(
    "lo, hi, n, code",
    [(0, 1, 1, "invalid-count"), (1, 1, 5, "invalid-range"), (2, 1, 5, "invalid-range"),
     (0, 1, 2.5, "invalid-count"), (0, np.inf, 4, "invalid-range")],
)
def test_grid_validation(lo, hi, n, code):
    with pytest.raises(GridError) as exc:
        Grid1D(lo, hi, n)
    assert exc.value.code == code


@given(lo=finite, width=st.floats(1e-3, 100), n=st.integers(2, 400))
def test_grid_points_uniform_with_exact_endpoints(lo, width, n):
    g = Grid1D(lo, lo + width, n)
    pts = g.points
    assert pts[0] == g.min and pts[-1] == g.max
    np.testing.assert_allclose(np.diff(pts), g.step, rtol=1e-9, atol=1e-12 * max(1.0, abs(lo)))
    for i in (0, n // 2, n - 1):
        assert g.index(g.point(i)) == i


def test_points_read_only():
    g = Grid1D(0, 1, 5)
    with pytest.raises(ValueError):
        g.points[0] = 3.0


@pytest.mark.parametrize("text", ["-8:8:512", "0:1:2", "-1e-3:2.5:17"])
def test_parse_grid_round_trip(text):
    g = parse_grid(text)
    assert parse_grid(str(g)) == g


@pytest.mark.parametrize("text", ["1:2", "a:b:c", "0:1:1", "3:1:10", ""])
def test_parse_grid_rejects(text):
    with pytest.raises(GridError):
        parse_grid(text)


def test_trapezoid_constant_and_linear():
    g = Grid1D(0, 1, 101)
    assert trapezoid_integral(SampledField1D(g, np.ones(101))) == pytest.approx(1.0, abs=1e-15)
    assert trapezoid_integral(SampledField1D(g, g.points)) == pytest.approx(0.5, abs=1e-15)


def test_trapezoid_normal_density():
    s = 1.3
    g = Grid1D(-8 * s, 8 * s, 512)
    f = np.exp(-0.5 * (g.points / s) ** 2) / (s * np.sqrt(2 * np.pi))
    assert abs(trapezoid_integral(SampledField1D(g, f)) - erf(8 / np.sqrt(2))) < 1e-8


@given(a=finite, b=finite)
@settings(max_examples=30)
def test_trapezoid_linearity(a, b):
    g = Grid1D(-2, 3, 37)
    f = SampledField1D(g, np.sin(g.points))
    h = SampledField1D(g, g.points ** 2)
    lhs = trapezoid_integral(a * f + b * h)
    rhs = a * trapezoid_integral(f) + b * trapezoid_integral(h)
    assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-10)


def test_trapezoid_2d_product():
    grid = Grid2D(Grid1D(0, 1, 11), Grid1D(0, 2, 21))
    q, p = grid.mesh()
    assert trapezoid_2d(q * 0 + 1, grid) == pytest.approx(2.0)
    assert trapezoid_2d(q + p, grid) == pytest.approx(1.0 + 2.0)


def test_conjugate_grid_convention():
    g = Grid1D(-5, 5, 64)
    k = g.conjugate()
    assert k.n == 64
    assert k.min == pytest.approx(-np.pi / g.step)
    assert k.step == pytest.approx(2 * np.pi / (64 * g.step))


def test_dft_impulse_flat():
    g = Grid1D(-4, 4, 129)
    v = np.zeros(129)
    v[64] = 1 / g.step
    spectrum = dft_1d(SampledField1D(g, v))
    np.testing.assert_allclose(np.abs(spectrum.values), 1.0, atol=1e-12)


@pytest.mark.parametrize("sign", [-1, 1])
def test_dft_gaussian(sign):
    g = Grid1D(-20, 20, 512)
    spectrum = dft_1d(SampledField1D(g, np.exp(-0.5 * g.points ** 2)), sign=sign)
    k = spectrum.grid.points
    np.testing.assert_allclose(spectrum.values, np.sqrt(2 * np.pi) * np.exp(-0.5 * k ** 2), atol=1e-8)


@given(
    st.lists(st.floats(-1, 1), min_size=16, max_size=16),
    st.lists(st.floats(-1, 1), min_size=16, max_size=16),
    st.sampled_from([-1, 1]),
)
def test_dft_round_trip(re, im, sign):
    g = Grid1D(-1.5, 2.0, 16)
    f = SampledField1D(g, np.array(re) + 1j * np.array(im))
    back = inverse_dft_1d(dft_1d(f, sign), sign, out_grid=g)
    np.testing.assert_allclose(back.values, f.values, atol=1e-10)


def test_dft_parseval():
    g = Grid1D(-15, 15, 256)
    f = np.exp(-0.5 * (g.points - 1) ** 2) * np.cos(2 * g.points)
    spectrum = dft_1d(SampledField1D(g, f))
    lhs = np.sum(np.abs(f) ** 2) * g.step
    rhs = np.sum(np.abs(spectrum.values) ** 2) * spectrum.grid.step / (2 * np.pi)
    assert lhs == pytest.approx(rhs, rel=1e-8)


@given(k0=st.floats(-5, 5), sign=st.sampled_from([-1, 1]))
@settings(max_examples=25)
def test_fourier_sum_matches_direct(k0, sign):
    g = Grid1D(-3, 4, 23)
    v = np.cos(g.points) + 1j * g.points
    k = k0 + np.arange(g.n) * 2 * np.pi / (g.n * g.step)
    direct = np.exp(sign * 1j * np.outer(k, g.points)) @ v
    np.testing.assert_allclose(fourier_sum(v, g, k0, sign), direct, atol=1e-10)


def test_dft_rejects_foreign_grid():
    g = Grid1D(0, 1, 8)
    with pytest.raises(GridError):
        dft_1d(SampledField1D(g, np.ones(8)), out_grid=Grid1D(0, 1, 8))


def test_interp_bandlimited():
    g = Grid1D(-12, 12, 256)
    f = np.exp(-g.points ** 2)
    np.testing.assert_allclose(interp_bandlimited(f, g, g.points[:5]), f[:5], atol=1e-15)
    x = np.array([-0.33, 0.1, 1.7, 13.0])
    got = interp_bandlimited(f, g, x)
    np.testing.assert_allclose(got[:3], np.exp(-x[:3] ** 2), atol=1e-12)
    assert got[3] == 0.0


def test_edge_mass():
    g = Grid1D(-10, 10, 201)
    assert edge_mass(np.exp(-g.points ** 2), g) < 1e-30
    assert edge_mass(np.ones(201), g) == pytest.approx(2 * 5 * g.step)


def test_sampled_field_length():
    with pytest.raises(GridError):
        SampledField1D(Grid1D(0, 1, 4), np.ones(3))
