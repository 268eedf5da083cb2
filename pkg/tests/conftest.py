import numpy as np
import pytest

from tomokit import (
    GaussianParams,
    Grid1D,
    density_from_wavefunction,
    gaussian_wavefunction,
    sample_gaussian_tomogram,
    tomogram_quantum,
    unit_circle_rays,
)


@pytest.fixture(scope="session")
def xgrid():
    return Grid1D(-8.0, 8.0, 512)


@pytest.fixture(scope="session")
def qgrid():
    return Grid1D(-10.0, 10.0, 256)


@pytest.fixture(scope="session")
def rays128():
    return unit_circle_rays(128)


@pytest.fixture(scope="session")
def vacuum():
    return GaussianParams.vacuum()


@pytest.fixture(scope="session")
def ground(vacuum, qgrid):
    return gaussian_wavefunction(vacuum, qgrid)


@pytest.fixture(scope="session")
def ground_rho(ground):
    return density_from_wavefunction(ground)


@pytest.fixture(scope="session")
def vacuum_field(ground_rho, rays128, xgrid):
    """Quantum tomogram of the ground state on 128 unit-circle rays."""
    return tomogram_quantum(ground_rho, rays128, xgrid)


@pytest.fixture(scope="session")
def sub_field(rays128, xgrid):
    """Sampled tomogram of the sub-Heisenberg Gaussian sqq = spp = 0.4."""
    return sample_gaussian_tomogram(GaussianParams(0.0, 0.0, 0.4, 0.4), rays128, xgrid)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
