"""Symplectic tomography of classical and quantum free motion.

States, tomograms, free evolution in four pictures and admissibility tests
built on characteristic functions (units m = hbar = 1).
"""
__version__ = "0.1.0"

from .errors import GridError, NonPhysicalError, RayError, SamplingError, StateError, TomokitError
from .grids import (
    Grid1D,
    Grid2D,
    SampledField1D,
    dft_1d,
    inverse_dft_1d,
    make_uniform_grid,
    parse_grid,
    trapezoid_integral,
)
from .states import (
    DensityMatrix,
    GaussianParams,
    PhaseSpaceField,
    PointState,
    WaveFunction,
    classical_characteristic,
    density_from_wavefunction,
    gaussian_phase_density,
    gaussian_wavefunction,
    overlap,
    quantum_characteristic,
)
from .tomography import (
    DeltaSlice,
    GaussianTomogram,
    Ray,
    TomogramField,
    TomogramSlice,
    gaussian_tomogram_eval,
    inverse_radon,
    radon_classical,
    reconstruct_density,
    resample,
    sample_gaussian_tomogram,
    sigma_xx,
    tomogram_quantum,
    unit_circle_rays,
)
from .dynamics import (
    evolve_classical,
    evolve_density,
    evolve_tomogram,
    evolve_wavefunction,
    free_kinetic_residual,
    integrals_of_motion,
    scaling_constraint_residual,
)
from .quantumness import (
    ClassificationReport,
    ClassifyConfig,
    CovarianceRecord,
    WHElement,
    classify,
    covariance_from_tomogram,
    group_function,
    positive_type_test,
    sr_test,
    tomographic_moment,
    wh_compose,
)
