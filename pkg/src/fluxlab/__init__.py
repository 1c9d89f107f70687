"""Magnetic lattice models, Landau-level numerics, and their spectral checks."""

__version__ = "0.1.0"

from .errors import (
    ConfigError,
    DegenerateBandsError,
    FluxlabError,
    InfeasibleModelError,
    NumericalCheckError,
)
from .lattice import (
    BlochFiberFamily,
    BoxOperator,
    FourierDispersion,
    RationalFlux,
    add_onsite_disorder,
    harper_family,
    harper_fiber,
    hofstadter_family,
    hofstadter_fiber,
    magnetic_translation_pair,
    peierls_quantize,
    plaquette_flux,
    symmetric_gauge_box,
)
from .spectra import (
    BandIntervals,
    Histogram,
    SpectrumSample,
    band_intervals,
    check_hermitian,
    chern_numbers,
    default_gap_tol,
    dos,
    eigen_residual,
    eigenvalues_hermitian,
    eigh_hermitian,
    hausdorff,
    spectrum_union,
)
from .continuum import (
    ContinuumHamiltonian,
    FourierPotential,
    LandauBasisSpec,
    StrongFieldRow,
    continuum_hamiltonian,
    distances_decreasing,
    feasible_field,
    guiding_translation,
    landau_torus_basis,
    level_form_factor,
    lll_effective,
    next_level_coupling,
    plane_wave_element,
    strong_field_report,
)
from .dynamics import (
    DefectRow,
    DefectScalingReport,
    IntertwinerUnitary,
    Projector,
    WavePacket,
    defect_curve,
    defect_scaling,
    evolve,
    fit_slope_through_origin,
    nagy_intertwiner,
    peierls_defect,
    spectral_projection,
)
from .disorder import (
    DisorderRealization,
    EnsembleStats,
    anderson_realization,
    ensemble_dos,
    gap_fill_fraction,
    hashed_bits,
    hashed_normal,
    hashed_uniform,
    scaled_realization,
)

__all__ = [name for name in dir() if not name.startswith("_")]
