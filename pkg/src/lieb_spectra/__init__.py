"""Spectral toolkit for the magnetic Lieb lattice and its almost Mathieu reduction.

The package builds finite magnetic tight-binding Hamiltonians on the Lieb
lattice, computes band sets at rational flux, probes flat-band / gap /
fractal structure, estimates transfer-matrix Lyapunov exponents and
localization diagnostics, and classifies the expected spectral regime from
the arithmetic of the flux and phase.
"""

from .arithmetic import (
    ContinuedFraction,
    Flux,
    NoSolutionError,
    beta_estimate,
    cf_expand,
    find_near_half,
    gamma_estimate,
    torus_norm,
)
from .operators import (
    GeneralParams,
    HermitianMatrix,
    LiebParams,
    build_amo,
    build_factor_product,
    build_general_1d,
    build_general_bloch,
    build_lieb_1d,
    build_lieb_2d_torus,
    build_lieb_bloch,
    dump_matrix,
    load_matrix,
    sign_flip_A,
)
from .spectra import (
    BandSet,
    DiscriminantPoly,
    amo_bands_rational,
    box_dimension_estimate,
    gap_set,
    general_bands_rational,
    general_map_energy,
    hausdorff_distance,
    lieb_bands_rational,
    map_amo_energy,
    measure,
    min_abs_energy,
    spectrum_2d_check,
)
from .dynamics import (
    DecayFit,
    TransferStep,
    eig_localization_profile,
    lyapunov,
    slaving_residual,
    zero_mode_kernel,
)
from .verify import (
    CheckReport,
    Regime,
    RegimeLabel,
    check_gap_bound,
    check_mapping,
    check_reduction_identity,
    check_symmetry,
    classify_regime,
    weyl_zero_residual,
)

__version__ = "0.1.0"
