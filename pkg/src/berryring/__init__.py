"""berryring: polarization transport in birefringent fiber rings.

A small numerical library for spin-1/2 (Jones spinor) transport along
birefringent fiber paths, ring monodromies and their resonator scattering,
geometric (solid-angle) phases, level-crossing transition probabilities,
and Frenet frames of space curves.  The berry-ring CLI drives the standard
scenarios and writes deterministic CSV artifacts.
"""

__version__ = "1.0.0"

from .adiabatic import (
    AdiabaticPhases,
    EigenFrame,
    adiabatic_monodromy,
    eigenframe,
    solid_angle,
)
from .backends import available_backends, get_backend, ordered_product, set_backend
from .errors import (
    AnalysisError,
    BerryRingError,
    ConfigError,
    ContractViolationError,
    DegeneracyError,
    DomainError,
    InvalidArgumentError,
    OutputError,
    SearchError,
    SingularMatrixError,
    UndefinedNormalError,
)
from .evolution import (
    BlochTrajectory,
    IntegrationConfig,
    evolve,
    monodromy,
    trajectory,
)
from .frenet import (
    FrenetFrame,
    SpaceCurve,
    frenet_frames,
    helix_curve,
    load_curve_csv,
    rytov_birefringence,
    rytov_path,
)
from .paths import (
    BirefringenceSample,
    DiameterPath,
    FermiStepPerturbation,
    HalfCirclePath,
    RingParams,
    RingPath,
    StraightLinePath,
    TabulatedPath,
    kappa_at,
    standard_ring,
)
from .resonator import (
    CouplerParams,
    SweepResult,
    adiabatic_alpha_fwhm,
    broadened_transmission,
    calibrate_theta_t,
    coupler_apply,
    fwhm,
    linewidth_phase,
    modulator_sweep,
    s_matrix,
    transmission_critical,
    transmission_near_resonance,
)
from .spinor import (
    IDENTITY_2,
    SIGMA_1,
    SIGMA_2,
    SIGMA_3,
    adjoint,
    bloch_of,
    determinant,
    eigenbasis,
    inverse,
    is_unitary,
    normalize,
    pauli_exp,
)
from .zener import (
    ZenerResult,
    bessel_j0,
    find_lambda_zeros,
    pz_half_circle_large,
    pz_half_circle_small,
    pz_perturbative_planar,
    pz_ring_estimate,
    pz_straight_line,
    transition_probability,
)

__all__ = [
    "__version__",
    # errors
    "BerryRingError",
    "InvalidArgumentError",
    "DomainError",
    "ConfigError",
    "ContractViolationError",
    "DegeneracyError",
    "UndefinedNormalError",
    "SingularMatrixError",
    "SearchError",
    "AnalysisError",
    "OutputError",
    # spinor algebra
    "SIGMA_1",
    "SIGMA_2",
    "SIGMA_3",
    "IDENTITY_2",
    "pauli_exp",
    "normalize",
    "bloch_of",
    "adjoint",
    "determinant",
    "inverse",
    "is_unitary",
    "eigenbasis",
    # paths
    "BirefringenceSample",
    "HalfCirclePath",
    "StraightLinePath",
    "DiameterPath",
    "FermiStepPerturbation",
    "TabulatedPath",
    "RingPath",
    "RingParams",
    "standard_ring",
    "kappa_at",
    # backends
    "ordered_product",
    "available_backends",
    "get_backend",
    "set_backend",
    # evolution
    "IntegrationConfig",
    "BlochTrajectory",
    "evolve",
    "trajectory",
    "monodromy",
    # adiabatic geometry
    "EigenFrame",
    "AdiabaticPhases",
    "eigenframe",
    "solid_angle",
    "adiabatic_monodromy",
    # level crossings
    "ZenerResult",
    "bessel_j0",
    "transition_probability",
    "pz_perturbative_planar",
    "pz_half_circle_large",
    "pz_half_circle_small",
    "pz_straight_line",
    "pz_ring_estimate",
    "find_lambda_zeros",
    # resonator
    "CouplerParams",
    "SweepResult",
    "coupler_apply",
    "s_matrix",
    "transmission_near_resonance",
    "transmission_critical",
    "linewidth_phase",
    "broadened_transmission",
    "modulator_sweep",
    "fwhm",
    "adiabatic_alpha_fwhm",
    "calibrate_theta_t",
    # frenet
    "SpaceCurve",
    "FrenetFrame",
    "frenet_frames",
    "helix_curve",
    "load_curve_csv",
    "rytov_birefringence",
    "rytov_path",
]
