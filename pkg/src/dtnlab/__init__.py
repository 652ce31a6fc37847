"""dtnlab: Steklov spectra, boundary heat flows, and bound checks.

A numerical laboratory for the operator that maps boundary data to the
outward flux of its interior extension on planar domains, the analytic
semigroups it generates, and a suite of verification checks for the
kernel bounds those flows satisfy.
"""

from .geometry import (BoundarySpace, LipschitzWitness, PlanarDomain,
                       build_boundary_space, geodesic_distance, make_domain,
                       make_witness, rho_distance, rho_matrix,
                       rho_oracle_sample, sample_witnesses)
from .meshing import InteriorMesh, triangulate
from .operator import (DtnOperator, HarmonicExtension, PotentialField,
                       StiffnessSystem, assemble_system, coercivity_margin,
                       disk_mode_eigenvalue, exact_annulus_dtn,
                       exact_disk_dtn, harmonic_extension, make_potential,
                       schur_dtn, spectral_branches)
from .semigroup import (KernelMatrix, apply_semigroup, commutator,
                        disk_poisson_kernel, duhamel_residual, kernel_matrix,
                        modes_for_time, power_semigroup, spectral_multiplier,
                        subordinate, subordination_moment)
from .verify import (BoundSpec, STABILITY_RTOL, SweepGrid,
                     VerificationReport, commutator_growth_check,
                     convolution_check, derivative_bound_check,
                     domination_check, lplq_slope, operator_norm,
                     poisson_sup_ratio, sector_holomorphy_sweep,
                     submarkov_check, weighted_norm)
from .cache import (CACHE_VERSION, build_operator, cache_key,
                    default_cache_dir, fetch_operator, load_operator,
                    save_operator)
from .cli import ExperimentConfig, load_config, run_experiment

__version__ = "0.1.0"

__all__ = [
    "BoundarySpace", "BoundSpec", "CACHE_VERSION", "DtnOperator",
    "ExperimentConfig", "HarmonicExtension", "InteriorMesh", "KernelMatrix",
    "LipschitzWitness", "PlanarDomain", "PotentialField", "STABILITY_RTOL",
    "StiffnessSystem", "SweepGrid", "VerificationReport", "apply_semigroup",
    "assemble_system", "build_boundary_space", "build_operator", "cache_key",
    "coercivity_margin", "commutator", "commutator_growth_check",
    "convolution_check", "default_cache_dir", "derivative_bound_check",
    "disk_mode_eigenvalue", "disk_poisson_kernel", "domination_check",
    "duhamel_residual", "exact_annulus_dtn", "exact_disk_dtn",
    "fetch_operator", "geodesic_distance", "harmonic_extension",
    "kernel_matrix", "load_config", "load_operator", "lplq_slope",
    "make_domain", "make_potential", "make_witness", "modes_for_time",
    "operator_norm", "poisson_sup_ratio", "power_semigroup",
    "rho_distance", "rho_matrix", "rho_oracle_sample", "run_experiment",
    "sample_witnesses", "save_operator", "schur_dtn",
    "sector_holomorphy_sweep", "spectral_branches", "spectral_multiplier",
    "submarkov_check", "subordinate", "subordination_moment", "triangulate",
    "weighted_norm",
]
