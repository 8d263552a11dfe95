"""Spectral approximation of transfer operators with holomorphic branches.

Transfer operators are discretised by Chebyshev interpolation on confocal
ellipses or by equidistant Laurent interpolation on annuli; eigenvalues,
eigenfunctions and normalised eigenfunctionals of the resulting collocation
matrices converge exponentially fast.
"""

from holotransfer.apps import (
    IFSProblem,
    RandomMatrixProblem,
    blaschke_benchmark,
    blaschke_system,
    chaos_game,
    correlation_decay,
    eigenvalue_table,
    ifs_integral,
    ifs_lyapunov,
    interval_map_system,
    lyapunov_matrices,
    spectrum,
)
from holotransfer.errors import ConfigError, HolotransferError, NumericalError, ValidationError
from holotransfer.geometry import (
    AnnularDomain,
    ContractionReport,
    EllipticDomain,
    contains,
    contraction_search,
    elliptic_radius,
    image_radius,
    joukowski,
)
from holotransfer.polybasis import (
    ChebCoeffs,
    LaurentCoeffs,
    cheb_eval,
    cheb_nodes,
    cheb_transform,
    equi_nodes,
    laurent_eval,
    laurent_transform,
)
from holotransfer.projection import (
    bound_constant,
    embedding_error_bound,
    project_cheb,
    project_equi,
    projection_norm_bound,
)
from holotransfer.spectral import (
    EigenFunctional,
    SpectralData,
    convergence_table,
    eigendecompose,
    eigenfunction,
    eigenfunctional,
)
from holotransfer.transferop import (
    CircleSystem,
    CollocationMatrix,
    MapWeightSystem,
    assemble_cheb,
    assemble_circle,
)

__version__ = "0.1.0"
