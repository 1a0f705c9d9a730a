"""Local simplex representations of points and Delaunay simplex identification.

A query ``y`` is represented over a fixed dictionary of atoms by weights on
the probability simplex. The locality-regularized least squares problem
trades reconstruction error against the weighted spread
``sum_i w_i ||x_i - y||^2``; for small enough weight its support is the
Delaunay simplex containing ``y``. The package provides that solver, the
exact locality LP, the lifted convex-hull LP, a brute-force Delaunay oracle,
the associated bounds and an experiment CLI (``dl``).
"""

from .estimators import DelaunayLocator, LocalityCoder
from .exceptions import (
    DegenerateInputError,
    DegenerateSimplexError,
    InvalidInputError,
    LocalityError,
    NotApplicableError,
    NotInteriorError,
    ResourceLimitError,
    SingularKKTError,
)
from .geometry import (
    BarycentricSystem,
    Circumsphere,
    Dictionary,
    GeneralPositionReport,
    SimplexWeights,
    barycentric,
    barycentric_system,
    boundary_distance,
    circumsphere,
    general_position_check,
    locality,
    locality_gap_constant,
    sample_simplex_weights,
)
from .kkt import KktRhs, KktSolution, kkt_direct_solve, kkt_reduced_solve
from .locality import (
    IdentificationResult,
    RhoBound,
    SolutionPath,
    identify,
    jaccard,
    rho_bound,
    solution_path,
    stability_bound,
    support,
)
from .lp import LinearProgram, chlp_locate, solve_exact_E, solve_lp
from .oracle import DelaunayComplex, enumerate_delaunay, is_delaunay_simplex, locate_simplex
from .qp import project_onto_hull, solve_relaxed_R
from .report import SolveReport

__version__ = "0.1.0"

__all__ = [
    "BarycentricSystem", "Circumsphere", "DelaunayComplex", "DelaunayLocator",
    "DegenerateInputError", "DegenerateSimplexError", "Dictionary",
    "GeneralPositionReport", "IdentificationResult", "InvalidInputError", "KktRhs",
    "KktSolution", "LinearProgram", "LocalityCoder", "LocalityError",
    "NotApplicableError", "NotInteriorError", "ResourceLimitError", "RhoBound",
    "SimplexWeights", "SingularKKTError", "SolutionPath", "SolveReport",
    "barycentric", "barycentric_system", "boundary_distance", "chlp_locate",
    "circumsphere", "enumerate_delaunay", "general_position_check", "identify",
    "is_delaunay_simplex", "jaccard", "kkt_direct_solve", "kkt_reduced_solve",
    "locality", "locality_gap_constant", "locate_simplex", "project_onto_hull",
    "rho_bound", "sample_simplex_weights", "solution_path", "solve_exact_E",
    "solve_lp", "solve_relaxed_R", "stability_bound", "support",
]
