"""Steady Euler flows on surfaces through measured Reeb graphs."""
from .graph import (
    DegenerateZeroSetError,
    Edge,
    InvalidGraphError,
    MeasuredReebGraph,
    RefinedGraph,
    Vertex,
    VertexRole,
    Violation,
    homology_dimensions,
    refine_at_zeros,
    trunk_and_branches,
    validate_graph,
)
from .measures import EdgeMeasure, LogTerm, edge_moment, edge_weight, fit_log_coefficients, total_mass_and_weight
from .circulation import (
    AffineCirculationSpace,
    CirculationFunction,
    Infeasible,
    edge_concavity_check,
    evaluate,
    is_balanced,
    is_totally_negative,
    solve_circulation_space,
    vertex_limits,
)
from .polytope import (
    HRep,
    VRep,
    balanced_regions,
    boundedness,
    circulation_lower_bounds,
    enumerate_vertices,
    feasibility,
    negative_system,
)
from .casimirs import Distinct, Equivalent, MomentTable, moment_table, orbit_equivalent


__all__ = [
    "AffineCirculationSpace",
    "CirculationFunction",
    "DegenerateZeroSetError",
    "Distinct",
    "Edge",
    "EdgeMeasure",
    "Equivalent",
    "HRep",
    "Infeasible",
    "InvalidGraphError",
    "LogTerm",
    "MeasuredReebGraph",
    "MomentTable",
    "RefinedGraph",
    "VRep",
    "Vertex",
    "VertexRole",
    "Violation",
    "balanced_regions",
    "boundedness",
    "circulation_lower_bounds",
    "edge_concavity_check",
    "edge_moment",
    "edge_weight",
    "enumerate_vertices",
    "evaluate",
    "feasibility",
    "fit_log_coefficients",
    "homology_dimensions",
    "is_balanced",
    "is_totally_negative",
    "moment_table",
    "negative_system",
    "orbit_equivalent",
    "refine_at_zeros",
    "solve_circulation_space",
    "total_mass_and_weight",
    "trunk_and_branches",
    "validate_graph",
    "vertex_limits",
]
