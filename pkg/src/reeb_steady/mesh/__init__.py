"""Surface pipeline: mesh input, critical points, graph extraction, circulation."""
from .circulation import PushforwardCirculation, angular_oneform, exact_oneform, oneform_array, pushforward_circulation
from .critical import PointKind, classify_critical, critical_counts, critical_vertices, loop_sides
from .extract import CompatibilityReport, ExtractionResult, SaddleFit, compatibility_check, extract_reeb
from .io import Mesh, MeshError, build_mesh, load_mesh, mesh_from_json, write_off

__all__ = [
    "CompatibilityReport",
    "ExtractionResult",
    "Mesh",
    "MeshError",
    "PointKind",
    "PushforwardCirculation",
    "SaddleFit",
    "angular_oneform",
    "build_mesh",
    "classify_critical",
    "compatibility_check",
    "critical_counts",
    "critical_vertices",
    "exact_oneform",
    "extract_reeb",
    "load_mesh",
    "loop_sides",
    "mesh_from_json",
    "oneform_array",
    "pushforward_circulation",
    "write_off",
]
