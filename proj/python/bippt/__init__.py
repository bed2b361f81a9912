"""bi-PPT decomposition of real multipartite density matrices."""

from ._core import (
    ConfigError,
    DomainError,
    ModelError,
    NumericalError,
    ShapeError,
    enumerate_bipartitions,
    make_state,
    objective,
    partial_transpose,
    project_psd,
    project_simplex,
    project_trace_one,
    read_matrix,
    solve,
    write_matrix,
)

__all__ = [
    "ConfigError",
    "DomainError",
    "ModelError",
    "NumericalError",
    "ShapeError",
    "enumerate_bipartitions",
    "make_state",
    "objective",
    "partial_transpose",
    "project_psd",
    "project_simplex",
    "project_trace_one",
    "read_matrix",
    "solve",
    "write_matrix",
]
