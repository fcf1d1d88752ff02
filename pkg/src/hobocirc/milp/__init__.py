"""CDP model building, LP emission, solver adapters and the exact search oracle."""

from .lpformat import LpParseError, LpProblem, emit_lp, read_lp, read_start, write_start
from .model import (
    BINARY,
    CONTINUOUS,
    CdpConfig,
    CdpModel,
    DecodeError,
    ModelError,
    Row,
    build_model,
    decode_solution,
    encode_circuit,
    expected_column_count,
)
from .search import SearchLimitError, exact_search
from .solvers import (
    ERROR,
    FEASIBLE,
    INFEASIBLE,
    OPTIMAL,
    SolutionParseError,
    SolutionVector,
    SolverCrashed,
    SolverError,
    SolverNotFound,
    SolverSpec,
    find_cbc,
    solve,
)

__all__ = [
    "BINARY",
    "CONTINUOUS",
    "ERROR",
    "FEASIBLE",
    "INFEASIBLE",
    "OPTIMAL",
    "CdpConfig",
    "CdpModel",
    "DecodeError",
    "LpParseError",
    "LpProblem",
    "ModelError",
    "Row",
    "SearchLimitError",
    "SolutionParseError",
    "SolutionVector",
    "SolverCrashed",
    "SolverError",
    "SolverNotFound",
    "SolverSpec",
    "build_model",
    "decode_solution",
    "emit_lp",
    "encode_circuit",
    "exact_search",
    "expected_column_count",
    "find_cbc",
    "read_lp",
    "read_start",
    "solve",
    "write_start",
]
