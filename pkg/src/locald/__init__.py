"""Simulation and testing of local distributed decision in the LOCAL model."""

__version__ = "0.1.0"

from .errors import LocalDError
from .graph import (
    Configuration,
    Graph,
    IdAssignment,
    LocalView,
    Splitter,
    ball,
    build_graph,
    find_splitters,
    prefix,
    views_isomorphic,
)
from .languages import Language, check_hereditary, get as get_language
from .runtime import NodeAlgorithm, ProbabilityEstimate, RunResult, estimate_acceptance, run, verdict

__all__ = [
    "Configuration",
    "Graph",
    "IdAssignment",
    "Language",
    "LocalDError",
    "LocalView",
    "NodeAlgorithm",
    "ProbabilityEstimate",
    "RunResult",
    "Splitter",
    "__version__",
    "ball",
    "build_graph",
    "check_hereditary",
    "estimate_acceptance",
    "find_splitters",
    "get_language",
    "prefix",
    "run",
    "verdict",
    "views_isomorphic",
]
