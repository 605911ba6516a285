from .coloring import ColoringState, PaletteBlock, PartialColoring
from .errors import (
    BruteForceLimitError,
    ColoringError,
    CoverFreeViolation,
    GraphFormatError,
    InvalidAlphaError,
    NonTerminationError,
    OrientationCycleError,
    PaletteExhaustedError,
    StageError,
)
from .graph import ArborityEstimate, Graph, from_edge_list
from .results import ColoringRun, PipelineResult, RoundStats, StageRecord, VerificationReport

__all__ = [
    "ArborityEstimate",
    "BruteForceLimitError",
    "ColoringError",
    "ColoringRun",
    "ColoringState",
    "CoverFreeViolation",
    "Graph",
    "GraphFormatError",
    "InvalidAlphaError",
    "NonTerminationError",
    "OrientationCycleError",
    "PaletteBlock",
    "PaletteExhaustedError",
    "PartialColoring",
    "PipelineResult",
    "RoundStats",
    "StageError",
    "StageRecord",
    "VerificationReport",
    "from_edge_list",
]
