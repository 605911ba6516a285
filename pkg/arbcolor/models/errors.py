from typing import Any, List, Optional


class ColoringError(Exception):
    """Base class for every failure raised by the library"""


class GraphFormatError(ColoringError, ValueError):
    pass


class InvalidAlphaError(ColoringError, ValueError):
    """The declared arboricity is smaller than the graph's actual arboricity"""


class BruteForceLimitError(ColoringError, ValueError):
    pass


class CoverFreeViolation(ColoringError):
    def __init__(self, node: int, message: str):
        super().__init__(f"node {node}: {message}")
        self.node = node


class PaletteExhaustedError(ColoringError):
    def __init__(self, node: int, message: str):
        super().__init__(f"node {node}: {message}")
        self.node = node


class OrientationCycleError(ColoringError):
    pass


class NonTerminationError(ColoringError):
    """Raised when a simulator run hits its round limit (or deadlocks) with unhalted nodes"""

    def __init__(self, message: str, outputs: List[Optional[Any]], stats: Any, unhalted: List[int]):
        super().__init__(message)
        self.outputs = outputs
        self.stats = stats
        self.unhalted = unhalted


class StageError(ColoringError):
    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage {stage} failed: {cause}")
        self.stage = stage
        self.cause = cause
