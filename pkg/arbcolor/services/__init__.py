from .experiment_service import ExperimentService
from .registry import AlgorithmRegistry

__all__ = ["ExperimentService", "AlgorithmRegistry"]
