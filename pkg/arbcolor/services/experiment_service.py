import csv
import io
import itertools
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel

from ..models.errors import NonTerminationError, StageError
from ..models.graph import Graph, estimate_arboricity, read_edge_list
from ..models.results import (
    Algorithm,
    ExperimentConfig,
    ExperimentReport,
    GraphSource,
    RunRecord,
    SweepGrid,
)
from .generators import GenSpec
from .registry import AlgorithmRegistry, RunOptions
from .verify import CSV_COLUMNS, report, to_csv_row

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SweepPoint:
    n: int
    alpha: int
    epsilon: float
    algorithm: Algorithm
    seed: int


def error_kind(error: Exception) -> str:
    while isinstance(error, StageError):
        error = error.cause
    if isinstance(error, NonTerminationError):
        return "non-termination"
    return type(error).__name__


def to_json(model: BaseModel) -> str:
    """Sorted keys and no timestamps, so identical runs give identical bytes"""
    return json.dumps(model.model_dump(mode="json"), sort_keys=True, indent=2) + "\n"


class ExperimentService:
    def __init__(self, settings):
        self.settings = settings
        self.registry = AlgorithmRegistry(settings)

    def load_graph(self, source: GraphSource, alpha: Optional[int] = None) -> Tuple[Graph, int]:
        """The graph and its declared arboricity; edge-list files fall back to the degeneracy bound"""
        if source.path:
            g = read_edge_list(source.path)
            if alpha is not None:
                declared = alpha
            else:
                declared = max(1, estimate_arboricity(g, limit=self.settings.bruteforce_limit).declared)
            logger.info(f"Loaded {source.path}: n={g.n} m={g.m} alpha={declared}")
            return g, declared
        generated = GenSpec(source.family, source.n, alpha or source.alpha, source.seed).build()
        return generated.graph, generated.declared_alpha

    def run_once(
        self,
        algorithm: Algorithm,
        g: Graph,
        alpha: int,
        seed: int,
        epsilon: float = 1.0,
        round_limit: Optional[int] = None,
        dispatch_threshold: Optional[float] = None,
        objective: str = "fast",
        finisher: str = "low-arb-finisher",
    ) -> RunRecord:
        options = RunOptions(
            epsilon=epsilon,
            seed=seed,
            dispatch_threshold=dispatch_threshold,
            objective=objective,
            finisher=finisher,
        )
        try:
            run_log = self.registry.run(algorithm, g, alpha, options, round_limit)
        except Exception as e:
            kind = error_kind(e)
            logger.error(f"{algorithm.value} seed={seed} failed ({kind}): {e}")
            return RunRecord(seed=seed, error=str(e), error_kind=kind)
        verification = report(g, run_log.coloring, run_log.stats, congest_constant=self.settings.congest_constant)
        return RunRecord(seed=seed, result=run_log.to_result(), report=verification)

    def run(self, config: ExperimentConfig) -> ExperimentReport:
        """One VerificationReport per seed on a single graph"""
        g, alpha = self.load_graph(config.graph, config.alpha)
        logger.info(f"Running {config.algorithm.value} on n={g.n} alpha={alpha} seeds={config.seeds}")
        runs = [
            self.run_once(
                config.algorithm, g, alpha, seed, config.epsilon,
                config.round_limit, config.dispatch_threshold, config.objective, config.finisher,
            )
            for seed in config.seeds
        ]
        return ExperimentReport(
            algorithm=config.algorithm, n=g.n, m=g.m, alpha=alpha, epsilon=config.epsilon, runs=runs
        )

    def sweep_points(self, grid: SweepGrid) -> List[SweepPoint]:
        return [
            SweepPoint(n, alpha, epsilon, algorithm, seed)
            for n, alpha, epsilon, algorithm, seed in itertools.product(
                grid.n, grid.alpha, grid.epsilon, grid.algorithms, grid.seeds
            )
        ]

    def _sweep_row(self, grid: SweepGrid, point: SweepPoint) -> Dict[str, Any]:
        base = dict(n=point.n, alpha=point.alpha, epsilon=point.epsilon,
                    algorithm=point.algorithm.value, seed=point.seed)
        try:
            g, alpha = self.load_graph(GraphSource(family=grid.family, n=point.n, alpha=point.alpha, seed=point.seed))
        except Exception as e:
            logger.error(f"Sweep row {base} could not build its graph: {e}")
            return to_csv_row(None, error=f"{type(e).__name__}: {e}", **base)
        record = self.run_once(
            point.algorithm, g, alpha, point.seed, point.epsilon, grid.round_limit, grid.dispatch_threshold
        )
        if record.report is None:
            return to_csv_row(None, error=f"{record.error_kind}: {record.error}", **base)
        return to_csv_row(
            record.report,
            messages=record.result.messages,
            fallback_events=len(record.result.fallback_events),
            **base,
        )

    def sweep(self, grid: SweepGrid, workers: Optional[int] = None) -> List[Dict[str, Any]]:
        """Rows in grid order; rows run concurrently and failures stay in their row"""
        points = self.sweep_points(grid)
        workers = workers or self.settings.workers
        logger.info(f"Sweep: {len(points)} rows on {workers} workers")
        if not points:
            return []
        with ThreadPoolExecutor(max_workers=workers) as executor:
            return list(executor.map(lambda point: self._sweep_row(grid, point), points))


def rows_to_csv(rows: List[Dict[str, Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buffer.getvalue()
