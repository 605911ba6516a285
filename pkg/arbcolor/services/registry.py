import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Dict, List, Optional

from ..models.errors import NonTerminationError
from ..models.graph import Graph, greedy_degeneracy_coloring
from ..models.results import Algorithm, ColoringRun
from .high_arb import Finisher, color_high_arb
from .linial import color_hpartition_linial
from .low_arb import LowArbVariant, color_low_arb

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RunOptions:
    epsilon: float = 1.0
    seed: int = 0
    dispatch_threshold: Optional[float] = None
    objective: str = "fast"
    finisher: str = Finisher.LOW_ARB.value


class ColoringAlgorithm(ABC):
    """Abstract base class for coloring algorithms"""

    name: Algorithm

    @abstractmethod
    def color(self, g: Graph, alpha: int, options: RunOptions) -> ColoringRun:
        pass


class GreedyOracle(ColoringAlgorithm):
    name = Algorithm.GREEDY_ORACLE

    def color(self, g: Graph, alpha: int, options: RunOptions) -> ColoringRun:
        return ColoringRun(algorithm=self.name.value, coloring=greedy_degeneracy_coloring(g, alpha))


class HPartitionLinialBaseline(ColoringAlgorithm):
    name = Algorithm.BASELINE

    def color(self, g: Graph, alpha: int, options: RunOptions) -> ColoringRun:
        return color_hpartition_linial(g, alpha, options.epsilon, options.seed)


class HighArb(ColoringAlgorithm):
    name = Algorithm.HIGH_ARB

    def color(self, g: Graph, alpha: int, options: RunOptions) -> ColoringRun:
        return color_high_arb(
            g,
            alpha,
            options.epsilon,
            options.seed,
            finisher=Finisher(options.finisher),
            dispatch_threshold=options.dispatch_threshold,
        )


class LowArb(ColoringAlgorithm):
    def __init__(self, variant: LowArbVariant):
        self.variant = variant
        self.name = Algorithm.LOW_ARB_LOGALPHA if variant == LowArbVariant.LOGALPHA else Algorithm.LOW_ARB_TRADEOFF

    def color(self, g: Graph, alpha: int, options: RunOptions) -> ColoringRun:
        epsilon = options.epsilon if self.variant == LowArbVariant.LOGALPHA else min(options.epsilon, 1.0)
        return color_low_arb(g, alpha, self.variant, epsilon, options.seed)


class AutoDispatch(ColoringAlgorithm):
    """Picks an algorithm from alpha and log2(n).

    objective "fast": high-arb when alpha >= threshold * log2(n), else low-arb-logalpha.
    objective "linear": high-arb above the threshold; low-arb-tradeoff when
    log2(alpha) <= log2(log2(n)); otherwise Step 2 phases straight on G with the
    low-arb finisher on the residual.
    """

    name = Algorithm.AUTO

    def __init__(self, registry: "AlgorithmRegistry"):
        self.registry = registry

    def choose(self, g: Graph, alpha: int, options: RunOptions) -> str:
        threshold = self.registry.settings.dispatch_threshold
        if options.dispatch_threshold is not None:
            threshold = options.dispatch_threshold
        log_n = math.log2(g.n) if g.n > 1 else 0.0
        if log_n and alpha >= threshold * log_n:
            return Algorithm.HIGH_ARB.value
        if options.objective == "linear":
            if log_n <= 1 or math.log2(alpha) <= math.log2(log_n):
                return Algorithm.LOW_ARB_TRADEOFF.value
            return "high-arb-step2"
        return Algorithm.LOW_ARB_LOGALPHA.value

    def color(self, g: Graph, alpha: int, options: RunOptions) -> ColoringRun:
        choice = self.choose(g, alpha, options)
        logger.info(f"auto-dispatch: n={g.n} alpha={alpha} objective={options.objective} -> {choice}")
        if choice == "high-arb-step2":
            run_log = color_high_arb(
                g, alpha, options.epsilon, options.seed,
                finisher=Finisher.LOW_ARB, dispatch_threshold=0, skip_first_step=True,
            )
        elif choice == Algorithm.HIGH_ARB.value:
            # the threshold was already applied above
            run_log = color_high_arb(
                g, alpha, options.epsilon, options.seed,
                finisher=Finisher(options.finisher), dispatch_threshold=0,
            )
        else:
            run_log = self.registry.get_algorithm(choice).color(g, alpha, options)
        run_log.fallback_events.insert(0, f"auto-dispatch chose {choice}")
        run_log.algorithm = self.name.value
        return run_log


class AlgorithmRegistry:
    """Registry of the coloring algorithms runnable from the command line"""

    def __init__(self, settings):
        self.settings = settings
        self.algorithms: Dict[str, ColoringAlgorithm] = {}
        for algorithm in (
            GreedyOracle(),
            HPartitionLinialBaseline(),
            HighArb(),
            LowArb(LowArbVariant.LOGALPHA),
            LowArb(LowArbVariant.TRADEOFF),
            AutoDispatch(self),
        ):
            self.algorithms[algorithm.name.value] = algorithm

    def get_algorithm(self, name: str) -> ColoringAlgorithm:
        key = Algorithm(name).value
        if key not in self.algorithms:
            raise ValueError(f"Algorithm {name} not available")
        return self.algorithms[key]

    def list_algorithms(self) -> List[str]:
        return list(self.algorithms.keys())

    def run(
        self,
        name: str,
        g: Graph,
        alpha: int,
        options: RunOptions,
        round_limit: Optional[int] = None,
    ) -> ColoringRun:
        """Run one algorithm; a total round count above the limit is non-termination"""
        limit = round_limit if round_limit is not None else self.settings.round_limit
        key = Algorithm(name).value
        run_log = self.get_algorithm(key).color(g, alpha, options)
        if run_log.stats.rounds > limit:
            raise NonTerminationError(
                f"{key} used {run_log.stats.rounds} rounds, above the limit of {limit}",
                list(run_log.coloring.colors),
                run_log.stats,
                run_log.coloring.uncolored,
            )
        return run_log
