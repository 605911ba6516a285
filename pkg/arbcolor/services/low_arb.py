import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple

from ..models.coloring import ColoringState, PartialColoring
from ..models.errors import OrientationCycleError, PaletteExhaustedError, StageError
from ..models.graph import Graph
from ..models.results import ColoringRun, RoundStats, StageRecord
from .hpartition import HPartition, Orientation, compute_h_partition, orient_from_partition
from .layered import layer_major_slots, run_layered_coloring
from .simulator import UNTIL_MESSAGE, GlobalKnowledge, NodeAction, NodeProgram, NodeRng, run, stage_seed

logger = logging.getLogger(__name__)


class LowArbVariant(str, Enum):
    LOGALPHA = "logalpha"
    TRADEOFF = "tradeoff"


def ceil_log2(x: int) -> int:
    return max(0, math.ceil(math.log2(x))) if x > 1 else 0


@dataclass(frozen=True)
class LowArbConfig:
    variant: LowArbVariant
    alpha: int
    epsilon: float
    d: int
    iterations: int
    palette_size: int
    proposals: int

    @property
    def partition_epsilon(self) -> float:
        """epsilon handed to the H-partition so that its degree is d"""
        return 1.0 if self.variant == LowArbVariant.LOGALPHA else self.epsilon / 2

    @property
    def degenerate(self) -> bool:
        return self.variant == LowArbVariant.LOGALPHA and self.d <= 4

    @classmethod
    def for_variant(cls, variant: LowArbVariant, alpha: int, epsilon: float = 1.0) -> "LowArbConfig":
        variant = LowArbVariant(variant)
        if variant == LowArbVariant.LOGALPHA:
            d = 3 * alpha
            log_d = ceil_log2(d)
            if d <= 4:
                return cls(variant, alpha, epsilon, d, 4, max(d * log_d, 2 * d, 2), 1)
            # floor keeps d * proposals <= palette / 2
            return cls(variant, alpha, epsilon, d, 4, d * log_d, max(1, log_d // 2))
        if not 0 < epsilon <= 1:
            raise ValueError(f"tradeoff variant needs 0 < epsilon <= 1, got {epsilon}")
        d = math.floor((2 + epsilon / 2) * alpha + 1e-9)
        iterations = math.ceil(2 * (2 + epsilon) / epsilon) * max(1, ceil_log2(d))
        palette = math.ceil((2 + epsilon) * alpha - 1e-9)
        return cls(variant, alpha, epsilon, d, iterations, max(palette, 2), 1)

    def blocked_worst_case(self) -> int:
        """Colors the out-neighbors can block in one iteration"""
        return self.d * self.proposals

    def free_color_floor(self) -> int:
        return self.palette_size - self.blocked_worst_case()


def low_arb_partial(
    g: Graph,
    alpha: int,
    config: LowArbConfig,
    seed: int,
    palette_offset: int = 0,
    hp: Optional[HPartition] = None,
) -> Tuple[PartialColoring, HPartition, Orientation, RoundStats]:
    """Random partial coloring, layers ell..1, `config.iterations` trials per layer"""
    stats = RoundStats()
    if hp is None:
        hp, stats = compute_h_partition(g, alpha, config.partition_epsilon, stage_seed(seed, 0))
    orientation = orient_from_partition(g, hp)
    slots = layer_major_slots(hp.ell, config.iterations, palette_offset, config.palette_size, config.proposals)
    knowledge = GlobalKnowledge(n=g.n, alpha=alpha, epsilon=config.epsilon,
                                schedule={"ell": hp.ell, "iterations": config.iterations})
    partial, color_stats = run_layered_coloring(g, hp, orientation, slots, stage_seed(seed, 1), knowledge=knowledge)
    return partial, hp, orientation, stats.then(color_stats)


def longest_residual_path(orientation: Orientation, uncolored: Sequence[int]) -> int:
    """Longest directed path (edge count) in the orientation restricted to `uncolored`"""
    alive = set(uncolored)
    indegree = {v: 0 for v in alive}
    for v in alive:
        for u in orientation.out[v]:
            if u in alive:
                indegree[u] += 1
    frontier = sorted(v for v, k in indegree.items() if k == 0)
    length = {v: 0 for v in alive}
    visited = 0
    while frontier:
        v = frontier.pop()
        visited += 1
        for u in orientation.out[v]:
            if u not in alive:
                continue
            length[u] = max(length[u], length[v] + 1)
            indegree[u] -= 1
            if indegree[u] == 0:
                frontier.append(u)
    if visited != len(alive):
        raise OrientationCycleError(f"residual orientation has a cycle through {len(alive) - visited} nodes")
    return max(length.values(), default=0)


class WaitForOutNeighbors(NodeProgram):
    """Each node waits until all its out-neighbors are colored, then takes the
    smallest color of the block none of them holds and tells its in-neighbors"""

    def __init__(self, orientation: Orientation, palette_offset: int, palette_size: int):
        self.orientation = orientation
        self.incoming = orientation.in_neighbors()
        self.palette_offset = palette_offset
        self.palette_size = palette_size
        self.value_range = palette_offset + palette_size

    def init(self, node: int, neighbors: Tuple[int, ...], knowledge: GlobalKnowledge, rng: NodeRng) -> Dict[str, Any]:
        return {
            "node": node,
            "waiting": set(self.orientation.out[node]),
            "taken": set(),
            "in": tuple(self.incoming[node]),
        }

    def on_round(self, state: Dict[str, Any], round_no: int, inbox) -> NodeAction:
        for sender, payload in inbox:
            if sender in state["waiting"]:
                state["waiting"].discard(sender)
                state["taken"].add(payload[0])
        if state["waiting"]:
            return NodeAction(sleep_until=UNTIL_MESSAGE)
        for color in range(self.palette_offset, self.palette_offset + self.palette_size):
            if color not in state["taken"]:
                return NodeAction(outbox={u: (color,) for u in state["in"]}, halted=True, output=color)
        raise PaletteExhaustedError(
            state["node"], f"all {self.palette_size} colors blocked; out-degree exceeds the block size minus one"
        )


def deterministic_finish(
    g: Graph,
    orientation: Orientation,
    d: int,
    palette_offset: int,
    round_limit: Optional[int] = None,
) -> Tuple[PartialColoring, RoundStats]:
    """Color every node of the residual graph `g` from a fresh block of d+1 colors"""
    if orientation.d_out > d:
        raise PaletteExhaustedError(
            max(range(g.n), key=lambda v: len(orientation.out[v])),
            f"out-degree {orientation.d_out} exceeds d={d}",
        )
    limit = round_limit if round_limit is not None else g.n + 1
    result = run(g, WaitForOutNeighbors(orientation, palette_offset, d + 1), 0, max(limit, 1))
    return PartialColoring(colors=list(result.outputs), palette_offset=palette_offset, palette_size=d + 1), result.stats


def residual_out_degree(orientation: Orientation, uncolored: Sequence[int]) -> int:
    alive = set(uncolored)
    return max((sum(1 for u in orientation.out[v] if u in alive) for v in alive), default=0)


def color_low_arb(
    g: Graph,
    alpha: int,
    variant: LowArbVariant = LowArbVariant.LOGALPHA,
    epsilon: float = 1.0,
    seed: int = 0,
    palette_offset: int = 0,
    label: str = "",
) -> ColoringRun:
    """Random partial coloring followed by the wait-for-out-neighbors finisher"""
    if alpha < 1:
        raise ValueError(f"alpha must be >= 1, got {alpha}")
    config = LowArbConfig.for_variant(variant, alpha, epsilon)
    prefix = f"{label}low-arb-{config.variant.value}"
    run_log = ColoringRun(algorithm=f"low-arb-{config.variant.value}", coloring=ColoringState.empty(g.n))
    all_nodes = list(range(g.n))

    try:
        partial, hp, orientation, stats = low_arb_partial(g, alpha, config, stage_seed(seed, 0), palette_offset)
    except Exception as e:
        raise StageError(f"{prefix}/partial", e) from e
    run_log.coloring.absorb(partial, all_nodes, f"{prefix}/partial")
    residual = partial.uncolored
    path = longest_residual_path(orientation, residual)
    run_log.record(
        StageRecord(
            stage=f"{prefix}/partial",
            palette_block=(partial.palette_offset, partial.palette_size),
            rounds=stats.rounds,
            residual_degree=residual_out_degree(orientation, residual),
            colored=partial.colored_count,
            detail={"d": hp.d, "ell": hp.ell, "iterations": config.iterations,
                    "proposals": config.proposals, "residual_longest_path": path},
        ),
        stats,
    )
    logger.info(f"{prefix}: {partial.colored_count}/{g.n} colored, residual path {path}")

    finish_offset = palette_offset + partial.palette_size
    if residual:
        sub, mapping = g.induced_subgraph(residual)
        try:
            finished, finish_stats = deterministic_finish(sub, orientation.restrict(residual), hp.d, finish_offset)
        except Exception as e:
            raise StageError(f"{prefix}/finish", e) from e
        run_log.coloring.absorb(finished, mapping, f"{prefix}/finish")
        run_log.record(
            StageRecord(
                stage=f"{prefix}/finish",
                palette_block=(finish_offset, hp.d + 1),
                rounds=finish_stats.rounds,
                residual_degree=0,
                colored=finished.colored_count,
            ),
            finish_stats,
        )
    return run_log
