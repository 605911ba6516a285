import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Dict, List, Optional, Sequence, Tuple

from ..models.coloring import ColoringState, PaletteBlock
from ..models.errors import CoverFreeViolation
from ..models.graph import Graph
from ..models.results import ColoringRun, RoundStats, StageRecord
from .hpartition import Orientation, compute_h_partition, orient_from_partition
from .simulator import GlobalKnowledge, NodeAction, NodeProgram, NodeRng, run, stage_seed

logger = logging.getLogger(__name__)


def is_prime(q: int) -> bool:
    if q < 2:
        return False
    i = 2
    while i * i <= q:
        if q % i == 0:
            return False
        i += 1
    return True


def next_prime_above(x: int) -> int:
    q = x + 1
    while not is_prime(q):
        q += 1
    return q


@dataclass(frozen=True)
class CoverFreeFamily:
    """k sets, one per polynomial of degree <= t over F_q, each the graph {(x, p(x))} embedded as x*q + p(x).

    Two distinct polynomials agree on at most t points, so delta other sets
    cover at most delta*t < q elements of any set.
    """
    k: int
    delta: int
    q: int
    t: int

    @property
    def ground(self) -> int:
        return self.q * self.q

    def member(self, index: int) -> Tuple[int, ...]:
        if not (0 <= index < self.k):
            raise IndexError(f"set index {index} outside 0..{self.k - 1}")
        coefficients = []
        rest = index
        for _ in range(self.t + 1):
            coefficients.append(rest % self.q)
            rest //= self.q
        elements = []
        for x in range(self.q):
            value = 0
            for c in reversed(coefficients):
                value = (value * x + c) % self.q
            elements.append(x * self.q + value)
        return tuple(elements)

    @cached_property
    def sets(self) -> List[Tuple[int, ...]]:
        return [self.member(i) for i in range(self.k)]


def build_cover_free_family(delta: int, k: int) -> CoverFreeFamily:
    """Smallest-ground polynomial family with q prime, q > 2*delta*t and q^(t+1) >= k"""
    if delta < 1 or k < 1:
        raise ValueError(f"need delta >= 1 and k >= 1, got delta={delta}, k={k}")
    best: Optional[Tuple[int, int]] = None
    t = 1
    while best is None or 2 * delta * t + 1 < best[0]:
        q = next_prime_above(2 * delta * t)
        while q ** (t + 1) < k:
            q = next_prime_above(q)
        if best is None or q < best[0]:
            best = (q, t)
        t += 1
    q, t = best
    return CoverFreeFamily(k=k, delta=delta, q=q, t=t)


def reduce_color(node: int, own: int, out_colors: Sequence[int], family: CoverFreeFamily) -> int:
    """Minimum element of the node's set that no out-neighbor's set contains"""
    covered = set()
    for c in out_colors:
        covered.update(family.member(c))
    for element in family.member(own):
        if element not in covered:
            return element
    raise CoverFreeViolation(
        node, f"set of color {own} covered by {len(out_colors)} out-neighbor sets (delta={family.delta})"
    )


class LinialProgram(NodeProgram):
    """Round r applies families[r-1]: a node knows its out-neighbors' colors of the
    previous iteration (the input coloring at round 1), picks its new color and
    sends it to its in-neighbors. Nodes halt after the last family."""

    def __init__(self, orientation: Orientation, colors: Sequence[int], families: Sequence[CoverFreeFamily]):
        self.orientation = orientation
        self.incoming = orientation.in_neighbors()
        self.colors = colors
        self.families = list(families)
        self.value_range = max([f.ground for f in self.families] + [max(colors, default=0) + 1, 2])

    def init(self, node: int, neighbors: Tuple[int, ...], knowledge: GlobalKnowledge, rng: NodeRng) -> Dict[str, Any]:
        outs = self.orientation.out[node]
        return {
            "node": node,
            "color": self.colors[node],
            "out_colors": {u: self.colors[u] for u in outs},
            "in": tuple(self.incoming[node]),
        }

    def on_round(self, state: Dict[str, Any], round_no: int, inbox) -> NodeAction:
        for sender, payload in inbox:
            if sender in state["out_colors"]:
                state["out_colors"][sender] = payload[0]
        if not self.families:
            return NodeAction(halted=True, output=state["color"])
        family = self.families[round_no - 1]
        state["color"] = reduce_color(state["node"], state["color"], list(state["out_colors"].values()), family)
        if round_no == len(self.families):
            return NodeAction(halted=True, output=state["color"])
        return NodeAction(outbox={u: (state["color"],) for u in state["in"]})


def _check_inputs(orientation: Orientation, colors: Sequence[int], family: CoverFreeFamily) -> None:
    if family.delta < orientation.d_out:
        raise ValueError(f"family delta={family.delta} below max out-degree {orientation.d_out}")
    if colors and max(colors) >= family.k:
        raise ValueError(f"family has {family.k} sets but the coloring uses color {max(colors)}")


def linial_reduce_once(
    g: Graph,
    orientation: Orientation,
    coloring: Sequence[int],
    family: CoverFreeFamily,
) -> Tuple[List[int], RoundStats]:
    """One round: proper k-coloring -> proper coloring with at most family.ground colors"""
    _check_inputs(orientation, coloring, family)
    result = run(g, LinialProgram(orientation, coloring, [family]), 0, 2)
    return list(result.outputs), result.stats


@dataclass
class LinialTrace:
    families: List[CoverFreeFamily] = field(default_factory=list)

    @property
    def iterations(self) -> int:
        return len(self.families)

    @property
    def palette_sizes(self) -> List[int]:
        return [f.ground for f in self.families]


def plan_families(delta: int, k: int) -> List[CoverFreeFamily]:
    """Families for successive reductions starting from k colors, stopping at the fixpoint"""
    families = []
    while True:
        family = build_cover_free_family(delta, k)
        if family.ground >= k:
            return families
        families.append(family)
        k = family.ground


def linial_color_loop(
    g: Graph,
    orientation: Orientation,
    initial: Optional[Sequence[int]] = None,
) -> Tuple[List[int], LinialTrace, RoundStats]:
    """Iterate the one-round reduction from the id coloring down to O(d_out^2) colors"""
    colors = list(initial) if initial is not None else list(range(g.n))
    delta = max(1, orientation.d_out)
    k = max(colors, default=0) + 1
    families = plan_families(delta, k)
    trace = LinialTrace(families=families)
    if g.n == 0:
        return [], trace, RoundStats()
    result = run(g, LinialProgram(orientation, colors, families), 0, len(families) + 2)
    logger.info(
        f"Linial loop: delta={delta} iterations={trace.iterations} palettes={trace.palette_sizes}"
    )
    return list(result.outputs), trace, result.stats


def color_hpartition_linial(g: Graph, alpha: int, epsilon: float = 1.0, seed: int = 0) -> ColoringRun:
    """The O(alpha^2) baseline: H-partition orientation followed by the Linial loop"""
    run_log = ColoringRun(algorithm="hpartition-linial-baseline", coloring=ColoringState.empty(g.n))
    hp, hp_stats = compute_h_partition(g, alpha, epsilon, stage_seed(seed, 0))
    run_log.record(
        StageRecord(stage="h-partition", palette_block=(0, 0), rounds=hp_stats.rounds,
                    residual_degree=hp.d, detail={"ell": hp.ell, "d": hp.d}),
        hp_stats,
    )
    orientation = orient_from_partition(g, hp)
    colors, trace, stats = linial_color_loop(g, orientation)
    size = trace.palette_sizes[-1] if trace.families else max(g.n, 1)
    run_log.coloring = ColoringState(colors=list(colors), blocks=[PaletteBlock("linial", 0, size)])
    run_log.record(
        StageRecord(stage="linial", palette_block=(0, size), rounds=stats.rounds,
                    residual_degree=0, colored=g.n,
                    detail={"iterations": trace.iterations, "palettes": trace.palette_sizes}),
        stats,
    )
    return run_log
