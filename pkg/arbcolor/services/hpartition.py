import json
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from pydantic import BaseModel

from ..models.errors import InvalidAlphaError
from ..models.graph import Graph
from ..models.results import RoundStats
from .simulator import GlobalKnowledge, NodeAction, NodeProgram, NodeRng, run

logger = logging.getLogger(__name__)


@dataclass
class HPartition:
    """Layer index (1..ell) per node; every node in layer j has at most d neighbors in layers >= j"""
    layer: List[int]
    ell: int
    d: int
    epsilon: float
    joined_per_layer: List[int] = field(default_factory=list)

    def nodes_in(self, j: int) -> List[int]:
        return [v for v, layer in enumerate(self.layer) if layer == j]

    def to_json(self) -> str:
        return HPartitionModel(epsilon=self.epsilon, d=self.d, ell=self.ell, layers=self.layer).model_dump_json()


class HPartitionModel(BaseModel):
    epsilon: float
    d: int
    ell: int
    layers: List[int]


@dataclass
class Orientation:
    """Out-neighbor lists of an acyclic orientation covering every edge once"""
    out: List[Tuple[int, ...]]

    @property
    def d_out(self) -> int:
        return max((len(o) for o in self.out), default=0)

    def in_neighbors(self) -> List[List[int]]:
        incoming: List[List[int]] = [[] for _ in self.out]
        for v, outs in enumerate(self.out):
            for u in outs:
                incoming[u].append(v)
        return incoming

    def restrict(self, nodes: Sequence[int]) -> "Orientation":
        """Orientation of the induced subgraph on `nodes`, relabelled like Graph.induced_subgraph"""
        mapping = sorted(set(nodes))
        index = {v: i for i, v in enumerate(mapping)}
        return Orientation(out=[tuple(index[u] for u in self.out[v] if u in index) for v in mapping])


def layer_bound(n: int, epsilon: float) -> int:
    """ceil(log_{(2+eps)/2} n), at least 1"""
    if n <= 1:
        return 1
    base = (2.0 + epsilon) / 2.0
    return max(1, math.ceil(math.log(n) / math.log(base) - 1e-9))


def degree_threshold(alpha: float, epsilon: float) -> int:
    return math.floor((2.0 + epsilon) * alpha + 1e-9)


class PeelingProgram(NodeProgram):
    """Two rounds per peeling step: a degree exchange, then the join decision.

    Odd round 2j-1: every unlayered node sends its residual degree to its
    unlayered neighbors. Even round 2j: a node that heard from at most d
    neighbors joins layer j, tells them, and halts.
    """

    def __init__(self, d: int, max_steps: int, n: int):
        self.d = d
        self.max_steps = max_steps
        self.value_range = max(n, max_steps + 1, 2)

    def init(self, node: int, neighbors: Tuple[int, ...], knowledge: GlobalKnowledge, rng: NodeRng) -> Dict[str, Any]:
        return {"node": node, "active": set(neighbors), "heard": 0}

    def on_round(self, state: Dict[str, Any], round_no: int, inbox) -> NodeAction:
        step = (round_no + 1) // 2
        if round_no % 2 == 1:
            for sender, payload in inbox:
                # join announcements from the previous step
                state["active"].discard(sender)
            if step > self.max_steps:
                return NodeAction(halted=True)
            residual = len(state["active"])
            return NodeAction(outbox={u: (residual,) for u in state["active"]})

        state["heard"] = len(inbox)
        if state["heard"] <= self.d:
            return NodeAction(outbox={u: (step,) for u in state["active"]}, halted=True, output=step)
        return NodeAction()


def compute_h_partition(
    g: Graph,
    alpha: float,
    epsilon: float,
    seed: int = 0,
    round_limit: Optional[int] = None,
    max_layers: Optional[int] = None,
) -> Tuple[HPartition, RoundStats]:
    """Peel nodes of residual degree <= floor((2+eps)*alpha) into successive layers"""
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    d = degree_threshold(alpha, epsilon)
    max_steps = max_layers if max_layers is not None else layer_bound(g.n, epsilon)
    program = PeelingProgram(d, max_steps, g.n)
    limit = round_limit if round_limit is not None else 2 * max_steps + 2
    result = run(g, program, seed, limit, GlobalKnowledge(n=g.n, alpha=int(math.ceil(alpha)), epsilon=epsilon))

    layers = result.outputs
    missing = [v for v, layer in enumerate(layers) if layer is None]
    joined = [0] * max_steps
    for layer in layers:
        if layer is not None:
            joined[layer - 1] += 1
    if missing:
        remaining = g.n
        stalled_at = None
        for j, count in enumerate(joined, start=1):
            if count == 0 and remaining > 0:
                stalled_at = j
                break
            remaining -= count
        where = f"step {stalled_at} removed no nodes" if stalled_at else f"peeling needs more than {max_steps} layers"
        raise InvalidAlphaError(
            f"H-partition with alpha={alpha}, epsilon={epsilon} (d={d}) failed: {where}; "
            f"{len(missing)} of {g.n} nodes unlayered"
        )
    ell = max(layers, default=1)
    hp = HPartition(layer=list(layers), ell=ell, d=d, epsilon=epsilon, joined_per_layer=joined[:ell])
    logger.info(f"H-partition: n={g.n} d={d} ell={ell} rounds={result.stats.rounds}")
    return hp, result.stats


def orient_from_partition(g: Graph, hp: HPartition) -> Orientation:
    """Cross-layer edges point to the higher layer, same-layer edges to the higher id"""
    out: List[Tuple[int, ...]] = []
    for v in range(g.n):
        key = (hp.layer[v], v)
        out.append(tuple(u for u in g.adjacency[v] if (hp.layer[u], u) > key))
    return Orientation(out=out)


def partition_degree(g: Graph, layer: Sequence[int]) -> int:
    """Measured degree of a layering: max over v of |{u in adj(v) : layer(u) >= layer(v)}|"""
    return max(
        (sum(1 for u in g.adjacency[v] if layer[u] >= layer[v]) for v in range(g.n)),
        default=0,
    )


def validate_h_partition(g: Graph, hp: HPartition) -> Union[bool, List[int]]:
    """True when every node satisfies the degree bound, else the sorted violating nodes.

    A layer index outside 1..ell is a structural violation and is reported too.
    """
    violations = []
    for v in range(g.n):
        j = hp.layer[v]
        if not (1 <= j <= hp.ell):
            violations.append(v)
            continue
        if sum(1 for u in g.adjacency[v] if hp.layer[u] >= j) > hp.d:
            violations.append(v)
    return True if not violations else violations


def restrict_partition(hp: HPartition, g_sub: Graph, nodes: Sequence[int]) -> HPartition:
    """The same layering restricted to `nodes` (the subgraph's original ids), with its measured degree"""
    mapping = sorted(set(nodes))
    layer = [hp.layer[v] for v in mapping]
    return HPartition(
        layer=layer,
        ell=max(layer, default=1),
        d=partition_degree(g_sub, layer),
        epsilon=hp.epsilon,
    )


def load_h_partition(text: str) -> HPartition:
    model = HPartitionModel.model_validate(json.loads(text))
    return HPartition(layer=model.layers, ell=model.ell, d=model.d, epsilon=model.epsilon)
