"""Layer-by-layer random color trials shared by the high- and low-arboricity algorithms.

All of them follow the same pattern: layers are processed from the last to the
first; in every iteration an uncolored node of the active layer proposes one
or more random colors from the current palette and keeps a proposal that no
out-neighbor proposed in the same round and no neighbor holds permanently.
A node that keeps a color announces it to all of its neighbors.
A global calendar of slots (one slot = one iteration = one round) tells each
node when its layer is active.
"""
import bisect
import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

from ..models.coloring import PartialColoring
from ..models.graph import Graph
from ..models.results import RoundStats
from .hpartition import HPartition, Orientation
from .simulator import GlobalKnowledge, NodeAction, NodeProgram, NodeRng, run

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Slot:
    layer: int
    palette_offset: int
    palette_size: int
    proposals: int


def layer_major_slots(ell: int, iterations: int, offset: int, size: int, proposals: int) -> List[Slot]:
    """Layers ell..1, each running `iterations` consecutive rounds on one palette"""
    return [
        Slot(layer, offset, size, proposals)
        for layer in range(ell, 0, -1)
        for _ in range(iterations)
    ]


def sweep_major_slots(ell: int, sweeps: int, offset: int, size: int, proposals: int) -> List[Slot]:
    """`sweeps` passes over layers ell..1, one round per layer, a fresh palette per pass"""
    return [
        Slot(layer, offset + k * size, size, proposals)
        for k in range(sweeps)
        for layer in range(ell, 0, -1)
    ]


class LayeredColoringProgram(NodeProgram):
    """Payload: (committed color + 1, or 0) followed by this round's proposals"""

    def __init__(self, hp: HPartition, orientation: Orientation, slots: Sequence[Slot]):
        self.hp = hp
        self.orientation = orientation
        self.incoming = orientation.in_neighbors()
        self.slots = list(slots)
        self.slots_by_layer: Dict[int, List[int]] = {}
        for index, slot in enumerate(self.slots):
            self.slots_by_layer.setdefault(slot.layer, []).append(index)
        self.value_range = max((s.palette_offset + s.palette_size for s in self.slots), default=1) + 1

    def init(self, node: int, neighbors: Tuple[int, ...], knowledge: GlobalKnowledge, rng: NodeRng) -> Dict[str, Any]:
        layer = self.hp.layer[node]
        incoming = self.incoming[node]
        return {
            "layer": layer,
            "out": frozenset(self.orientation.out[node]),
            "neighbors": tuple(neighbors),
            "in_same_layer": tuple(u for u in incoming if self.hp.layer[u] == layer),
            "my_slots": self.slots_by_layer.get(layer, []),
            "blocked": set(),
            "proposed": None,
            "proposed_round": 0,
            "rng": rng,
        }

    def on_round(self, state: Dict[str, Any], round_no: int, inbox) -> NodeAction:
        decide = state["proposed"] is not None and state["proposed_round"] == round_no - 1
        rivals = set()
        for sender, payload in inbox:
            if payload[0]:
                state["blocked"].add(payload[0] - 1)
            # proposals only compete with out-neighbors
            if decide and sender in state["out"]:
                rivals.update(payload[1:])

        if decide:
            free = [x for x in state["proposed"] if x not in rivals and x not in state["blocked"]]
            state["proposed"] = None
            if free:
                color = min(free)
                return NodeAction(
                    outbox={u: (color + 1,) for u in state["neighbors"]},
                    halted=True,
                    output=color,
                )

        # round r proposes for slot r-1
        slot_index = round_no - 1
        my_slots = state["my_slots"]
        k = bisect.bisect_left(my_slots, slot_index)
        if k == len(my_slots):
            return NodeAction(halted=True)
        if my_slots[k] != slot_index:
            return NodeAction(sleep_until=my_slots[k] + 1)

        slot = self.slots[slot_index]
        picks = state["rng"].sample(slot.palette_size, slot.proposals)
        proposed = tuple(slot.palette_offset + x for x in picks)
        state["proposed"] = proposed
        state["proposed_round"] = round_no
        payload = (0,) + proposed
        return NodeAction(outbox={u: payload for u in state["in_same_layer"]})


def run_layered_coloring(
    g: Graph,
    hp: HPartition,
    orientation: Orientation,
    slots: Sequence[Slot],
    seed: int,
    round_limit: Optional[int] = None,
    knowledge: Optional[GlobalKnowledge] = None,
) -> Tuple[PartialColoring, RoundStats]:
    program = LayeredColoringProgram(hp, orientation, slots)
    limit = round_limit if round_limit is not None else len(slots) + 2
    result = run(g, program, seed, limit, knowledge)
    if slots:
        offset = min(s.palette_offset for s in slots)
        size = max(s.palette_offset + s.palette_size for s in slots) - offset
    else:
        offset, size = 0, 0
    partial = PartialColoring(colors=list(result.outputs), palette_offset=offset, palette_size=size)
    logger.debug(f"layered coloring: {partial.colored_count}/{g.n} colored in {result.stats.rounds} rounds")
    return partial, result.stats
