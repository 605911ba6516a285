import logging
import math
import sys
from abc import ABC, abstractmethod
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..models.errors import NonTerminationError
from ..models.graph import Graph
from ..models.results import RoundStats

logger = logging.getLogger(__name__)

# sleep_until value meaning "wake only when a message arrives"
UNTIL_MESSAGE = sys.maxsize

Payload = Tuple[int, ...]
Inbox = List[Tuple[int, Payload]]


@dataclass(frozen=True)
class GlobalKnowledge:
    """What every node knows before round 1"""
    n: int
    alpha: int = 1
    epsilon: float = 1.0
    schedule: Dict[str, Any] = field(default_factory=dict)


class NodeRng:
    """A node's private random substream; draws are counted"""

    def __init__(self, root: int, node: int):
        self._gen = np.random.Generator(np.random.PCG64(np.random.SeedSequence(root, spawn_key=(node,))))
        self.draws = 0

    def sample(self, population: int, k: int) -> List[int]:
        """k distinct values from range(population), in draw order"""
        k = min(k, population)
        self.draws += k
        return [int(x) for x in self._gen.choice(population, size=k, replace=False)]

    def integers(self, high: int) -> int:
        self.draws += 1
        return int(self._gen.integers(high))


class RngStream:
    def __init__(self, root: int):
        self.root = int(root) & (2**64 - 1)

    def for_node(self, node: int) -> NodeRng:
        return NodeRng(self.root, node)


@dataclass
class NodeAction:
    outbox: Dict[int, Payload] = field(default_factory=dict)
    halted: bool = False
    output: Any = None
    # None: step again next round; otherwise skip rounds until this one
    # (or until a message arrives)
    sleep_until: Optional[int] = None


class NodeProgram(ABC):
    """A synchronous node program.

    The program object holds the per-node inputs (layers, orientation, ...);
    `init` must only read the entry of the node it is initialising.
    """

    # Integers in payloads are drawn from range(value_range)
    value_range: int = 2

    @abstractmethod
    def init(self, node: int, neighbors: Tuple[int, ...], knowledge: GlobalKnowledge, rng: NodeRng) -> Any:
        """Return the node's local state"""
        pass

    @abstractmethod
    def on_round(self, state: Any, round_no: int, inbox: Inbox) -> NodeAction:
        """Compute one round from the messages sent to this node in earlier rounds"""
        pass

    def payload_bits(self, payload: Payload) -> int:
        per_value = max(1, math.ceil(math.log2(max(self.value_range, 2))))
        return per_value * len(payload)


@dataclass
class RunResult:
    outputs: List[Any]
    stats: RoundStats


def run(
    g: Graph,
    program: NodeProgram,
    seed: int,
    round_limit: int,
    knowledge: Optional[GlobalKnowledge] = None,
) -> RunResult:
    """Execute `program` on every node of `g` in lock-step rounds.

    Messages sent in round r are delivered in round r+1. Nodes are stepped in
    id order, and every outbox of a round is computed before any of them is
    delivered.
    """
    if round_limit < 1:
        raise ValueError(f"round_limit must be >= 1, got {round_limit}")
    knowledge = knowledge or GlobalKnowledge(n=g.n)
    rng = RngStream(seed)
    neighbor_sets = [frozenset(a) for a in g.adjacency]

    states = [program.init(v, g.adjacency[v], knowledge, rng.for_node(v)) for v in range(g.n)]
    outputs: List[Any] = [None] * g.n
    halted = [False] * g.n
    wake = [1] * g.n
    inboxes: Dict[int, Inbox] = defaultdict(list)
    stats = RoundStats()
    alive = g.n
    round_no = 0

    while alive:
        round_no += 1
        if round_no > round_limit:
            unhalted = [v for v in range(g.n) if not halted[v]]
            raise NonTerminationError(
                f"{len(unhalted)} nodes still running after {round_limit} rounds",
                outputs, stats, unhalted,
            )
        due = [v for v in range(g.n) if not halted[v] and (wake[v] <= round_no or v in inboxes)]
        if not due:
            pending = min((wake[v] for v in range(g.n) if not halted[v]), default=UNTIL_MESSAGE)
            unhalted = [v for v in range(g.n) if not halted[v]]
            if pending == UNTIL_MESSAGE:
                raise NonTerminationError(
                    f"deadlock in round {round_no}: {len(unhalted)} nodes wait for messages that never come",
                    outputs, stats, unhalted,
                )
            if pending > round_limit:
                raise NonTerminationError(
                    f"{len(unhalted)} nodes sleep past the limit of {round_limit} rounds",
                    outputs, stats, unhalted,
                )
            # Nothing happens until the earliest wake-up; time still passes
            stats.active_histogram.extend([0] * (pending - round_no))
            round_no = pending
            due = [v for v in range(g.n) if not halted[v] and wake[v] <= round_no]

        outgoing: Dict[int, Inbox] = defaultdict(list)
        for v in due:
            action = program.on_round(states[v], round_no, inboxes.pop(v, []))
            for target, payload in sorted(action.outbox.items()):
                if target not in neighbor_sets[v]:
                    raise ValueError(f"node {v} sent to non-neighbor {target} in round {round_no}")
                outgoing[target].append((v, payload))
                stats.messages += 1
                stats.max_payload_bits = max(stats.max_payload_bits, program.payload_bits(payload))
            if action.output is not None:
                outputs[v] = action.output
            if action.halted:
                halted[v] = True
                alive -= 1
            else:
                wake[v] = round_no + 1 if action.sleep_until is None else max(action.sleep_until, round_no + 1)

        stats.active_histogram.append(len(due))
        stats.rounds = round_no
        for target, messages in outgoing.items():
            if not halted[target]:
                inboxes[target].extend(messages)

    logger.debug(f"run finished: rounds={stats.rounds} messages={stats.messages}")
    return RunResult(outputs=outputs, stats=stats)


def stage_seed(seed: int, index: int) -> int:
    """Deterministic child seed for the index-th stage of a pipeline run"""
    child = np.random.SeedSequence(seed).spawn(index + 1)[index]
    return int(child.generate_state(1, dtype=np.uint64)[0])
