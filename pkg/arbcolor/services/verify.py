"""Checkers that look only at a graph and a coloring, never at algorithm internals."""
import logging
import math
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import networkx as nx

from ..models.coloring import ColoringState
from ..models.graph import Graph
from ..models.results import BlockUsage, CongestCheck, RoundStats, VerificationReport
from ..utils.config import get_settings
from .hpartition import Orientation

logger = logging.getLogger(__name__)

ColorsLike = Union[ColoringState, Sequence[Optional[int]]]

CSV_COLUMNS = [
    "n",
    "alpha",
    "epsilon",
    "algorithm",
    "seed",
    "proper",
    "colors",
    "rounds",
    "messages",
    "max_payload_bits",
    "congest_within",
    "uncolored",
    "residual_max_out_degree",
    "residual_longest_path",
    "fallback_events",
    "error",
]


def _colors(coloring: ColorsLike) -> List[Optional[int]]:
    return list(coloring.colors) if isinstance(coloring, ColoringState) else list(coloring)


def check_proper(g: Graph, coloring: ColorsLike) -> List[Tuple[int, int]]:
    """Every monochromatic edge (u < v); an empty list means the coloring is proper"""
    colors = _colors(coloring)
    if len(colors) != g.n:
        raise ValueError(f"coloring has {len(colors)} entries for a graph with {g.n} nodes")
    return [(u, v) for u, v in g.edges() if colors[u] is not None and colors[u] == colors[v]]


def count_colors(coloring: ColorsLike) -> Tuple[int, List[BlockUsage]]:
    """Distinct colors among colored nodes, plus how many of them each palette block supplied"""
    used = {c for c in _colors(coloring) if c is not None}
    blocks = coloring.blocks if isinstance(coloring, ColoringState) else []
    usage = [
        BlockUsage(stage=b.stage, offset=b.offset, size=b.size, used=sum(1 for c in used if c in b))
        for b in blocks
    ]
    return len(used), usage


def check_orientation(g: Graph, orientation: Orientation) -> List[str]:
    """Problems with an orientation: edges missing or doubled, arcs on non-edges, cycles"""
    problems = []
    digraph = nx.DiGraph()
    digraph.add_nodes_from(range(g.n))
    for v, outs in enumerate(orientation.out):
        for u in outs:
            if u not in g.adjacency[v]:
                problems.append(f"arc {v}->{u} is not an edge")
            digraph.add_edge(v, u)
    for u, v in g.edges():
        forward, backward = digraph.has_edge(u, v), digraph.has_edge(v, u)
        if forward == backward:
            problems.append(f"edge ({u}, {v}) oriented {'both ways' if forward else 'not at all'}")
    if not nx.is_directed_acyclic_graph(digraph):
        problems.append("orientation has a directed cycle")
    return problems


def check_cover_free(sets: Sequence[Iterable[int]], delta: int) -> List[int]:
    """Indices of sets covered by the union of some `delta` other sets.

    Exhaustive: for every set, a depth-first search over choices of at most
    `delta` other sets, pruned when the largest remaining overlap cannot
    finish the cover.
    """
    members = [frozenset(s) for s in sets]
    violations = []
    for index, target in enumerate(members):
        if not target:
            violations.append(index)
            continue
        order = sorted(target)
        bit = {x: 1 << k for k, x in enumerate(order)}
        full = (1 << len(order)) - 1
        overlaps = sorted(
            {sum(bit[x] for x in other & target) for j, other in enumerate(members) if j != index} - {0},
            key=lambda mask: -mask.bit_count(),
        )
        if _coverable(full, overlaps, delta):
            violations.append(index)
    return violations


def _coverable(missing: int, overlaps: List[int], picks: int) -> bool:
    if not missing:
        return True
    if picks == 0 or not overlaps:
        return False
    if missing.bit_count() > picks * overlaps[0].bit_count():
        return False
    # some chosen set must contain the lowest missing element
    low = missing & -missing
    for k, mask in enumerate(overlaps):
        if mask & low and _coverable(missing & ~mask, overlaps[:k] + overlaps[k + 1:], picks - 1):
            return True
    return False


def residual_longest_path(g: Graph, orientation: Orientation, uncolored: Sequence[int]) -> int:
    alive = set(uncolored)
    digraph = nx.DiGraph()
    digraph.add_nodes_from(alive)
    digraph.add_edges_from((v, u) for v in alive for u in orientation.out[v] if u in alive)
    return nx.dag_longest_path_length(digraph) if alive else 0


def congest_threshold(n: int, constant: Optional[float] = None) -> int:
    c = get_settings().congest_constant if constant is None else constant
    return math.ceil(c * math.log2(max(n, 2)))


def report(
    g: Graph,
    coloring: ColorsLike,
    stats: Optional[RoundStats] = None,
    orientation: Optional[Orientation] = None,
    congest_constant: Optional[float] = None,
) -> VerificationReport:
    """Aggregate the checkers. Residual path length needs an orientation, otherwise it is None
    and the residual out-degree falls back to the residual max degree."""
    stats = stats or RoundStats()
    colors = _colors(coloring)
    violating = check_proper(g, colors)
    used, usage = count_colors(coloring)
    uncolored = [v for v, c in enumerate(colors) if c is None]
    alive = set(uncolored)
    if orientation is not None:
        out_degree = max((sum(1 for u in orientation.out[v] if u in alive) for v in alive), default=0)
        path: Optional[int] = residual_longest_path(g, orientation, uncolored)
    else:
        out_degree = max((sum(1 for u in g.adjacency[v] if u in alive) for v in alive), default=0)
        path = None if uncolored else 0
    threshold = congest_threshold(g.n, congest_constant)
    if violating:
        logger.error(f"improper coloring: {len(violating)} monochromatic edges, first {violating[0]}")
    return VerificationReport(
        proper=not violating,
        violating_edges=violating,
        colors_used=used,
        palette_usage=usage,
        rounds=stats.rounds,
        uncolored=len(uncolored),
        residual_max_out_degree=out_degree,
        residual_longest_path=path,
        congest=CongestCheck(
            max_payload_bits=stats.max_payload_bits,
            threshold_bits=threshold,
            within=stats.max_payload_bits <= threshold,
        ),
    )


def to_csv_row(
    report: Optional[VerificationReport],
    n: int,
    alpha: int,
    epsilon: float,
    algorithm: str,
    seed: int,
    messages: int = 0,
    fallback_events: int = 0,
    error: str = "",
) -> Dict[str, Any]:
    """One sweep row in CSV_COLUMNS order; a failed run keeps its parameters and the error"""
    row: Dict[str, Any] = {column: "" for column in CSV_COLUMNS}
    row.update(n=n, alpha=alpha, epsilon=epsilon, algorithm=algorithm, seed=seed, error=error)
    if report is not None:
        row.update(
            proper=report.proper,
            colors=report.colors_used,
            rounds=report.rounds,
            messages=messages,
            max_payload_bits=report.congest.max_payload_bits,
            congest_within=report.congest.within,
            uncolored=report.uncolored,
            residual_max_out_degree=report.residual_max_out_degree,
            residual_longest_path="" if report.residual_longest_path is None else report.residual_longest_path,
            fallback_events=fallback_events,
        )
    return row
