import heapq
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Tuple, Union

from .coloring import ColoringState, PaletteBlock
from .errors import BruteForceLimitError, GraphFormatError, InvalidAlphaError

logger = logging.getLogger(__name__)

Edge = Tuple[int, int]


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on nodes 0..n-1 stored as sorted adjacency tuples.

    Immutable after construction, so one instance can be shared across runs.
    """
    n: int
    adjacency: Tuple[Tuple[int, ...], ...]
    m: int

    def neighbors(self, v: int) -> Tuple[int, ...]:
        return self.adjacency[v]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    @property
    def max_degree(self) -> int:
        return max((len(a) for a in self.adjacency), default=0)

    def edges(self) -> List[Edge]:
        return [(u, v) for u in range(self.n) for v in self.adjacency[u] if u < v]

    def induced_subgraph(self, nodes: Sequence[int]) -> Tuple["Graph", List[int]]:
        """Subgraph induced by `nodes`, relabelled 0..k-1 in ascending original id.

        Returns the subgraph and the list mapping new ids to original ids.
        """
        mapping = sorted(set(nodes))
        index = {v: i for i, v in enumerate(mapping)}
        adjacency = tuple(
            tuple(index[u] for u in self.adjacency[v] if u in index)
            for v in mapping
        )
        m = sum(len(a) for a in adjacency) // 2
        return Graph(n=len(mapping), adjacency=adjacency, m=m), mapping


@dataclass(frozen=True)
class ArborityEstimate:
    lower: int
    declared: int
    exact: Optional[int] = None

    def __post_init__(self):
        if self.exact is not None and not (self.lower <= self.exact <= self.declared):
            raise ValueError(f"inconsistent arboricity bounds {self.lower} <= {self.exact} <= {self.declared}")


def from_edge_list(edges: Iterable[Edge], n: int) -> Graph:
    """Build a Graph, dropping self-loops and duplicate edges; out-of-range ids are rejected"""
    if n < 0:
        raise GraphFormatError(f"node count must be non-negative, got {n}")
    neighbor_sets: List[set] = [set() for _ in range(n)]
    for u, v in edges:
        if not (0 <= u < n and 0 <= v < n):
            raise GraphFormatError(f"edge ({u}, {v}) has an id outside 0..{n - 1}")
        if u == v:
            continue
        neighbor_sets[u].add(v)
        neighbor_sets[v].add(u)
    adjacency = tuple(tuple(sorted(s)) for s in neighbor_sets)
    m = sum(len(a) for a in adjacency) // 2
    return Graph(n=n, adjacency=adjacency, m=m)


def density_lower_bound(g: Graph) -> int:
    """ceil(m / (n - 1)) for the whole graph; 0 when n < 2"""
    if g.n < 2:
        return 0
    return -(-g.m // (g.n - 1))


def exact_arboricity_bruteforce(g: Graph, limit: int = 16) -> int:
    """Max over vertex subsets S with |S| >= 2 of ceil(|E(S)| / (|S| - 1)).

    Exponential in n; refused above `limit` nodes.
    """
    if g.n > limit:
        raise BruteForceLimitError(f"brute-force arboricity refuses n={g.n} > {limit}")
    masks = [sum(1 << u for u in g.adjacency[v]) for v in range(g.n)]
    best = 0
    for subset in range(1, 1 << g.n):
        size = subset.bit_count()
        if size < 2:
            continue
        twice_edges = 0
        rest = subset
        while rest:
            low = rest & -rest
            v = low.bit_length() - 1
            twice_edges += (masks[v] & subset).bit_count()
            rest ^= low
        edges = twice_edges // 2
        best = max(best, -(-edges // (size - 1)))
    return best


def degeneracy_ordering(g: Graph) -> Tuple[List[int], List[int]]:
    """Min-degree peeling with lowest-id tie-break.

    Returns (order, later) where later[v] is the number of neighbors of v that
    come after v in the order.
    """
    degree = [len(a) for a in g.adjacency]
    removed = [False] * g.n
    heap = [(degree[v], v) for v in range(g.n)]
    heapq.heapify(heap)
    order: List[int] = []
    later = [0] * g.n
    while heap:
        d, v = heapq.heappop(heap)
        if removed[v] or d != degree[v]:
            continue
        removed[v] = True
        later[v] = d
        order.append(v)
        for u in g.adjacency[v]:
            if not removed[u]:
                degree[u] -= 1
                heapq.heappush(heap, (degree[u], u))
    return order, later


def degeneracy(g: Graph) -> int:
    _, later = degeneracy_ordering(g)
    return max(later, default=0)


def estimate_arboricity(g: Graph, declared: Optional[int] = None, limit: int = 16) -> ArborityEstimate:
    """Bounds on alpha(G). Without a declared bound the degeneracy is used (an upper bound)."""
    lower = density_lower_bound(g)
    upper = declared if declared is not None else max(degeneracy(g), lower)
    exact = exact_arboricity_bruteforce(g, limit) if g.n <= limit else None
    return ArborityEstimate(lower=lower, declared=upper, exact=exact)


def greedy_degeneracy_coloring(g: Graph, declared_alpha: int) -> ColoringState:
    """Sequential oracle: color a degeneracy order from the back with at most 2*alpha colors"""
    order, later = degeneracy_ordering(g)
    bound = 2 * declared_alpha - 1
    for v in order:
        if later[v] > bound:
            raise InvalidAlphaError(
                f"node {v} has {later[v]} later neighbors, more than 2*alpha-1={bound}; "
                f"declared alpha={declared_alpha} is below the graph's arboricity"
            )
    colors: List[Optional[int]] = [None] * g.n
    for v in reversed(order):
        taken = {colors[u] for u in g.adjacency[v] if colors[u] is not None}
        color = 0
        while color in taken:
            color += 1
        colors[v] = color
    size = max(2 * declared_alpha, 1)
    return ColoringState(colors=colors, blocks=[PaletteBlock("greedy-oracle", 0, size)])


def to_edge_list_text(g: Graph) -> str:
    lines = [f"{g.n} {g.m}"]
    lines.extend(f"{u} {v}" for u, v in g.edges())
    return "\n".join(lines) + "\n"


def parse_edge_list_text(text: str) -> Graph:
    """Parse the "n m" header plus one "u v" pair per line; '#' starts a comment"""
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise GraphFormatError(f"line {lineno}: expected two integers, got {raw!r}")
        try:
            rows.append((int(parts[0]), int(parts[1])))
        except ValueError as e:
            raise GraphFormatError(f"line {lineno}: {e}") from e
    if not rows:
        raise GraphFormatError("missing 'n m' header")
    (n, m), edges = rows[0], rows[1:]
    if len(edges) != m:
        logger.warning(f"edge-list header declares m={m} but {len(edges)} edge lines follow")
    return from_edge_list(edges, n)


def read_edge_list(path: Union[str, Path]) -> Graph:
    return parse_edge_list_text(Path(path).read_text())


def write_edge_list(g: Graph, path: Union[str, Path]) -> None:
    Path(path).write_text(to_edge_list_text(g))


def log_star(x: float) -> int:
    """Base-2 iterated logarithm: how many times log2 is applied to reach <= 1"""
    count = 0
    while x > 1:
        x = math.log2(x)
        count += 1
    return count
