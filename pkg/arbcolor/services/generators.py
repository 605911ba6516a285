import heapq
import logging
import math
from dataclasses import dataclass
from typing import List

import numpy as np

from ..models.graph import Edge, Graph, from_edge_list
from ..models.results import GeneratorFamily

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GeneratedGraph:
    graph: Graph
    declared_alpha: int
    family: GeneratorFamily


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed) & (2**64 - 1))))


def prufer_to_edges(sequence: List[int], n: int) -> List[Edge]:
    """Decode a Prüfer sequence of length n-2 into the n-1 edges of its labelled tree"""
    degree = [1] * n
    for v in sequence:
        degree[v] += 1
    leaves = [v for v in range(n) if degree[v] == 1]
    heapq.heapify(leaves)
    edges = []
    for v in sequence:
        leaf = heapq.heappop(leaves)
        edges.append((leaf, v))
        degree[v] -= 1
        if degree[v] == 1:
            heapq.heappush(leaves, v)
    u, w = heapq.heappop(leaves), heapq.heappop(leaves)
    edges.append((u, w))
    return edges


def _random_tree_edges(n: int, rng: np.random.Generator) -> List[Edge]:
    if n == 2:
        return [(0, 1)]
    sequence = [int(x) for x in rng.integers(0, n, size=n - 2)]
    return prufer_to_edges(sequence, n)


def union_of_random_forests(n: int, alpha: int, seed: int) -> Graph:
    """Union of `alpha` independent uniform random spanning trees; repeated edges merged"""
    if n < 2 or alpha < 1:
        raise ValueError(f"need n >= 2 and alpha >= 1, got n={n}, alpha={alpha}")
    rng = _rng(seed)
    edges: List[Edge] = []
    for _ in range(alpha):
        edges.extend(_random_tree_edges(n, rng))
    g = from_edge_list(edges, n)
    logger.debug(f"forest union: n={n} alpha={alpha} m={g.m} (merged {alpha * (n - 1) - g.m})")
    return g


def random_tree(n: int, seed: int) -> Graph:
    if n == 1:
        return from_edge_list([], 1)
    return union_of_random_forests(n, 1, seed)


def disjoint_cliques(n: int, alpha: int) -> Graph:
    """floor(n / 2alpha) cliques on 2alpha consecutive ids; the remaining nodes stay isolated"""
    if alpha < 1 or n < 2 * alpha:
        raise ValueError(f"need alpha >= 1 and n >= 2*alpha, got n={n}, alpha={alpha}")
    size = 2 * alpha
    edges = [
        (base + a, base + b)
        for base in range(0, (n // size) * size, size)
        for a in range(size)
        for b in range(a + 1, size)
    ]
    return from_edge_list(edges, n)


def grid_graph(n: int) -> Graph:
    """Row-major grid of width ceil(sqrt(n)); the last row may be partial"""
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    width = math.isqrt(n - 1) + 1
    edges = []
    for v in range(n):
        if (v + 1) % width and v + 1 < n:
            edges.append((v, v + 1))
        if v + width < n:
            edges.append((v, v + width))
    return from_edge_list(edges, n)


@dataclass(frozen=True)
class GenSpec:
    family: GeneratorFamily
    n: int
    alpha: int = 1
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "family", GeneratorFamily(self.family))
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if self.alpha < 1:
            raise ValueError(f"alpha must be >= 1, got {self.alpha}")

    def build(self) -> GeneratedGraph:
        if self.family == GeneratorFamily.FOREST_UNION:
            g, alpha = union_of_random_forests(self.n, self.alpha, self.seed), self.alpha
        elif self.family == GeneratorFamily.DISJOINT_CLIQUES:
            g, alpha = disjoint_cliques(self.n, self.alpha), self.alpha
        elif self.family == GeneratorFamily.RANDOM_TREE:
            g, alpha = random_tree(self.n, self.seed), 1
        else:
            g = grid_graph(self.n)
            alpha = 2 if g.m > g.n - 1 else 1
        return GeneratedGraph(graph=g, declared_alpha=alpha, family=self.family)
