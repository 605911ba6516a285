from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Tuple

from pydantic import BaseModel, Field

from .coloring import ColoringState


class RoundStats(BaseModel):
    rounds: int = 0
    messages: int = 0
    max_payload_bits: int = 0
    active_histogram: List[int] = Field(default_factory=list, exclude=True)

    def then(self, other: "RoundStats") -> "RoundStats":
        """Stats of running `self` followed by `other`"""
        return RoundStats(
            rounds=self.rounds + other.rounds,
            messages=self.messages + other.messages,
            max_payload_bits=max(self.max_payload_bits, other.max_payload_bits),
            active_histogram=self.active_histogram + other.active_histogram,
        )


class StageRecord(BaseModel):
    stage: str
    palette_block: Tuple[int, int]
    rounds: int
    residual_degree: int
    colored: int = 0
    detail: dict = Field(default_factory=dict)


class PipelineResult(BaseModel):
    algorithm: str
    colors_used: int
    rounds: int
    messages: int
    max_payload_bits: int
    stage_breakdown: List[StageRecord]
    fallback_events: List[str]


@dataclass
class ColoringRun:
    """Everything a coloring algorithm produces: the coloring, stats and a stage log"""
    algorithm: str
    coloring: ColoringState
    stats: RoundStats = field(default_factory=RoundStats)
    stages: List[StageRecord] = field(default_factory=list)
    fallback_events: List[str] = field(default_factory=list)

    def record(self, record: StageRecord, stats: RoundStats) -> None:
        self.stages.append(record)
        self.stats = self.stats.then(stats)

    def to_result(self) -> PipelineResult:
        return PipelineResult(
            algorithm=self.algorithm,
            colors_used=len({c for c in self.coloring.colors if c is not None}),
            rounds=self.stats.rounds,
            messages=self.stats.messages,
            max_payload_bits=self.stats.max_payload_bits,
            stage_breakdown=self.stages,
            fallback_events=self.fallback_events,
        )


class BlockUsage(BaseModel):
    stage: str
    offset: int
    size: int
    used: int


class CongestCheck(BaseModel):
    max_payload_bits: int
    threshold_bits: int
    within: bool


class VerificationReport(BaseModel):
    proper: bool
    violating_edges: List[Tuple[int, int]]
    colors_used: int
    palette_usage: List[BlockUsage]
    rounds: int
    uncolored: int
    residual_max_out_degree: int
    residual_longest_path: Optional[int]
    congest: CongestCheck


class Algorithm(str, Enum):
    GREEDY_ORACLE = "greedy-oracle"
    BASELINE = "hpartition-linial-baseline"
    HIGH_ARB = "high-arb"
    LOW_ARB_LOGALPHA = "low-arb-logalpha"
    LOW_ARB_TRADEOFF = "low-arb-tradeoff"
    AUTO = "auto-dispatch"


class GeneratorFamily(str, Enum):
    FOREST_UNION = "forest-union"
    DISJOINT_CLIQUES = "disjoint-cliques"
    RANDOM_TREE = "random-tree"
    GRID = "grid"


class GraphSource(BaseModel):
    path: Optional[str] = None
    family: GeneratorFamily = GeneratorFamily.FOREST_UNION
    n: int = 1024
    alpha: int = 4
    seed: int = 0


class ExperimentConfig(BaseModel):
    graph: GraphSource = Field(default_factory=GraphSource)
    algorithm: Algorithm = Algorithm.AUTO
    alpha: Optional[int] = None
    epsilon: float = 1.0
    seeds: List[int] = Field(default_factory=lambda: [0])
    round_limit: Optional[int] = None
    output: Optional[str] = None
    dispatch_threshold: Optional[float] = None
    objective: str = "fast"
    finisher: str = "low-arb-finisher"


class SweepGrid(BaseModel):
    family: GeneratorFamily = GeneratorFamily.FOREST_UNION
    n: List[int] = Field(default_factory=list)
    alpha: List[int] = Field(default_factory=list)
    epsilon: List[float] = Field(default_factory=lambda: [1.0])
    algorithms: List[Algorithm] = Field(default_factory=lambda: [Algorithm.LOW_ARB_LOGALPHA])
    seeds: List[int] = Field(default_factory=lambda: [0])
    round_limit: Optional[int] = None
    dispatch_threshold: Optional[float] = None


class RunRecord(BaseModel):
    seed: int
    result: Optional[PipelineResult] = None
    report: Optional[VerificationReport] = None
    error: Optional[str] = None
    error_kind: Optional[str] = None


class ExperimentReport(BaseModel):
    algorithm: Algorithm
    n: int
    m: int
    alpha: int
    epsilon: float
    runs: List[RunRecord]

    @property
    def any_improper(self) -> bool:
        return any(r.report is not None and not r.report.proper for r in self.runs)

    @property
    def any_non_terminating(self) -> bool:
        return any(r.error_kind == "non-termination" for r in self.runs)

    @property
    def any_failed(self) -> bool:
        """A seed stopped with an error other than non-termination"""
        return any(r.error is not None and r.error_kind != "non-termination" for r in self.runs)
