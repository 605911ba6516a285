"""Coloring for high-arboricity graphs: a random first pass, tetration-scheduled phases, a finisher.

Step 1 colors most nodes from a palette barely above 2*alpha. Step 2 runs
phases i = 0, 1, ... on the residual graph; phase i works on an H-partition of
degree d_i = ceil(d / 2^^i) and gives every node f_i proposals from two fresh
palettes of Q_i colors. Between phases the H-partition is recomputed for the
smaller degree. Whatever survives the last phase is handed to a finisher.
"""
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Tuple

from ..models.coloring import ColoringState, PartialColoring
from ..models.errors import InvalidAlphaError, StageError
from ..models.graph import Graph, degeneracy, log_star
from ..models.results import ColoringRun, RoundStats, StageRecord
from ..utils.config import get_settings
from .hpartition import (
    HPartition,
    Orientation,
    compute_h_partition,
    orient_from_partition,
    partition_degree,
    restrict_partition,
)
from .layered import layer_major_slots, run_layered_coloring, sweep_major_slots
from .linial import linial_color_loop
from .low_arb import LowArbVariant, color_low_arb, residual_out_degree
from .simulator import GlobalKnowledge, stage_seed

logger = logging.getLogger(__name__)

TETRATION_CAP = 2**63


class Finisher(str, Enum):
    LOW_ARB = "low-arb-finisher"
    LINIAL = "linial-finisher"


def tetration(i: int, base: float = 2.0) -> float:
    """base^^i with base^^0 = 1, saturating at 2^63"""
    value = 1.0
    for _ in range(i):
        try:
            value = base**value
        except OverflowError:
            return float(TETRATION_CAP)
        if value >= TETRATION_CAP:
            return float(TETRATION_CAP)
    return value


def tet(i: int) -> int:
    return int(tetration(i))


@dataclass(frozen=True)
class PhaseSchedule:
    i: int
    d_i: int
    Q_i: int
    f_i: int

    @property
    def palette_cost(self) -> int:
        return 2 * self.Q_i


def phase_schedule(d: int, i: int) -> Tuple[int, int, int]:
    """(d_i, Q_i, f_i) = (ceil(d / 2^^i), floor(12d / 2^i), Q_i // (2 d_i)).

    f_i equals 6 * 2^^i / 2^i whenever the divisions are exact, and the floors
    keep f_i * d_i <= Q_i / 2 and the sum of 2*Q_i below 48d.
    """
    if i < 0:
        raise ValueError(f"phase index must be >= 0, got {i}")
    q_i = 12 * d // 2**i
    t = tet(i)
    if t >= TETRATION_CAP:
        return 0, q_i, 0
    d_i = -(-d // t)
    f_i = q_i // (2 * d_i) if d_i else 0
    return d_i, q_i, f_i


def phase_epsilon(i: int, cap: float) -> float:
    """Peeling parameter for the partition entering phase i+1: 16 * 1.98^^(i+2) / 2^^(i+1)"""
    return min(16.0 * tetration(i + 2, 1.98) / tetration(i + 1), cap)


def fine_degree_threshold(d: int, i: int) -> float:
    """d / (1.98^^(i+2) * 20), the tighter survivor degree of phase i; recorded only"""
    return d / (tetration(i + 2, 1.98) * 20.0)


def first_step_iterations(epsilon: float) -> int:
    eps = epsilon / 3
    return math.ceil((1 + eps) / eps - 1e-9) * math.ceil(math.log2(300 / eps) - 1e-9)


def first_step_palette(alpha: int, epsilon: float) -> int:
    return math.ceil((2 + 2 * epsilon / 3) * alpha - 1e-9)


def first_partial_coloring(
    g: Graph,
    hp: HPartition,
    orientation: Orientation,
    epsilon: float,
    seed: int,
    alpha: int,
    palette_offset: int = 0,
) -> Tuple[PartialColoring, RoundStats]:
    """One random color per trial from ceil((2 + 2*epsilon/3) * alpha) colors, layers ell..1"""
    iterations = first_step_iterations(epsilon)
    slots = layer_major_slots(hp.ell, iterations, palette_offset, first_step_palette(alpha, epsilon), 1)
    knowledge = GlobalKnowledge(n=g.n, alpha=alpha, epsilon=epsilon,
                                schedule={"ell": hp.ell, "iterations": iterations})
    return run_layered_coloring(g, hp, orientation, slots, seed, knowledge=knowledge)


def second_partial_coloring_phase(
    g: Graph,
    hp: HPartition,
    entry: PhaseSchedule,
    seed: int,
    palette_offset: int = 0,
) -> Tuple[PartialColoring, Orientation, RoundStats]:
    """Two passes over layers ell..1, each with a fresh palette of Q_i colors and f_i proposals"""
    orientation = orient_from_partition(g, hp)
    proposals = max(1, min(entry.f_i, entry.Q_i))
    slots = sweep_major_slots(hp.ell, 2, palette_offset, entry.Q_i, proposals)
    knowledge = GlobalKnowledge(n=g.n, schedule={"phase": entry.i, "Q": entry.Q_i, "f": entry.f_i})
    partial, stats = run_layered_coloring(g, hp, orientation, slots, seed, knowledge=knowledge)
    return partial, orientation, stats


def recompute_h_partition(
    g: Graph,
    orientation: Orientation,
    d: int,
    i: int,
    seed: int = 0,
) -> Tuple[HPartition, RoundStats, float]:
    """Re-peel the survivors of phase i into a partition of degree <= d_{i+1}.

    `orientation` is the phase-i orientation restricted to the survivors; its
    out-degree must already be within d_{i+1}. Raises InvalidAlphaError when it
    is not or when peeling at that degree stalls.
    """
    target, _, _ = phase_schedule(d, i + 1)
    measured = orientation.d_out
    if measured > target:
        raise InvalidAlphaError(f"residual out-degree {measured} exceeds d_{i + 1}={target}")
    epsilon = phase_epsilon(i, cap=float(max(g.n, 2)))
    # (2 + epsilon) * alpha == target, so the peeling threshold is exactly d_{i+1}
    hp, stats = compute_h_partition(g, max(target, 1) / (2 + epsilon), epsilon, seed)
    return hp, stats, epsilon


def largest_consistent_phase(d: int, degree: int, last: int) -> Optional[int]:
    """Largest phase i <= last whose degree bound d_i still admits `degree`"""
    best = None
    for i in range(last + 1):
        d_i, _, f_i = phase_schedule(d, i)
        if d_i >= degree and f_i >= 1:
            best = i
    return best


def color_high_arb(
    g: Graph,
    alpha: int,
    epsilon: float = 1.0,
    seed: int = 0,
    finisher: Finisher = Finisher.LOW_ARB,
    dispatch_threshold: Optional[float] = None,
    degree_guard: Optional[float] = None,
    skip_first_step: bool = False,
) -> ColoringRun:
    """Step 1, then Step 2 phases, then the chosen finisher on the residual graph.

    When alpha < dispatch_threshold * log2(n) the low-arboricity algorithm runs
    instead. With skip_first_step the phases start on an epsilon=1 H-partition
    of the whole graph.
    """
    if alpha < 1:
        raise ValueError(f"alpha must be >= 1, got {alpha}")
    settings = get_settings()
    threshold = settings.dispatch_threshold if dispatch_threshold is None else dispatch_threshold
    guard_factor = settings.chernoff_guard if degree_guard is None else degree_guard
    finisher = Finisher(finisher)
    n = g.n
    log_n = math.log2(n) if n > 1 else 0.0
    if alpha < threshold * log_n:
        logger.info(f"alpha={alpha} below {threshold}*log2(n)={threshold * log_n:.1f}; running low-arb")
        low = color_low_arb(g, alpha, LowArbVariant.LOGALPHA, epsilon, seed)
        low.algorithm = "high-arb"
        low.fallback_events.append("dispatched-to-low-arb")
        return low

    run_log = ColoringRun(algorithm="high-arb", coloring=ColoringState.empty(n))
    stage = 0
    offset = 0

    if not skip_first_step:
        try:
            hp1, hp_stats = compute_h_partition(g, alpha, epsilon / 3, stage_seed(seed, stage))
            orientation = orient_from_partition(g, hp1)
            partial, stats = first_partial_coloring(g, hp1, orientation, epsilon, stage_seed(seed, stage + 1), alpha)
        except Exception as e:
            raise StageError("step1", e) from e
        stage += 2
        run_log.coloring.absorb(partial, list(range(n)), "step1")
        residual = partial.uncolored
        run_log.record(
            StageRecord(
                stage="step1",
                palette_block=(partial.palette_offset, partial.palette_size),
                rounds=hp_stats.rounds + stats.rounds,
                residual_degree=residual_out_degree(orientation, residual),
                colored=partial.colored_count,
                detail={"d": hp1.d, "ell": hp1.ell, "iterations": first_step_iterations(epsilon)},
            ),
            hp_stats.then(stats),
        )
        offset += partial.palette_size
        sub, mapping = g.induced_subgraph(residual)
        hp = restrict_partition(hp1, sub, residual)
        promise = max(1, math.ceil(epsilon * alpha / 144))
        base = max(hp.d, promise)
        if hp.d > promise:
            run_log.fallback_events.append(
                f"step1: residual partition degree {hp.d} above the (epsilon/144)*alpha={promise} promise"
            )
    else:
        sub, mapping = g, list(range(n))
        try:
            hp, hp_stats = compute_h_partition(g, alpha, 1.0, stage_seed(seed, stage))
        except Exception as e:
            raise StageError("step2/partition", e) from e
        stage += 1
        run_log.record(
            StageRecord(stage="step2/partition", palette_block=(0, 0), rounds=hp_stats.rounds,
                        residual_degree=hp.d, detail={"d": hp.d, "ell": hp.ell}),
            hp_stats,
        )
        base = hp.d

    guard = guard_factor * math.log(n) if n > 1 else 0.0
    last_phase = log_star(n) + 2
    budget = 2 * (last_phase + 1)
    i = 0
    while sub.n and budget:
        d_i, q_i, f_i = phase_schedule(base, i)
        if i > last_phase or f_i < 1 or d_i < guard:
            break
        budget -= 1
        entry = PhaseSchedule(i=i, d_i=d_i, Q_i=q_i, f_i=f_i)
        label = f"step2/phase{i}"
        try:
            partial, orientation, stats = second_partial_coloring_phase(
                sub, hp, entry, stage_seed(seed, stage), offset
            )
        except Exception as e:
            raise StageError(label, e) from e
        stage += 1
        run_log.coloring.absorb(partial, mapping, label)
        survivors = partial.uncolored
        run_log.record(
            StageRecord(
                stage=label,
                palette_block=(offset, entry.palette_cost),
                rounds=stats.rounds,
                residual_degree=residual_out_degree(orientation, survivors),
                colored=partial.colored_count,
                detail={"d_i": d_i, "Q_i": q_i, "f_i": f_i, "ell": hp.ell,
                        "fine_threshold": fine_degree_threshold(base, i)},
            ),
            stats,
        )
        offset += entry.palette_cost

        next_sub, local = sub.induced_subgraph(survivors)
        next_mapping = [mapping[v] for v in local]
        if not next_sub.n:
            sub, mapping = next_sub, next_mapping
            break
        next_orientation = orientation.restrict(survivors)
        try:
            hp, hp_stats, peel_eps = recompute_h_partition(next_sub, next_orientation, base, i, stage_seed(seed, stage))
            i += 1
        except InvalidAlphaError as e:
            # the degree drop missed: fresh epsilon=1 partition, then re-enter the schedule
            hp, hp_stats = compute_h_partition(next_sub, max(1, next_orientation.d_out), 1.0, stage_seed(seed, stage))
            hp.d = partition_degree(next_sub, hp.layer)
            peel_eps = 1.0
            consistent = largest_consistent_phase(base, hp.d, last_phase)
            event = f"{label}: {e}; recomputed an epsilon=1 partition of degree {hp.d}"
            if consistent is None:
                event += ", handing the residual to the finisher"
                budget = 0
            else:
                event += f", re-entering at phase {consistent}"
                i = consistent
            run_log.fallback_events.append(event)
            logger.warning(event)
        stage += 1
        run_log.record(
            StageRecord(stage=f"{label}/repartition", palette_block=(0, 0), rounds=hp_stats.rounds,
                        residual_degree=hp.d, detail={"epsilon": peel_eps, "ell": hp.ell}),
            hp_stats,
        )
        sub, mapping = next_sub, next_mapping

    remaining = run_log.coloring.uncolored
    if remaining:
        sub, mapping = g.induced_subgraph(remaining)
        finish(run_log, sub, mapping, finisher, offset, stage_seed(seed, stage), epsilon)
    logger.info(
        f"high-arb: n={n} alpha={alpha} colors={len(set(run_log.coloring.colors))} "
        f"rounds={run_log.stats.rounds} fallbacks={len(run_log.fallback_events)}"
    )
    return run_log


def finish(
    run_log: ColoringRun,
    sub: Graph,
    mapping: List[int],
    finisher: Finisher,
    offset: int,
    seed: int,
    epsilon: float = 1.0,
) -> None:
    """Color the residual graph `sub` from palettes starting at `offset`"""
    # degeneracy bounds the residual's arboricity from above
    alpha_res = max(1, degeneracy(sub))
    label = f"finish/{Finisher(finisher).value}"
    try:
        if finisher == Finisher.LINIAL:
            hp, hp_stats = compute_h_partition(sub, alpha_res, 1.0, seed)
            orientation = orient_from_partition(sub, hp)
            colors, trace, stats = linial_color_loop(sub, orientation)
            size = trace.palette_sizes[-1] if trace.families else max(sub.n, 1)
            partial = PartialColoring(colors=[offset + c for c in colors], palette_offset=offset, palette_size=size)
            run_log.coloring.absorb(partial, mapping, label)
            run_log.record(
                StageRecord(stage=label, palette_block=(offset, size), rounds=hp_stats.rounds + stats.rounds,
                            residual_degree=0, colored=sub.n,
                            detail={"alpha": alpha_res, "d": hp.d, "iterations": trace.iterations}),
                hp_stats.then(stats),
            )
        else:
            low = color_low_arb(sub, alpha_res, LowArbVariant.LOGALPHA, epsilon, seed,
                                palette_offset=offset, label="finish/")
            run_log.coloring.merge(low.coloring, mapping)
            run_log.stages.extend(low.stages)
            run_log.stats = run_log.stats.then(low.stats)
    except Exception as e:
        raise StageError(label, e) from e
