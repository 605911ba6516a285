import pytest

from arbcolor.models.coloring import ColoringState
from arbcolor.models.errors import InvalidAlphaError, StageError
from arbcolor.models.graph import from_edge_list
from arbcolor.models.results import ColoringRun
from arbcolor.services.generators import disjoint_cliques, random_tree, union_of_random_forests
from arbcolor.services.high_arb import (
    Finisher,
    PhaseSchedule,
    color_high_arb,
    finish,
    first_partial_coloring,
    first_step_iterations,
    first_step_palette,
    largest_consistent_phase,
    phase_epsilon,
    phase_schedule,
    recompute_h_partition,
    second_partial_coloring_phase,
    tet,
    tetration,
)
from arbcolor.services.hpartition import (
    Orientation,
    compute_h_partition,
    layer_bound,
    orient_from_partition,
    validate_h_partition,
)
from arbcolor.services.verify import check_proper, count_colors
from arbcolor.utils.config import reset_settings

from .strategies import path_graph, star_graph


def assert_blocks_disjoint(coloring: ColoringState):
    blocks = sorted((b for b in coloring.blocks if b.size), key=lambda b: b.offset)
    for first, second in zip(blocks, blocks[1:]):
        assert first.end <= second.offset, (first, second)
    for color in coloring.colors:
        assert any(color in b for b in blocks)


def test_tetration_values():
    assert [tet(i) for i in range(5)] == [1, 2, 4, 16, 65536]
    assert tetration(5) == 2**63
    assert tetration(50) == 2**63
    assert tetration(1, 1.98) == pytest.approx(1.98)


def test_phase_schedule_examples():
    d = 64
    assert phase_schedule(d, 0) == (d, 12 * d, 6)
    assert phase_schedule(d, 1) == (d // 2, 6 * d, 6)
    assert phase_schedule(d, 2) == (d // 4, 3 * d, 6)
    assert phase_schedule(d, 3) == (d // 16, 3 * d // 2, 12)
    assert phase_schedule(d, 5) == (0, 24, 0)


def test_phase_schedule_rejects_negative_phase():
    with pytest.raises(ValueError):
        phase_schedule(10, -1)


def test_phase_palettes_sum_below_48d():
    for d in (1, 7, 64, 1000, 12345):
        total = 0
        for i in range(12):
            d_i, q_i, f_i = phase_schedule(d, i)
            assert f_i * d_i <= q_i / 2
            total += 2 * q_i
        assert total <= 48 * d


def test_phase_epsilon_is_capped():
    assert phase_epsilon(0, cap=5.0) == 5.0
    uncapped = phase_epsilon(0, cap=1e9)
    assert 30 < uncapped < 32
    assert phase_epsilon(1, cap=1e9) > uncapped


def test_first_step_parameters():
    assert first_step_iterations(1.0) == 40
    assert first_step_palette(3, 1.0) == 8
    assert first_step_palette(10, 0.3) == 22


def test_largest_consistent_phase():
    assert largest_consistent_phase(64, 16, 6) == 2
    assert largest_consistent_phase(64, 1, 6) == 4
    assert largest_consistent_phase(64, 1, 1) == 1
    assert largest_consistent_phase(64, 100, 6) is None


def test_recompute_keeps_degree_within_next_phase():
    hp, stats, epsilon = recompute_h_partition(path_graph(3), Orientation(out=[(1,), (2,), ()]), d=1, i=0)
    assert hp.d == 1
    assert hp.layer == [1, 2, 1]
    assert epsilon > 1


def test_recompute_rejects_too_large_out_degree():
    with pytest.raises(InvalidAlphaError):
        recompute_h_partition(star_graph(4), Orientation(out=[(1, 2, 3, 4), (), (), (), ()]), d=2, i=0)


def test_single_node_uses_one_color():
    run = color_high_arb(from_edge_list([], 1), 1)
    assert run.coloring.is_complete
    assert count_colors(run.coloring)[0] == 1
    assert run.fallback_events == []


def test_small_alpha_dispatches_to_low_arb():
    g = random_tree(256, seed=4)
    run = color_high_arb(g, 1, seed=2)
    assert run.algorithm == "high-arb"
    assert run.fallback_events == ["dispatched-to-low-arb"]
    assert run.stages[0].stage.startswith("low-arb-logalpha")
    assert check_proper(g, run.coloring) == []


def test_dispatch_threshold_comes_from_settings(monkeypatch):
    monkeypatch.setenv("ARBCOLOR_DISPATCH_THRESHOLD", "0")
    monkeypatch.setenv("ARBCOLOR_CHERNOFF_GUARD", "0")
    reset_settings()
    run = color_high_arb(random_tree(64, seed=1), 1)
    assert "dispatched-to-low-arb" not in run.fallback_events
    assert run.stages[0].stage == "step1"


def test_full_pipeline_on_forest_union(forest_union):
    run = color_high_arb(forest_union, 3, seed=5, dispatch_threshold=0, degree_guard=0)
    assert check_proper(forest_union, run.coloring) == []
    assert run.coloring.is_complete
    assert run.stages[0].stage == "step1"
    assert run.stages[0].palette_block == (0, 8)
    assert_blocks_disjoint(run.coloring)


def test_cliques_need_two_alpha_colors():
    g = disjoint_cliques(80, 5)
    run = color_high_arb(g, 5, seed=1, dispatch_threshold=0, degree_guard=0)
    assert check_proper(g, run.coloring) == []
    assert count_colors(run.coloring)[0] >= 10


@pytest.mark.parametrize("finisher", list(Finisher))
def test_phases_without_first_step(finisher):
    g = union_of_random_forests(300, 6, seed=8)
    run = color_high_arb(
        g, 6, seed=3, finisher=finisher, dispatch_threshold=0, degree_guard=0, skip_first_step=True
    )
    assert check_proper(g, run.coloring) == []
    assert run.coloring.is_complete
    stages = [s.stage for s in run.stages]
    assert stages[:2] == ["step2/partition", "step2/phase0"]
    phase0 = run.stages[1]
    assert phase0.detail["d_i"] == 18
    assert phase0.detail["f_i"] == 6
    assert phase0.palette_block == (0, 2 * 12 * 18)
    assert_blocks_disjoint(run.coloring)


def test_phase_rounds_are_two_sweeps(forest_union):
    run = color_high_arb(forest_union, 3, dispatch_threshold=0, degree_guard=0, skip_first_step=True)
    phase0 = run.stages[1]
    assert phase0.rounds <= 2 * phase0.detail["ell"] + 1


def test_degree_guard_skips_phases(forest_union):
    run = color_high_arb(forest_union, 3, dispatch_threshold=0, skip_first_step=True)
    assert not any(s.stage.startswith("step2/phase") for s in run.stages)
    assert run.stages[-1].stage.startswith("finish/low-arb-logalpha")
    assert check_proper(forest_union, run.coloring) == []


@pytest.mark.parametrize("finisher", list(Finisher))
def test_finishers_use_a_fresh_block(finisher):
    g = random_tree(120, seed=6)
    run_log = ColoringRun(algorithm="high-arb", coloring=ColoringState.empty(g.n))
    finish(run_log, g, list(range(g.n)), finisher, offset=100, seed=0)
    assert run_log.coloring.is_complete
    assert check_proper(g, run_log.coloring) == []
    assert min(run_log.coloring.colors) >= 100
    assert all(s.stage.startswith("finish/") for s in run_log.stages)


def test_finisher_failures_are_labelled():
    g = disjoint_cliques(12, 3)
    run_log = ColoringRun(algorithm="high-arb", coloring=ColoringState.empty(g.n))
    run_log.coloring.colors[0] = 0
    with pytest.raises(StageError) as info:
        finish(run_log, g, list(range(g.n)), Finisher.LOW_ARB, offset=0, seed=0)
    assert info.value.stage == "finish/low-arb-finisher"


def test_step1_failure_is_labelled(k6):
    with pytest.raises(StageError) as info:
        color_high_arb(k6, 1, dispatch_threshold=0)
    assert info.value.stage == "step1"


def test_runs_are_deterministic(forest_union):
    first = color_high_arb(forest_union, 3, seed=4, dispatch_threshold=0, degree_guard=0).to_result()
    second = color_high_arb(forest_union, 3, seed=4, dispatch_threshold=0, degree_guard=0).to_result()
    assert first.model_dump_json() == second.model_dump_json()


def test_alpha_must_be_positive(k6):
    with pytest.raises(ValueError):
        color_high_arb(k6, 0)



def test_first_partial_coloring_on_large_forest_unions():
    alpha, epsilon = 24, 1.0
    uncolored = total = 0
    for seed in range(10):
        g = union_of_random_forests(2000, alpha, seed)
        hp, _ = compute_h_partition(g, alpha, epsilon / 3, seed)
        partial, _ = first_partial_coloring(g, hp, orient_from_partition(g, hp), epsilon, seed, alpha)
        assert check_proper(g, partial.colors) == [], seed
        assert partial.palette_size == first_step_palette(alpha, epsilon)
        uncolored += len(partial.uncolored)
        total += g.n
    assert uncolored / total <= epsilon / 300


def test_phase_uncolored_frequency_per_node():
    g = union_of_random_forests(400, 4, seed=3)
    hp, _ = compute_h_partition(g, 4, 1.0)
    d_i, q_i, f_i = phase_schedule(hp.d, 0)
    entry = PhaseSchedule(i=0, d_i=d_i, Q_i=q_i, f_i=f_i)
    trials = 40
    misses = [0] * g.n
    for seed in range(trials):
        partial, _, _ = second_partial_coloring_phase(g, hp, entry, seed)
        assert check_proper(g, partial.colors) == []
        for v in partial.uncolored:
            misses[v] += 1
    assert max(misses) / trials <= 2.0**-f_i + 0.05


def test_recompute_on_a_phase_residual():
    g = union_of_random_forests(600, 4, seed=2)
    hp, _ = compute_h_partition(g, 4, 1.0)
    # a starved palette leaves survivors to re-peel
    entry = PhaseSchedule(i=0, d_i=hp.d, Q_i=2 * hp.d, f_i=1)
    partial, orientation, _ = second_partial_coloring_phase(g, hp, entry, seed=5)
    survivors = partial.uncolored
    assert survivors
    sub, _ = g.induced_subgraph(survivors)
    residual = orientation.restrict(survivors)
    target, _, _ = phase_schedule(hp.d, 1)
    if residual.d_out > target:
        with pytest.raises(InvalidAlphaError):
            recompute_h_partition(sub, residual, hp.d, 0)
        return
    hp1, _, epsilon = recompute_h_partition(sub, residual, hp.d, 0)
    assert validate_h_partition(sub, hp1) is True
    assert hp1.d <= target
    assert hp1.ell <= layer_bound(sub.n, epsilon)


@pytest.mark.parametrize("n", [128, 512])
def test_proper_across_seeded_instances(n):
    for seed in range(10):
        alpha = 2 + seed % 5
        g = union_of_random_forests(n, alpha, seed)
        run = color_high_arb(g, alpha, seed=seed, dispatch_threshold=0, degree_guard=0,
                             skip_first_step=bool(seed % 2))
        assert check_proper(g, run.coloring) == [], (alpha, seed)
        assert run.coloring.is_complete


def test_full_pipeline_on_a_large_forest_union():
    g = union_of_random_forests(2000, 24, seed=0)
    for seed in range(4):
        run = color_high_arb(g, 24, seed=seed, dispatch_threshold=0, degree_guard=0)
        assert check_proper(g, run.coloring) == [], seed
        assert run.coloring.is_complete
