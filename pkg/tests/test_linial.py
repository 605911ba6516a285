import pytest

from arbcolor.models.errors import CoverFreeViolation
from arbcolor.models.graph import from_edge_list, log_star
from arbcolor.services.generators import random_tree, union_of_random_forests
from arbcolor.services.hpartition import Orientation, compute_h_partition, orient_from_partition
from arbcolor.services.linial import (
    CoverFreeFamily,
    build_cover_free_family,
    color_hpartition_linial,
    is_prime,
    linial_color_loop,
    linial_reduce_once,
    plan_families,
    reduce_color,
)
from arbcolor.services.verify import check_cover_free, check_proper

from .strategies import path_graph


def test_primes():
    assert [q for q in range(20) if is_prime(q)] == [2, 3, 5, 7, 11, 13, 17, 19]


def test_delta_one_family_is_an_antichain():
    family = build_cover_free_family(1, 2)
    a, b = family.sets
    assert not set(a) <= set(b)
    assert not set(b) <= set(a)


def test_family_for_delta_two_k_eight():
    family = build_cover_free_family(2, 8)
    assert (family.q, family.t, family.ground) == (5, 1, 25)
    assert len(family.sets) == 8
    assert all(len(s) == 5 for s in family.sets)
    assert check_cover_free(family.sets, 2) == []


def test_small_families_are_cover_free():
    for delta in range(1, 5):
        for k in (2, 5, 16, 33, 64):
            family = build_cover_free_family(delta, k)
            assert all(0 <= x < family.ground for s in family.sets for x in s)
            assert check_cover_free(family.sets, delta) == []


def test_cover_free_checker_finds_covered_sets():
    sets = [{0, 1}, {0, 2}, {1, 2}, {3}]
    assert check_cover_free(sets, 2) == [0, 1, 2]
    assert check_cover_free(sets, 1) == []


def test_iterated_ground_reaches_a_fixpoint():
    k = 10**6
    grounds = []
    for _ in range(10):
        family = build_cover_free_family(3, k)
        grounds.append(family.ground)
        if family.ground >= k:
            break
        k = family.ground
    assert grounds[-1] == build_cover_free_family(3, grounds[-1]).ground
    assert grounds == [841, 169, 169]


def test_reduce_color_single_node_takes_minimum():
    family = build_cover_free_family(2, 8)
    assert reduce_color(0, 3, [], family) == min(family.member(3))


def test_reduce_color_reports_covered_set():
    family = CoverFreeFamily(k=4, delta=1, q=2, t=1)
    with pytest.raises(CoverFreeViolation) as info:
        reduce_color(7, 0, [1, 2, 3], family)
    assert info.value.node == 7


def test_reduce_once_on_directed_path():
    g = path_graph(3)
    orientation = Orientation(out=[(1,), (2,), ()])
    family = build_cover_free_family(1, 3)
    colors, stats = linial_reduce_once(g, orientation, [0, 1, 2], family)
    assert check_proper(g, colors) == []
    assert stats.rounds == 1
    assert all(c < family.ground for c in colors)


def test_reduce_once_on_oriented_k6(k6):
    hp, _ = compute_h_partition(k6, 3, 1.0)
    orientation = orient_from_partition(k6, hp)
    family = build_cover_free_family(5, 6)
    colors, stats = linial_reduce_once(k6, orientation, list(range(6)), family)
    assert check_proper(k6, colors) == []
    assert stats.rounds == 1


def test_reduce_once_checks_family_parameters(k6):
    hp, _ = compute_h_partition(k6, 3, 1.0)
    orientation = orient_from_partition(k6, hp)
    with pytest.raises(ValueError):
        linial_reduce_once(k6, orientation, list(range(6)), build_cover_free_family(2, 6))


def test_loop_on_trees_gives_constant_palette():
    for seed in range(5):
        g = random_tree(300, seed)
        hp, _ = compute_h_partition(g, 1, 1.0)
        orientation = orient_from_partition(g, hp)
        colors, trace, _ = linial_color_loop(g, orientation)
        assert check_proper(g, colors) == []
        assert max(colors) < 169
        assert trace.iterations <= log_star(g.n) + 5


def test_loop_on_isolated_nodes():
    g = from_edge_list([], 100)
    colors, trace, _ = linial_color_loop(g, Orientation(out=[()] * 100))
    # one reduction through q = 5, t = 2; each node keeps the constant term of its polynomial
    assert trace.palette_sizes == [25]
    assert set(colors) == {0, 1, 2, 3, 4}


def test_loop_on_forest_union_palette_is_quadratic():
    g = union_of_random_forests(3000, 2, seed=2)
    hp, _ = compute_h_partition(g, 2, 1.0)
    orientation = orient_from_partition(g, hp)
    colors, trace, stats = linial_color_loop(g, orientation)
    assert check_proper(g, colors) == []
    d = orientation.d_out
    assert len(set(colors)) <= 25 * (d + 1) ** 2
    assert trace.iterations <= log_star(3000) + 5
    assert stats.rounds == trace.iterations
    sizes = trace.palette_sizes
    assert all(b <= a for a, b in zip(sizes[1:], sizes[2:]))


def test_plan_stops_when_no_reduction():
    assert plan_families(3, 5) == []


def test_baseline_is_proper(forest_union):
    run = color_hpartition_linial(forest_union, 3)
    assert check_proper(forest_union, run.coloring) == []
    assert run.coloring.is_complete
    assert [s.stage for s in run.stages] == ["h-partition", "linial"]
