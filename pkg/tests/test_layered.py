import pytest

from arbcolor.services.hpartition import HPartition, orient_from_partition
from arbcolor.services.layered import layer_major_slots, run_layered_coloring, sweep_major_slots
from arbcolor.services.verify import check_proper

from .strategies import path_graph


def single_layer(n: int, d: int) -> HPartition:
    return HPartition(layer=[1] * n, ell=1, d=d, epsilon=1.0)


def test_slot_calendars():
    layer_major = layer_major_slots(3, 2, 10, 5, 1)
    assert [s.layer for s in layer_major] == [3, 3, 2, 2, 1, 1]
    assert {s.palette_offset for s in layer_major} == {10}
    sweep_major = sweep_major_slots(2, 2, 0, 7, 3)
    assert [(s.layer, s.palette_offset) for s in sweep_major] == [(2, 0), (1, 0), (2, 7), (1, 7)]


@pytest.mark.parametrize("seed", range(60))
def test_commits_reach_out_neighbors(seed):
    # 0 -> 1 -> 2 in one layer with two colors: node 1 must respect a color
    # node 0 kept while node 1 was losing to node 2
    g = path_graph(3)
    hp = single_layer(3, 2)
    orientation = orient_from_partition(g, hp)
    partial, stats = run_layered_coloring(g, hp, orientation, layer_major_slots(1, 8, 0, 2, 1), seed)
    assert check_proper(g, partial.colors) == []
    assert partial.colors[2] is not None
    assert stats.rounds <= 8 + 1


def test_sweeps_use_fresh_palettes():
    g = path_graph(4)
    hp = single_layer(4, 2)
    orientation = orient_from_partition(g, hp)
    partial, _ = run_layered_coloring(g, hp, orientation, sweep_major_slots(1, 3, 20, 6, 2), seed=1)
    assert check_proper(g, partial.colors) == []
    assert (partial.palette_offset, partial.palette_size) == (20, 18)
    assert all(c is None or 20 <= c < 38 for c in partial.colors)


def test_empty_calendar_leaves_everything_uncolored():
    g = path_graph(3)
    hp = single_layer(3, 2)
    partial, _ = run_layered_coloring(g, hp, orient_from_partition(g, hp), [], seed=0)
    assert partial.uncolored == [0, 1, 2]
