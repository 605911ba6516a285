import csv
import json

import pytest

from arbcolor.cli import EXIT_IMPROPER, EXIT_NON_TERMINATION, EXIT_OK, EXIT_RUN_FAILED, EXIT_USAGE, main
from arbcolor.models.graph import read_edge_list, write_edge_list
from arbcolor.services.generators import disjoint_cliques

from .strategies import path_graph


def test_generate_writes_edge_list(tmp_path):
    out = tmp_path / "g.txt"
    code = main(["generate", "--family", "disjoint-cliques", "--n", "12", "--alpha", "2", "--out", str(out)])
    assert code == EXIT_OK
    g = read_edge_list(out)
    assert (g.n, g.m) == (12, 18)


def test_generate_to_stdout(capsys):
    assert main(["generate", "--family", "random-tree", "--n", "10", "--seed", "3"]) == EXIT_OK
    header = capsys.readouterr().out.splitlines()[0]
    assert header == "10 9"


def test_generate_rejects_impossible_parameters():
    assert main(["generate", "--family", "disjoint-cliques", "--n", "3", "--alpha", "2"]) == EXIT_USAGE


def test_run_greedy_on_cliques(tmp_path):
    out = tmp_path / "result.json"
    code = main([
        "run", "--family", "disjoint-cliques", "--n", "12", "--alpha", "2",
        "--algo", "greedy-oracle", "--out", str(out),
    ])
    assert code == EXIT_OK
    data = json.loads(out.read_text())
    assert data["runs"][0]["result"]["colors_used"] == 4
    assert data["runs"][0]["report"]["proper"] is True


def test_run_flags_override_config(tmp_path):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({
        "graph": {"family": "random-tree", "n": 64},
        "algorithm": "low-arb-logalpha",
        "seeds": [1, 2],
    }))
    out = tmp_path / "result.json"
    assert main(["run", "--config", str(config), "--seeds", "5", "--out", str(out)]) == EXIT_OK
    data = json.loads(out.read_text())
    assert data["algorithm"] == "low-arb-logalpha"
    assert [r["seed"] for r in data["runs"]] == [5]
    assert data["n"] == 64


def test_run_round_limit_exit_code(tmp_path):
    code = main([
        "run", "--n", "100", "--alpha", "2", "--algo", "low-arb-logalpha",
        "--round-limit", "1", "--out", str(tmp_path / "r.json"),
    ])
    assert code == EXIT_NON_TERMINATION


def test_run_is_byte_reproducible(tmp_path):
    args = ["run", "--n", "120", "--alpha", "3", "--algo", "auto-dispatch", "--seeds", "0,1"]
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    assert main(args + ["--out", str(first)]) == EXIT_OK
    assert main(args + ["--out", str(second)]) == EXIT_OK
    assert first.read_bytes() == second.read_bytes()


def test_run_on_edge_list_file(tmp_path):
    graph = tmp_path / "path.txt"
    write_edge_list(path_graph(30), graph)
    out = tmp_path / "r.json"
    assert main(["run", "--graph", str(graph), "--algo", "hpartition-linial-baseline", "--out", str(out)]) == EXIT_OK
    assert json.loads(out.read_text())["alpha"] == 1


def test_invalid_config_is_a_usage_error(tmp_path):
    config = tmp_path / "config.json"
    config.write_text("{not json")
    with pytest.raises(SystemExit) as info:
        main(["run", "--config", str(config)])
    assert info.value.code == EXIT_USAGE


def test_config_with_unknown_algorithm_is_a_usage_error(tmp_path):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"algorithm": "brooks"}))
    with pytest.raises(SystemExit) as info:
        main(["run", "--config", str(config)])
    assert info.value.code == EXIT_USAGE


def test_unknown_flag_value_is_a_usage_error():
    with pytest.raises(SystemExit) as info:
        main(["run", "--algo", "brooks"])
    assert info.value.code == EXIT_USAGE


def test_sweep_writes_csv(tmp_path):
    out = tmp_path / "sweep.csv"
    code = main([
        "sweep", "--n", "40,60", "--alpha", "1", "--algo", "greedy-oracle,low-arb-logalpha",
        "--seeds", "0", "--workers", "2", "--out", str(out),
    ])
    assert code == EXIT_OK
    rows = list(csv.DictReader(out.open()))
    assert [(r["n"], r["algorithm"]) for r in rows] == [
        ("40", "greedy-oracle"), ("40", "low-arb-logalpha"), ("60", "greedy-oracle"), ("60", "low-arb-logalpha"),
    ]
    assert all(r["proper"] == "True" for r in rows)


def test_sweep_rejects_unknown_algorithm():
    with pytest.raises(SystemExit) as info:
        main(["sweep", "--n", "40", "--alpha", "1", "--algo", "brooks"])
    assert info.value.code == EXIT_USAGE


def test_verify_proper_and_improper(tmp_path):
    graph = tmp_path / "g.txt"
    write_edge_list(path_graph(3), graph)
    good, bad = tmp_path / "good.json", tmp_path / "bad.json"
    good.write_text("[0, 1, 0]")
    bad.write_text("[0, 0, 1]")
    report_path = tmp_path / "report.json"
    assert main(["verify", "--graph", str(graph), "--coloring", str(good)]) == EXIT_OK
    assert main(["verify", "--graph", str(graph), "--coloring", str(bad), "--out", str(report_path)]) == EXIT_IMPROPER
    report = json.loads(report_path.read_text())
    assert report["violating_edges"] == [[0, 1]]


def test_verify_missing_file(tmp_path):
    assert main(["verify", "--graph", str(tmp_path / "missing.txt"), "--coloring", "x.json"]) == EXIT_USAGE


def test_generate_single_node_tree(capsys):
    assert main(["generate", "--family", "random-tree", "--n", "1"]) == EXIT_OK
    assert capsys.readouterr().out.splitlines()[0] == "1 0"


def test_run_stage_failure_exit_code(tmp_path):
    graph = tmp_path / "cliques.txt"
    write_edge_list(disjoint_cliques(12, 3), graph)
    out = tmp_path / "r.json"
    code = main([
        "run", "--graph", str(graph), "--alpha", "1", "--algo", "low-arb-logalpha", "--out", str(out),
    ])
    assert code == EXIT_RUN_FAILED
    record = json.loads(out.read_text())["runs"][0]
    assert record["error_kind"] == "InvalidAlphaError"
    assert record["report"] is None
