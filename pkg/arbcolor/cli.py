"""Command line: generate graphs, run or sweep coloring algorithms, verify a coloring."""
import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

from pydantic import ValidationError

from .models.graph import read_edge_list, to_edge_list_text
from .models.results import Algorithm, ExperimentConfig, GeneratorFamily, SweepGrid
from .services.experiment_service import ExperimentService, rows_to_csv, to_json
from .services.generators import GenSpec
from .services.high_arb import Finisher
from .services.verify import report
from .utils.config import get_settings

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_IMPROPER = 1
EXIT_USAGE = 2
EXIT_NON_TERMINATION = 3
EXIT_RUN_FAILED = 4


def _int_list(text: str) -> List[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _float_list(text: str) -> List[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _str_list(text: str) -> List[str]:
    return [x.strip() for x in text.split(",") if x.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="arbcolor", description="Arboricity-dependent distributed graph coloring")
    sub = parser.add_subparsers(dest="command", required=True)

    families = [f.value for f in GeneratorFamily]
    algorithms = [a.value for a in Algorithm]

    gen = sub.add_parser("generate", help="write a generated graph as an edge list")
    gen.add_argument("--family", choices=families, default=GeneratorFamily.FOREST_UNION.value)
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--alpha", type=int, default=1)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", help="output file (default: stdout)")

    run = sub.add_parser("run", help="color one graph with one algorithm for each seed")
    run.add_argument("--config", help="ExperimentConfig JSON; flags override its fields")
    run.add_argument("--graph", help="edge-list file; otherwise a generated graph is used")
    run.add_argument("--family", choices=families)
    run.add_argument("--n", type=int)
    run.add_argument("--alpha", type=int)
    run.add_argument("--graph-seed", type=int)
    run.add_argument("--algo", choices=algorithms)
    run.add_argument("--epsilon", type=float)
    run.add_argument("--seeds", type=_int_list)
    run.add_argument("--round-limit", type=int)
    run.add_argument("--dispatch-threshold", type=float)
    run.add_argument("--objective", choices=["fast", "linear"])
    run.add_argument("--finisher", choices=[f.value for f in Finisher])
    run.add_argument("--out", help="result JSON file (default: stdout)")

    sweep = sub.add_parser("sweep", help="run a parameter grid and write CSV")
    sweep.add_argument("--config", help="SweepGrid JSON; flags override its fields")
    sweep.add_argument("--family", choices=families)
    sweep.add_argument("--n", type=_int_list)
    sweep.add_argument("--alpha", type=_int_list)
    sweep.add_argument("--epsilon", type=_float_list)
    sweep.add_argument("--algo", type=_str_list, help="comma-separated algorithm names")
    sweep.add_argument("--seeds", type=_int_list)
    sweep.add_argument("--round-limit", type=int)
    sweep.add_argument("--dispatch-threshold", type=float)
    sweep.add_argument("--workers", type=int)
    sweep.add_argument("--out", help="CSV file (default: stdout)")

    verify = sub.add_parser("verify", help="check a coloring of an edge-list graph")
    verify.add_argument("--graph", required=True)
    verify.add_argument("--coloring", required=True, help="JSON list with one color (or null) per node")
    verify.add_argument("--out", help="report JSON file (default: stdout)")
    return parser


def _load_config(path: Optional[str]) -> Dict[str, Any]:
    if not path:
        return {}
    return json.loads(Path(path).read_text())


def _write(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text)
        logger.info(f"Wrote {out}")
    else:
        sys.stdout.write(text)


def _experiment_config(args: argparse.Namespace) -> ExperimentConfig:
    data = _load_config(args.config)
    graph = dict(data.get("graph", {}))
    for key, value in (("path", args.graph), ("family", args.family), ("n", args.n), ("seed", args.graph_seed)):
        if value is not None:
            graph[key] = value
    if args.alpha is not None:
        graph["alpha"] = args.alpha
        data["alpha"] = args.alpha
    data["graph"] = graph
    overrides = {
        "algorithm": args.algo,
        "epsilon": args.epsilon,
        "seeds": args.seeds,
        "round_limit": args.round_limit,
        "output": args.out,
        "dispatch_threshold": args.dispatch_threshold,
        "objective": args.objective,
        "finisher": args.finisher,
    }
    data.update({k: v for k, v in overrides.items() if v is not None})
    return ExperimentConfig.model_validate(data)


def _sweep_grid(args: argparse.Namespace) -> SweepGrid:
    data = _load_config(args.config)
    overrides = {
        "family": args.family,
        "n": args.n,
        "alpha": args.alpha,
        "epsilon": args.epsilon,
        "algorithms": args.algo,
        "seeds": args.seeds,
        "round_limit": args.round_limit,
        "dispatch_threshold": args.dispatch_threshold,
    }
    data.update({k: v for k, v in overrides.items() if v is not None})
    return SweepGrid.model_validate(data)


def cmd_generate(args: argparse.Namespace) -> int:
    generated = GenSpec(GeneratorFamily(args.family), args.n, args.alpha, args.seed).build()
    _write(to_edge_list_text(generated.graph), args.out)
    return EXIT_OK


def cmd_run(args: argparse.Namespace) -> int:
    config = _experiment_config(args)
    service = ExperimentService(get_settings())
    result = service.run(config)
    _write(to_json(result), config.output)
    if result.any_improper:
        return EXIT_IMPROPER
    if result.any_non_terminating:
        return EXIT_NON_TERMINATION
    if result.any_failed:
        return EXIT_RUN_FAILED
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    grid = _sweep_grid(args)
    service = ExperimentService(get_settings())
    rows = service.sweep(grid, workers=args.workers)
    _write(rows_to_csv(rows), args.out)
    if any(row["proper"] is False for row in rows):
        return EXIT_IMPROPER
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    g = read_edge_list(args.graph)
    colors = json.loads(Path(args.coloring).read_text())
    verification = report(g, colors)
    _write(to_json(verification), args.out)
    return EXIT_OK if verification.proper else EXIT_IMPROPER


COMMANDS = {
    "generate": cmd_generate,
    "run": cmd_run,
    "sweep": cmd_sweep,
    "verify": cmd_verify,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ValidationError, json.JSONDecodeError) as e:
        parser.error(f"invalid configuration: {e}")
    except (OSError, ValueError) as e:
        logger.error(f"{args.command} failed: {e}")
        return EXIT_USAGE
