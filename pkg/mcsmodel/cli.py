"""
Command-line surface for the MCS model toolkit.

Commands: dist, matrix, mcs, check-model, metric2model, ged, verify-ged.
Results go to standard output as JSON (sorted keys) or TSV; diagnostics
go to standard error.

Exit codes:
    0  success
    2  parse / input error or broken precondition
    3  scale cap exceeded
    4  model violation or a failed check
"""

import argparse
import json
import logging
import random
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from .core_model import (
    DEFAULT_ELEMENT_CAP,
    ELEMENT_CAP_MAX,
    FiniteMcsModel,
    MetricKind,
    check_aux_inequality,
    check_axioms,
    check_global_subelement,
    check_metric_laws,
)
from .errors import CapExceededError, InputError, McsError, ModelViolationError
from .ged import EditCostTables, build_correspondence, ged_brute_force, verify_ged_correspondence_all
from .graphs import EPS_E, EPS_V, LabeledGraph, graph_universe
from .mcs_solvers import (
    DEFAULT_SOLVER_CAP,
    SOLVER_CAP_MAX,
    GraphModelKind,
    SolverParams,
    distance_matrix,
    graph_distance,
    graph_size,
    mcs_brute_force,
    mcs_solve,
)
from .metric2model import FiniteMetricSpace, build_model, random_metric_space, verify_recovery
from .rational import format_rational

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_CAP = 3
EXIT_VIOLATION = 4


@dataclass
class CliConfig:
    """Flags shared by every command."""
    command: str
    fmt: str = "json"
    seed: int = 0
    cap_vertices: int = DEFAULT_SOLVER_CAP
    cap_elements: int = DEFAULT_ELEMENT_CAP
    close_order: bool = False
    verbose: int = 0

    def __post_init__(self):
        if not 0 < self.cap_vertices <= SOLVER_CAP_MAX:
            raise InputError(f"--cap-vertices must be in 1..{SOLVER_CAP_MAX}")
        if not 0 < self.cap_elements <= ELEMENT_CAP_MAX:
            raise InputError(f"--cap-elements must be in 1..{ELEMENT_CAP_MAX}")

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "CliConfig":
        return cls(
            command=args.command,
            fmt=args.format,
            seed=args.seed,
            cap_vertices=args.cap_vertices,
            cap_elements=args.cap_elements,
            close_order=args.close_order,
            verbose=args.verbose,
        )

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary."""
        return {
            "command": self.command,
            "format": self.fmt,
            "seed": self.seed,
            "cap_vertices": self.cap_vertices,
            "cap_elements": self.cap_elements,
            "close_order": self.close_order,
            "verbose": self.verbose,
        }


# ----------------------------------------------------------------------
# Helpers
# ----------------------------------------------------------------------

def _solver_params(config: CliConfig, args: argparse.Namespace, graphs: Sequence[LabeledGraph]) -> SolverParams:
    if args.params:
        params = SolverParams.load(args.params, close_order=config.close_order)
    else:
        params = SolverParams()
    if args.alpha == "uniform":
        params.alpha = SolverParams.uniform(graphs).alpha
    params.cap_vertices = config.cap_vertices
    return params


def _graph_files(directory: str) -> List[Path]:
    root = Path(directory)
    if not root.is_dir():
        raise InputError(f"Not a directory: {directory}")
    return sorted(root.glob("*.json"), key=lambda p: p.name)


# ----------------------------------------------------------------------
# Commands: each returns (document, passed)
# ----------------------------------------------------------------------

def cmd_dist(config: CliConfig, args: argparse.Namespace) -> Tuple[Dict, bool]:
    kind = GraphModelKind.parse(args.kind)
    metric = MetricKind.parse(args.metric)
    g1, g2 = LabeledGraph.load(args.g1), LabeledGraph.load(args.g2)
    params = _solver_params(config, args, [g1, g2])
    result = mcs_solve(kind, g1, g2, params)
    value = graph_distance(kind, metric, g1, g2, params, solver=lambda *_: result)
    logger.info("%s distance (%s): %s", metric.value, kind.value, format_rational(value))
    return {
        "distance": format_rational(value),
        "bestSize": format_rational(result.best_size),
        "witnessCount": len(result.witnesses),
    }, True


def cmd_matrix(config: CliConfig, args: argparse.Namespace) -> Tuple[Dict, bool]:
    kind = GraphModelKind.parse(args.kind)
    metric = MetricKind.parse(args.metric)
    files = _graph_files(args.directory)
    graphs = [LabeledGraph.load(path) for path in files]
    params = _solver_params(config, args, graphs)
    matrix = distance_matrix(kind, metric, graphs, params)
    logger.info("%dx%d matrix computed", len(graphs), len(graphs))
    return {
        "files": [path.name for path in files],
        "matrix": [[format_rational(value) for value in row] for row in matrix],
    }, True


def cmd_mcs(config: CliConfig, args: argparse.Namespace) -> Tuple[Dict, bool]:
    kind = GraphModelKind.parse(args.kind)
    g1, g2 = LabeledGraph.load(args.g1), LabeledGraph.load(args.g2)
    params = _solver_params(config, args, [g1, g2])
    solver = mcs_brute_force if args.brute_force else mcs_solve
    result = solver(kind, g1, g2, params)
    doc = result.to_dict()
    doc["sizes"] = [format_rational(graph_size(kind, g, params)) for g in (g1, g2)]
    return doc, True


def cmd_check_model(config: CliConfig, args: argparse.Namespace) -> Tuple[Dict, bool]:
    model = FiniteMcsModel.load(args.model, close_order=config.close_order)
    axioms = check_axioms(model, cap=config.cap_elements)
    doc: Dict[str, Any] = {"elements": len(model), "axioms": axioms.to_dict()}
    passed = axioms.passed
    if axioms.passed:
        metrics = {kind.value: check_metric_laws(model, kind, cap=config.cap_elements) for kind in MetricKind}
        aux = check_aux_inequality(model, cap=config.cap_elements)
        global_min = check_global_subelement(model)
        doc["metrics"] = {name: report.to_dict() for name, report in metrics.items()}
        doc["aux"] = aux.to_dict()
        doc["globalMin"] = global_min.to_dict()
        passed = aux.passed and global_min.passed and all(r.passed for r in metrics.values())
    else:
        for violation in axioms.violations:
            print(f"✗ {violation.tag.value} violated by ({', '.join(violation.witness)})", file=sys.stderr)
    doc["passed"] = passed
    return doc, passed


def cmd_metric2model(config: CliConfig, args: argparse.Namespace) -> Tuple[Dict, bool]:
    if args.random is not None:
        space = random_metric_space(args.random, random.Random(config.seed))
    elif args.space:
        space = FiniteMetricSpace.load(args.space)
    else:
        raise InputError("metric2model needs a space file or --random N")
    model, index = build_model(space, args.theta)
    recovery = verify_recovery(space, model, index)
    axioms = check_axioms(model, cap=max(config.cap_elements, len(model)))
    passed = recovery.passed and axioms.passed
    return {
        "space": space.to_dict(),
        "model": model.to_dict(),
        "recovery": recovery.to_dict(),
        "axioms": axioms.to_dict(),
        "passed": passed,
    }, passed


def cmd_ged(config: CliConfig, args: argparse.Namespace) -> Tuple[Dict, bool]:
    g1, g2 = LabeledGraph.load(args.g1), LabeledGraph.load(args.g2)
    costs = EditCostTables.load(args.costs)
    result = ged_brute_force(g1, g2, costs)
    logger.info("GED = %s after %d bijections", format_rational(result.distance), result.bijections_scanned)
    return result.to_dict(), True


def cmd_verify_ged(config: CliConfig, args: argparse.Namespace) -> Tuple[Dict, bool]:
    costs = EditCostTables.load(args.costs)
    ctx = build_correspondence(args.n, costs)
    if args.graphs:
        files = _graph_files(args.graphs)
        names = [path.name for path in files]
        graphs = [LabeledGraph.load(path) for path in files]
    else:
        vertex_labels = [label for label in costs.vertex_labels() if label != EPS_V]
        edge_labels = [label for label in costs.edge_labels() if label != EPS_E]
        graphs = graph_universe(args.n, vertex_labels, edge_labels)
        names = [f"universe[{i}]" for i in range(len(graphs))]
    results = verify_ged_correspondence_all(ctx, graphs)
    failures = [
        {"g1": names[i], "g2": names[j], "graphs": [graphs[i].to_dict(), graphs[j].to_dict()],
         "costs": costs.to_dict(), **report.to_dict()}
        for i, j, report in results if not report.passed
    ]
    passed = not failures
    logger.info("verify-ged: %d pairs, %d failures", len(results), len(failures))
    return {"n": args.n, "graphCount": len(graphs), "pairCount": len(results), "failures": failures, "passed": passed}, passed


HANDLERS: Dict[str, Callable[[CliConfig, argparse.Namespace], Tuple[Dict, bool]]] = {
    "dist": cmd_dist,
    "matrix": cmd_matrix,
    "mcs": cmd_mcs,
    "check-model": cmd_check_model,
    "metric2model": cmd_metric2model,
    "ged": cmd_ged,
    "verify-ged": cmd_verify_ged,
}


# ----------------------------------------------------------------------
# Output
# ----------------------------------------------------------------------

def render(doc: Dict, fmt: str) -> str:
    """Serialize a result document as JSON (sorted keys) or TSV."""
    if fmt == "json":
        return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False)
    if "matrix" in doc:
        lines = ["\t".join([""] + doc["files"])]
        lines += ["\t".join([name] + row) for name, row in zip(doc["files"], doc["matrix"])]
        return "\n".join(lines)
    lines = []
    for key in sorted(doc):
        value = doc[key]
        text = value if isinstance(value, str) else json.dumps(value, sort_keys=True, ensure_ascii=False)
        lines.append(f"{key}\t{text}")
    return "\n".join(lines)


# ----------------------------------------------------------------------
# Parser
# ----------------------------------------------------------------------

def _add_solver_flags(sub: argparse.ArgumentParser, metric: bool = True) -> None:
    sub.add_argument("--kind", "-k", default="I", help="Graph model: S, I or E (default: I)")
    if metric:
        sub.add_argument("--metric", "-m", default="da", help="Metric: da, db, dc or dd (default: da)")
    sub.add_argument("--params", "-P", default=None, help="Solver parameters JSON (alpha and/or label models)")
    sub.add_argument("--alpha", choices=["uniform"], default=None, help="Use α ≡ 1 over the observed labels")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mcsmodel", description="Maximum common subelement models and metrics")
    parser.add_argument("--format", "-f", choices=["json", "tsv"], default="json", help="Output format")
    parser.add_argument("--seed", type=int, default=0, help="Random seed for sampling commands (default: 0)")
    parser.add_argument("--cap-vertices", type=int, default=DEFAULT_SOLVER_CAP, help="Solver vertex cap")
    parser.add_argument("--cap-elements", type=int, default=DEFAULT_ELEMENT_CAP, help="Model element cap for checks")
    parser.add_argument("--close-order", action="store_true", help="Take the reflexive-transitive closure of model orders")
    parser.add_argument("--verbose", "-v", action="count", default=0, help="More logging (repeatable)")
    commands = parser.add_subparsers(dest="command", required=True)

    sub = commands.add_parser("dist", help="Distance between two graphs")
    sub.add_argument("g1")
    sub.add_argument("g2")
    _add_solver_flags(sub)

    sub = commands.add_parser("matrix", help="Distance matrix over a directory of graphs")
    sub.add_argument("directory")
    _add_solver_flags(sub)

    sub = commands.add_parser("mcs", help="Maximum common subgraphs of two graphs")
    sub.add_argument("g1")
    sub.add_argument("g2")
    _add_solver_flags(sub, metric=False)
    sub.add_argument("--brute-force", action="store_true", help="Use the exhaustive oracle")

    sub = commands.add_parser("check-model", help="Check the axioms of a finite model")
    sub.add_argument("model")

    sub = commands.add_parser("metric2model", help="Build the model recovering a finite metric space")
    sub.add_argument("space", nargs="?", default=None)
    sub.add_argument("--theta", default="1", help="Size of the full edge set (default: 1)")
    sub.add_argument("--random", type=int, default=None, metavar="N", help="Use a random N-point space")

    sub = commands.add_parser("ged", help="Exact graph edit distance")
    sub.add_argument("g1")
    sub.add_argument("g2")
    sub.add_argument("costs")

    sub = commands.add_parser("verify-ged", help="Check GED = d_a in the correspondence model")
    sub.add_argument("--n", type=int, required=True, help="Maximum graph order")
    sub.add_argument("costs")
    sub.add_argument("graphs", nargs="?", default=None, help="Directory of graphs (default: every graph up to n vertices)")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run one command; returns the process exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)
    level = {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")

    try:
        config = CliConfig.from_args(args)
        doc, passed = HANDLERS[config.command](config, args)
    except CapExceededError as e:
        print(f"✗ {e}", file=sys.stderr)
        return EXIT_CAP
    except ModelViolationError as e:
        print(f"✗ Model violation: {e}", file=sys.stderr)
        return EXIT_VIOLATION
    except McsError as e:
        print(f"✗ Error: {e}", file=sys.stderr)
        return EXIT_INPUT

    print(render(doc, config.fmt))
    return EXIT_OK if passed else EXIT_VIOLATION
