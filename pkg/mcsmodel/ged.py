"""
Graph Edit Distance and its MCS Model Correspondence

Exact GED by enumerating every bijection between the completed vertex
sets of two graphs, and the model in which GED equals d_a: label MCS
models are derived from the (metric) cost tables, graphs are embedded
as their 2n-completions, and s' on completions is a maximum over
bijections of summed label s' values.
"""

import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, permutations
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

from .core_model import (
    AxiomReport,
    AxiomTag,
    FiniteMcsModel,
    Violation,
    check_metric_table,
    max_common_size,
)
from .errors import CapExceededError, ContractViolationError, InputError
from .graphs import EPS_E, EPS_V, RESERVED_LABELS, LabeledGraph, completion, size_ges
from .metric2model import DerivedElement, FiniteMetricSpace, build_model
from .rational import format_rational, parse_rational

logger = logging.getLogger(__name__)

GED_VERTEX_CAP = 7
COMPLETE_VERTEX_CAP = 6
# Label models grow with the connected edge subsets of K_m over the label set.
CORRESPONDENCE_VERTEX_LABEL_CAP = 4
CORRESPONDENCE_EDGE_LABEL_CAP = 3

DEFAULT_EPS_NAME_V = "epsV"
DEFAULT_EPS_NAME_E = "epsE"

Bijection = Tuple[Tuple[str, str], ...]


@dataclass
class EditCostTables:
    """
    Label edit costs, stored per ordered label pair.

    Padding labels are the reserved EPS_V / EPS_E; `eps_names` holds the
    names used for them in cost documents.
    """
    vertex_cost: Dict[Tuple[str, str], Fraction]
    edge_cost: Dict[Tuple[str, str], Fraction]
    eps_names: Tuple[str, str] = (DEFAULT_EPS_NAME_V, DEFAULT_EPS_NAME_E)

    def __post_init__(self):
        for table in (self.vertex_cost, self.edge_cost):
            for key, value in list(table.items()):
                value = parse_rational(value)
                if value < 0:
                    raise InputError(f"Edit cost {key[0]!r} -> {key[1]!r} is negative")
                table[key] = value

    @staticmethod
    def _labels(table: Dict[Tuple[str, str], Fraction], eps: str) -> List[str]:
        labels = {eps}
        for a, b in table:
            labels.update((a, b))
        return sorted(labels)

    def vertex_labels(self) -> List[str]:
        """Every vertex label with a cost entry, padding label included."""
        return self._labels(self.vertex_cost, EPS_V)

    def edge_labels(self) -> List[str]:
        return self._labels(self.edge_cost, EPS_E)

    @staticmethod
    def _lookup(table: Dict[Tuple[str, str], Fraction], a: str, b: str, what: str) -> Fraction:
        if (a, b) in table:
            return table[a, b]
        if a == b:
            return Fraction(0)
        raise InputError(f"Missing {what} cost for {_display(a)!r} -> {_display(b)!r}")

    def vertex(self, a: str, b: str) -> Fraction:
        return self._lookup(self.vertex_cost, a, b, "vertex")

    def edge(self, a: str, b: str) -> Fraction:
        return self._lookup(self.edge_cost, a, b, "edge")

    @classmethod
    def discrete(cls, vertex_labels: Sequence[str], edge_labels: Sequence[str]) -> "EditCostTables":
        """Cost 0 for equal labels and 1 otherwise, padding labels included."""
        def table(labels):
            return {(a, b): Fraction(int(a != b)) for a in labels for b in labels}
        return cls(table(list(vertex_labels) + [EPS_V]), table(list(edge_labels) + [EPS_E]))

    def to_dict(self) -> Dict:
        eps_v, eps_e = self.eps_names
        names = {EPS_V: eps_v, EPS_E: eps_e}

        def dump(table):
            return {
                f"{names.get(a, a)}|{names.get(b, b)}": format_rational(value)
                for (a, b), value in sorted(table.items()) if a != b
            }
        return {"epsV": eps_v, "epsE": eps_e, "vertexCost": dump(self.vertex_cost), "edgeCost": dump(self.edge_cost)}

    @classmethod
    def from_dict(cls, data: Dict) -> "EditCostTables":
        """
        Parse a cost document.

        "a|b" keys set both orders unless "b|a" is also given; diagonal
        entries default to 0.
        """
        try:
            eps_v = str(data.get("epsV", DEFAULT_EPS_NAME_V))
            eps_e = str(data.get("epsE", DEFAULT_EPS_NAME_E))
            vertex = _parse_table(data["vertexCost"], eps_v, EPS_V)
            edge = _parse_table(data["edgeCost"], eps_e, EPS_E)
        except (KeyError, TypeError, AttributeError) as e:
            raise InputError(f"Cost document is malformed: {e}")
        return cls(vertex, edge, (eps_v, eps_e))

    @classmethod
    def load(cls, path: Union[str, Path]) -> "EditCostTables":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            raise InputError(f"Cannot read cost tables {path}: {e}")
        return cls.from_dict(data)


def _display(label: str) -> str:
    return {EPS_V: "ε_V", EPS_E: "ε_E"}.get(label, label)


def _parse_table(raw: Dict[str, str], eps_name: str, eps: str) -> Dict[Tuple[str, str], Fraction]:
    explicit: Dict[Tuple[str, str], Fraction] = {}
    for key, value in raw.items():
        parts = key.split("|")
        if len(parts) != 2:
            raise InputError(f"Cost key {key!r} must have the form 'a|b'")
        for part in parts:
            if part in RESERVED_LABELS:
                raise InputError(f"Label {part!r} is reserved for graph completion")
        a, b = (eps if part == eps_name else part for part in parts)
        explicit[a, b] = parse_rational(value)
    table = dict(explicit)
    for (a, b), value in explicit.items():
        table.setdefault((b, a), value)
    return table


@dataclass
class GedResult:
    """Minimum edit cost with the bijection attaining it."""
    distance: Fraction
    best_bijection: Dict[str, str]
    bijections_scanned: int
    completed_size: int

    def to_dict(self) -> Dict:
        return {
            "distance": format_rational(self.distance),
            "bestBijection": dict(sorted(self.best_bijection.items())),
            "bijectionsScanned": self.bijections_scanned,
            "completedSize": self.completed_size,
        }


def _reject_reserved_labels(g: LabeledGraph) -> None:
    for label in g.vertex_labels() | g.edge_labels():
        if label in RESERVED_LABELS:
            raise InputError(f"Graph uses the reserved padding label {_display(label)!r}")


def bijection_cost(c1: LabeledGraph, c2: LabeledGraph, f: Dict[str, str], costs: EditCostTables) -> Fraction:
    """c(f) over two complete graphs of equal order."""
    total = sum((costs.vertex(c1.vertex_label(v), c2.vertex_label(f[v])) for v in c1.vertices), Fraction(0))
    for u, v in combinations(c1.vertices, 2):
        total += costs.edge(c1.edge_label(u, v), c2.edge_label(f[u], f[v]))
    return total


def ged_brute_force(
    g1: LabeledGraph,
    g2: LabeledGraph,
    costs: EditCostTables,
    complete_to: Optional[int] = None,
    cap: int = GED_VERTEX_CAP,
) -> GedResult:
    """
    Exact GED: minimum of c(f) over every bijection of the completions.

    Both graphs are completed to |V1| + |V2| vertices unless
    `complete_to` names another order. Ties keep the lexicographically
    least bijection.

    Raises:
        CapExceededError: If the completed order exceeds `cap`.
        InputError: On reserved labels in the inputs or missing cost entries.
    """
    for g in (g1, g2):
        _reject_reserved_labels(g)
    n = g1.num_vertices + g2.num_vertices if complete_to is None else complete_to
    if n < max(g1.num_vertices, g2.num_vertices):
        raise ContractViolationError(f"Cannot complete graphs of {g1.num_vertices} and {g2.num_vertices} vertices to {n}")
    if n > cap:
        raise CapExceededError("completed GED vertices", n, cap)
    c1, c2 = completion(g1, n), completion(g2, n)
    sources = c1.vertices
    best: Optional[Fraction] = None
    best_map: Dict[str, str] = {}
    scanned = 0
    for image in permutations(c2.vertices):
        scanned += 1
        f = dict(zip(sources, image))
        cost = bijection_cost(c1, c2, f, costs)
        if best is None or cost < best:
            best, best_map = cost, f
    logger.debug("ged_brute_force: n=%d, %d bijections, distance %s", n, scanned, best)
    return GedResult(best, best_map, scanned, n)


def validate_cost_metric(costs: EditCostTables) -> AxiomReport:
    """Exact M1-M4 on both cost tables over their labels plus the padding label."""
    vertex = check_metric_table(costs.vertex_labels(), costs.vertex, label="vertexCost")
    edge = check_metric_table(costs.edge_labels(), costs.edge, label="edgeCost")
    return vertex.merge(edge)


# ----------------------------------------------------------------------
# Correspondence
# ----------------------------------------------------------------------

@dataclass
class CorrespondenceContext:
    """Label models derived from the costs, for graphs of at most n vertices."""
    n: int
    costs: EditCostTables
    vertex_model: FiniteMcsModel
    edge_model: FiniteMcsModel
    vertex_index: Dict[DerivedElement, str] = field(repr=False)
    edge_index: Dict[DerivedElement, str] = field(repr=False)

    @property
    def order(self) -> int:
        """Order of the complete graphs forming the model's domain."""
        return 2 * self.n


def build_correspondence(
    n: int,
    costs: EditCostTables,
    theta_offset: Union[Fraction, int, str] = 1,
    cap: int = COMPLETE_VERTEX_CAP,
) -> CorrespondenceContext:
    """
    Build the label MCS models for graphs with at most n vertices.

    Raises:
        InputError: If the costs are not metrics on their label sets.
        CapExceededError: If 2n exceeds `cap` or a label set is too large.
    """
    if n < 0:
        raise ContractViolationError("n must be nonnegative")
    if 2 * n > cap:
        raise CapExceededError("completed graph vertices (2n)", 2 * n, cap)
    report = validate_cost_metric(costs)
    if not report.passed:
        violation = report.violations[0]
        raise InputError(
            f"{violation.detail} is not a metric: {violation.tag.value} fails at "
            f"({', '.join(_display(x) for x in violation.witness)})"
        )
    models = []
    for kind, labels, cost, label_cap in (
        ("vertex", costs.vertex_labels(), costs.vertex, CORRESPONDENCE_VERTEX_LABEL_CAP),
        ("edge", costs.edge_labels(), costs.edge, CORRESPONDENCE_EDGE_LABEL_CAP),
    ):
        if len(labels) > label_cap:
            raise CapExceededError(f"{kind} labels including padding", len(labels), label_cap)
        space = FiniteMetricSpace(labels, [[cost(a, b) for b in labels] for a in labels])
        models.append(build_model(space, theta_offset))
    (vertex_model, vertex_index), (edge_model, edge_index) = models
    logger.debug("build_correspondence: n=%d, |X_V|=%d, |X_E|=%d", n, len(vertex_model), len(edge_model))
    return CorrespondenceContext(n, costs, vertex_model, edge_model, vertex_index, edge_index)


def embed(ctx: CorrespondenceContext, g: LabeledGraph) -> LabeledGraph:
    """The complete 2n-vertex graph representing g in the correspondence model."""
    if g.num_vertices > ctx.n:
        raise ContractViolationError(f"Graph has {g.num_vertices} vertices, the context allows {ctx.n}")
    _reject_reserved_labels(g)
    x = completion(g, ctx.order)
    for label in x.vertex_labels():
        if label not in ctx.vertex_model:
            raise InputError(f"Vertex label {label!r} has no cost entry")
    for label in x.edge_labels():
        if label not in ctx.edge_model:
            raise InputError(f"Edge label {label!r} has no cost entry")
    return x


def _require_complete(ctx: CorrespondenceContext, x: LabeledGraph) -> None:
    if x.num_vertices != ctx.order or not x.is_complete():
        raise ContractViolationError(f"Expected a complete graph on {ctx.order} vertices, got {x!r}")
    if x.num_vertices > COMPLETE_VERTEX_CAP:
        raise CapExceededError("complete graph vertices", x.num_vertices, COMPLETE_VERTEX_CAP)


def _common_scores(ctx: CorrespondenceContext, x1: LabeledGraph, x2: LabeledGraph) -> Iterator[Tuple[Dict[str, str], Fraction]]:
    """Each bijection x1 -> x2 with the size of its label-wise maximum common graph."""
    vm, em = ctx.vertex_model, ctx.edge_model
    sources = x1.vertices
    for image in permutations(x2.vertices):
        phi = dict(zip(sources, image))
        total = sum((max_common_size(vm, x1.vertex_label(v), x2.vertex_label(phi[v])) for v in sources), Fraction(0))
        for u, v in combinations(sources, 2):
            total += max_common_size(em, x1.edge_label(u, v), x2.edge_label(phi[u], phi[v]))
        yield phi, total


def mcs_size_on_complete(ctx: CorrespondenceContext, x1: LabeledGraph, x2: LabeledGraph) -> Fraction:
    """s'({x1, x2}) in the correspondence model, by scanning all bijections."""
    _require_complete(ctx, x1)
    _require_complete(ctx, x2)
    return max(score for _, score in _common_scores(ctx, x1, x2))


def per_bijection_identity(ctx: CorrespondenceContext, g1: LabeledGraph, g2: LabeledGraph) -> AxiomReport:
    """Check c(f) = s(x1) + s(x2) - 2 s(x_f) for every bijection f of the 2n-completions."""
    x1, x2 = embed(ctx, g1), embed(ctx, g2)
    s1 = size_ges(x1, ctx.vertex_model, ctx.edge_model)
    s2 = size_ges(x2, ctx.vertex_model, ctx.edge_model)
    violations = []
    for phi, common in _common_scores(ctx, x1, x2):
        cost = bijection_cost(x1, x2, phi, ctx.costs)
        if cost != s1 + s2 - 2 * common:
            violations.append(Violation(
                AxiomTag.GED_IDENTITY,
                tuple(f"{v}->{w}" for v, w in sorted(phi.items())),
                f"c(f) = {format_rational(cost)}, model side {format_rational(s1 + s2 - 2 * common)}",
            ))
    return AxiomReport(violations)


@dataclass
class GedCorrespondenceReport:
    """Both sides of GED = d_a for one graph pair, plus the supporting checks."""
    ged: GedResult
    model_distance: Fraction
    common_size: Fraction
    identity: AxiomReport
    stable_distance: Fraction

    @property
    def equal(self) -> bool:
        return self.ged.distance == self.model_distance

    @property
    def stable(self) -> bool:
        return self.ged.distance == self.stable_distance

    @property
    def passed(self) -> bool:
        return self.equal and self.stable and self.identity.passed

    def to_dict(self) -> Dict:
        return {
            "passed": self.passed,
            "ged": format_rational(self.ged.distance),
            "modelDistance": format_rational(self.model_distance),
            "commonSize": format_rational(self.common_size),
            "stableGed": format_rational(self.stable_distance),
            "bestBijection": dict(sorted(self.ged.best_bijection.items())),
            "identity": self.identity.to_dict(),
        }


def verify_ged_correspondence(ctx: CorrespondenceContext, g1: LabeledGraph, g2: LabeledGraph) -> GedCorrespondenceReport:
    """Compute GED and s(x1) + s(x2) - 2 s'(x1, x2) independently and compare."""
    ged = ged_brute_force(g1, g2, ctx.costs)
    x1, x2 = embed(ctx, g1), embed(ctx, g2)
    s1 = size_ges(x1, ctx.vertex_model, ctx.edge_model)
    s2 = size_ges(x2, ctx.vertex_model, ctx.edge_model)
    common = mcs_size_on_complete(ctx, x1, x2)
    stable = ged_brute_force(g1, g2, ctx.costs, complete_to=ctx.order, cap=max(GED_VERTEX_CAP, ctx.order))
    report = GedCorrespondenceReport(ged, s1 + s2 - 2 * common, common, per_bijection_identity(ctx, g1, g2), stable.distance)
    if not report.passed:
        logger.warning("GED correspondence fails for %r vs %r: %s", g1, g2, report.to_dict())
    return report


def verify_ged_correspondence_all(ctx: CorrespondenceContext, graphs: Sequence[LabeledGraph]) -> List[Tuple[int, int, GedCorrespondenceReport]]:
    """verify_ged_correspondence on every unordered pair (i <= j) of `graphs`."""
    return [
        (i, j, verify_ged_correspondence(ctx, graphs[i], graphs[j]))
        for i in range(len(graphs)) for j in range(i, len(graphs))
    ]
