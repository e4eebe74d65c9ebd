"""
Metric Space to MCS Model

Builds, for any finite metric space (Σ, d), an explicit MCS model whose
d_a restricted to Σ recovers d. Elements are the points plus every
nonempty set of point pairs that forms a connected subgraph of the
complete graph on Σ. Edge sets sit below the points they touch and
below their own subsets; sizes are R for points and R minus half the
summed distances of the pairs for edge sets, with
R = θ + ½ Σ d over all pairs.
"""

import json
import logging
import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from pathlib import Path
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple, Union

import networkx as nx

from .core_model import (
    AxiomReport,
    AxiomTag,
    FiniteMcsModel,
    Violation,
    check_metric_table,
    max_common_size,
    max_common_subelements,
)
from .errors import CapExceededError, InputError
from .rational import format_rational, parse_rational

logger = logging.getLogger(__name__)

METRIC_POINT_CAP = 6

Pair = Tuple[str, str]


@dataclass
class FiniteMetricSpace:
    """
    Points plus an exact distance table.

    `dist[i][j]` is the distance between points[i] and points[j];
    the table is validated against M1-M4 on construction.
    """
    points: List[str]
    dist: List[List[Fraction]]

    def __post_init__(self):
        self.points = [str(p) for p in self.points]
        if len(set(self.points)) != len(self.points):
            raise InputError("Metric space has duplicate point identifiers")
        n = len(self.points)
        if len(self.dist) != n or any(len(row) != n for row in self.dist):
            raise InputError(f"Distance table must be {n}x{n}")
        self.dist = [[parse_rational(value) for value in row] for row in self.dist]
        self._index = {p: i for i, p in enumerate(self.points)}
        report = check_metric_table(self.points, self.d)
        if not report.passed:
            violation = report.violations[0]
            raise InputError(
                f"Distance table violates {violation.tag.value} at ({', '.join(violation.witness)})"
            )

    def d(self, a: str, b: str) -> Fraction:
        return self.dist[self._index[a]][self._index[b]]

    def to_dict(self) -> Dict:
        return {
            "points": list(self.points),
            "dist": [[format_rational(value) for value in row] for row in self.dist],
        }

    @classmethod
    def from_dict(cls, data: Dict) -> "FiniteMetricSpace":
        try:
            return cls(list(data["points"]), [list(row) for row in data["dist"]])
        except (KeyError, TypeError) as e:
            raise InputError(f"Metric space document is malformed: {e}")

    @classmethod
    def load(cls, path: Union[str, Path]) -> "FiniteMetricSpace":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            raise InputError(f"Cannot read metric space {path}: {e}")
        return cls.from_dict(data)


@dataclass(frozen=True)
class DerivedElement:
    """Either a single point or a connected edge set (pairs stored sorted)."""
    point: Optional[str] = None
    edges: FrozenSet[Pair] = frozenset()

    @classmethod
    def of_point(cls, point: str) -> "DerivedElement":
        return cls(point=point)

    @classmethod
    def of_edges(cls, edges) -> "DerivedElement":
        return cls(edges=frozenset(tuple(sorted(pair)) for pair in edges))

    @property
    def is_point(self) -> bool:
        return self.point is not None

    def endpoints(self) -> FrozenSet[str]:
        return frozenset(p for pair in self.edges for p in pair)

    @property
    def identifier(self) -> str:
        if self.is_point:
            return self.point
        return "{" + ";".join(f"{a}|{b}" for a, b in sorted(self.edges)) + "}"


def _check_points(points: Sequence[str], cap: int) -> None:
    if len(points) > cap:
        raise CapExceededError("metric space points", len(points), cap)


def enumerate_connected_edge_subsets(points: Sequence[str], cap: int = METRIC_POINT_CAP) -> List[DerivedElement]:
    """
    All nonempty edge subsets of the complete graph on `points` whose edges form a connected graph.

    Ordered by bitmask over the pairs in (i, j) order.
    """
    _check_points(points, cap)
    pairs = [tuple(sorted(pair)) for pair in combinations(points, 2)]
    found = []
    for mask in range(1, 1 << len(pairs)):
        chosen = [pairs[k] for k in range(len(pairs)) if mask >> k & 1]
        if nx.is_connected(nx.Graph(chosen)):
            found.append(DerivedElement.of_edges(chosen))
    logger.debug("%d connected edge subsets over %d points", len(found), len(points))
    return found


def build_model(
    space: FiniteMetricSpace,
    theta_offset: Union[Fraction, int, str] = 1,
    cap: int = METRIC_POINT_CAP,
) -> Tuple[FiniteMcsModel, Dict[DerivedElement, str]]:
    """
    Construct the MCS model recovering `space` through d_a.

    Args:
        space: A validated finite metric space.
        theta_offset: Size of the full edge set; must be positive.

    Returns:
        The model and the index DerivedElement -> element identifier.

    Raises:
        InputError: If theta_offset is not positive or an edge-set identifier collides with a point.
        CapExceededError: If the space has more than `cap` points.
    """
    theta = parse_rational(theta_offset)
    if theta <= 0:
        raise InputError(f"theta_offset must be positive, got {format_rational(theta)}")
    points = space.points
    edge_sets = enumerate_connected_edge_subsets(points, cap)
    half_total = sum((space.d(a, b) for a, b in combinations(points, 2)), Fraction(0)) / 2
    top = theta + half_total

    index: Dict[DerivedElement, str] = {}
    sizes: Dict[str, Fraction] = {}
    for p in points:
        element = DerivedElement.of_point(p)
        index[element] = element.identifier
        sizes[p] = top
    for element in edge_sets:
        ident = element.identifier
        if ident in sizes:
            raise InputError(f"Edge-set identifier {ident!r} collides with a point identifier")
        index[element] = ident
        sizes[ident] = top - sum((space.d(a, b) for a, b in element.edges), Fraction(0)) / 2

    order = [(x, x) for x in sizes]
    for element in edge_sets:
        for p in sorted(element.endpoints()):
            order.append((element.identifier, p))
        for other in edge_sets:
            if other != element and element.edges >= other.edges:
                order.append((element.identifier, other.identifier))

    elements = list(points) + [element.identifier for element in edge_sets]
    model = FiniteMcsModel(elements, order, sizes)
    logger.debug("build_model: %d points, %d edge sets, R = %s", len(points), len(edge_sets), format_rational(top))
    return model, index


def verify_recovery(space: FiniteMetricSpace, model: FiniteMcsModel, index: Dict[DerivedElement, str]) -> AxiomReport:
    """
    Check d(a, b) = s(a) + s(b) - 2 s'(a, b) for every point pair, and
    that the single edge {a, b} is among the maximum common subelements.
    """
    violations = []
    for a, b in combinations(space.points, 2):
        recovered = model.size(a) + model.size(b) - 2 * max_common_size(model, a, b)
        if recovered != space.d(a, b):
            violations.append(Violation(
                AxiomTag.RECOVERY,
                (a, b),
                f"expected {format_rational(space.d(a, b))}, recovered {format_rational(recovered)}",
            ))
        single = index.get(DerivedElement.of_edges([(a, b)]))
        if single is None or single not in max_common_subelements(model, a, b):
            violations.append(Violation(AxiomTag.EDGE_WITNESS, (a, b)))
    return AxiomReport(violations)


def random_metric_space(
    n: int,
    rng: Optional[random.Random] = None,
    max_weight: int = 6,
    max_denominator: int = 4,
) -> FiniteMetricSpace:
    """
    Random rational metric space on points p0..p(n-1).

    Distances are shortest-path lengths over K_n with random positive
    rational edge weights, so the triangle inequality holds exactly.
    """
    rng = rng or random.Random(0)
    points = [f"p{i}" for i in range(n)]
    weighted = nx.complete_graph(points)
    for u, v in weighted.edges:
        weighted[u][v]["weight"] = Fraction(rng.randint(1, max_weight * max_denominator), rng.randint(1, max_denominator))
    lengths = dict(nx.all_pairs_dijkstra_path_length(weighted, weight="weight"))
    dist = [[Fraction(lengths[a][b]) for b in points] for a in points]
    return FiniteMetricSpace(points, dist)
