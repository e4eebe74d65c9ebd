"""
Exact MCS Solvers for Graph Models

s' and mcs for the three graph MCS models:
- S: subgraph isomorphism, size = weighted vertices + edges
- I: induced subgraph isomorphism, size = weighted vertices
- E: extended subgraph isomorphism, size = sum of label-model sizes

Each kind has a brute-force oracle (small graphs only) and an optimized
exact solver: maximum weight clique on the modular product for I,
branch-and-bound over partial vertex maps for S and E.
"""

import json
import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from math import lcm
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import networkx as nx
from networkx.algorithms.isomorphism import GraphMatcher

from .core_model import FiniteMcsModel, MetricKind, max_common_size, max_common_subelements, metric_value
from .errors import CapExceededError, InputError, McsError
from .graphs import (
    CANONICAL_CAP_MAX,
    Embedding,
    EmbeddingKind,
    LabeledGraph,
    LabelWeighting,
    canonical_form,
    induced_subgraph_isomorphic,
    iter_subgraphs,
    require_labels_in,
    size_ges,
    size_gv,
    size_gve,
    subgraph_isomorphic,
)
from .rational import format_rational

logger = logging.getLogger(__name__)

BRUTE_FORCE_CAP = 6
DEFAULT_SOLVER_CAP = 12
SOLVER_CAP_MAX = 16
WITNESS_CAP = 16


class GraphModelKind(Enum):
    """Which graph MCS model to use."""
    S = "S"  # subgraph, size_gve
    I = "I"  # induced subgraph, size_gv
    E = "E"  # extended subgraph, size_ges

    @classmethod
    def parse(cls, text: str) -> "GraphModelKind":
        try:
            return cls(text.strip().upper())
        except ValueError:
            raise InputError(f"Unknown graph model kind: {text!r} (expected S, I or E)")

    @property
    def embedding_kind(self) -> EmbeddingKind:
        return {
            GraphModelKind.S: EmbeddingKind.SUBGRAPH,
            GraphModelKind.I: EmbeddingKind.INDUCED,
            GraphModelKind.E: EmbeddingKind.EXTENDED,
        }[self]


@dataclass
class SolverParams:
    """
    Parameters for the graph solvers.

    Kinds S and I need `alpha`; kind E needs both label models.
    """
    alpha: Optional[LabelWeighting] = None
    vertex_model: Optional[FiniteMcsModel] = None
    edge_model: Optional[FiniteMcsModel] = None
    cap_vertices: int = DEFAULT_SOLVER_CAP
    witness_cap: int = WITNESS_CAP

    @classmethod
    def uniform(cls, graphs: Sequence[LabeledGraph], **kwargs) -> "SolverParams":
        """α ≡ 1 over every vertex and edge label observed in `graphs`."""
        labels = set()
        for g in graphs:
            labels |= g.vertex_labels() | g.edge_labels()
        return cls(alpha=LabelWeighting.uniform(sorted(labels)), **kwargs)

    def to_dict(self) -> Dict:
        data: Dict = {"capVertices": self.cap_vertices, "witnessCap": self.witness_cap}
        if self.alpha is not None:
            data["alpha"] = self.alpha.to_dict()
        if self.vertex_model is not None:
            data["vertexModel"] = self.vertex_model.to_dict()
        if self.edge_model is not None:
            data["edgeModel"] = self.edge_model.to_dict()
        return data

    @classmethod
    def from_dict(cls, data: Dict, close_order: bool = False) -> "SolverParams":
        if not isinstance(data, dict):
            raise InputError("Solver parameters must be a JSON object")
        alpha = LabelWeighting.from_dict(data["alpha"]) if "alpha" in data else None
        vertex_model = FiniteMcsModel.from_dict(data["vertexModel"], close_order) if "vertexModel" in data else None
        edge_model = FiniteMcsModel.from_dict(data["edgeModel"], close_order) if "edgeModel" in data else None
        return cls(
            alpha=alpha,
            vertex_model=vertex_model,
            edge_model=edge_model,
            cap_vertices=_count_field(data, "capVertices", DEFAULT_SOLVER_CAP),
            witness_cap=_count_field(data, "witnessCap", WITNESS_CAP),
        )

    @classmethod
    def load(cls, path: Union[str, Path], close_order: bool = False) -> "SolverParams":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            raise InputError(f"Cannot read solver parameters {path}: {e}")
        return cls.from_dict(data, close_order)


def _count_field(data: Dict, key: str, default: int) -> int:
    value = data.get(key, default)
    if isinstance(value, str) and value.isdigit():
        value = int(value)
    if isinstance(value, bool) or not isinstance(value, int) or value < 0:
        raise InputError(f"{key} must be a non-negative integer, got {value!r}")
    return value


@dataclass(frozen=True)
class Witness:
    """A maximum common subgraph with one embedding into each input graph."""
    graph: LabeledGraph
    into_g1: Embedding
    into_g2: Embedding
    form: bytes

    def to_dict(self) -> Dict:
        return {
            "graph": self.graph.to_dict(),
            "intoG1": self.into_g1.as_dict(),
            "intoG2": self.into_g2.as_dict(),
        }


@dataclass
class McsResult:
    """Outcome of an MCS computation."""
    best_size: Fraction
    witnesses: List[Witness] = field(default_factory=list)
    nodes_explored: int = 0
    truncated: bool = False

    def to_dict(self) -> Dict:
        return {
            "bestSize": format_rational(self.best_size),
            "witnessCount": len(self.witnesses),
            "witnesses": [w.to_dict() for w in self.witnesses],
            "nodesExplored": self.nodes_explored,
            "truncated": self.truncated,
        }


class _WitnessPool:
    """Keeps the witnesses of the best size found so far, smallest canonical forms first."""

    def __init__(self, cap: int):
        self.cap = max(1, cap)
        self.best: Optional[Fraction] = None
        self.truncated = False
        self._by_form: Dict[bytes, Witness] = {}
        self._forms: Dict[object, bytes] = {}

    @property
    def full(self) -> bool:
        return len(self._by_form) >= self.cap

    def beats(self, bound: Fraction) -> bool:
        """
        Whether a subtree with this upper bound can still change the result.

        Ties are explored even when the pool is full: they may hold a
        smaller canonical form, and they decide `truncated`.
        """
        return self.best is None or bound >= self.best

    def offer(self, size: Fraction, graph: LabeledGraph, into_g1: Embedding, into_g2: Embedding, key=None) -> None:
        if self.best is not None and size < self.best:
            return
        form = self._forms.get(key) if key is not None else None
        if form is None:
            form = canonical_form(graph, cap=CANONICAL_CAP_MAX)
            if key is not None:
                self._forms[key] = form
        if self.best is None or size > self.best:
            self.best = size
            self._by_form = {}
            self.truncated = False
        if form in self._by_form:
            return
        if not self.full:
            self._by_form[form] = Witness(graph, into_g1, into_g2, form)
            return
        self.truncated = True
        largest = max(self._by_form)
        if form < largest:
            del self._by_form[largest]
            self._by_form[form] = Witness(graph, into_g1, into_g2, form)

    def result(self, nodes_explored: int) -> McsResult:
        if self.truncated:
            logger.warning("Witness list truncated to %d entries", self.cap)
        witnesses = [self._by_form[form] for form in sorted(self._by_form)]
        return McsResult(self.best or Fraction(0), witnesses, nodes_explored, self.truncated)


# ----------------------------------------------------------------------
# Sizes and parameter checks
# ----------------------------------------------------------------------

def graph_size(kind: GraphModelKind, g: LabeledGraph, params: SolverParams) -> Fraction:
    """Size of g under the kind's size function."""
    if kind is GraphModelKind.S:
        return size_gve(g, _require_alpha(params))
    if kind is GraphModelKind.I:
        return size_gv(g, _require_alpha(params))
    v_model, e_model = _require_label_models(params)
    return size_ges(g, v_model, e_model)


def _require_alpha(params: SolverParams) -> LabelWeighting:
    if params.alpha is None:
        raise InputError("Kinds S and I need a label weighting (alpha)")
    return params.alpha


def _require_label_models(params: SolverParams) -> Tuple[FiniteMcsModel, FiniteMcsModel]:
    if params.vertex_model is None or params.edge_model is None:
        raise InputError("Kind E needs a vertex label model and an edge label model")
    for name, model in (("vertex", params.vertex_model), ("edge", params.edge_model)):
        for x in model.elements:
            if model.size(x) <= 0:
                raise InputError(
                    f"Element {x!r} of the {name} label model has size {format_rational(model.size(x))}; "
                    "label sizes must be strictly positive"
                )
    return params.vertex_model, params.edge_model


def _check_inputs(kind: GraphModelKind, g1: LabeledGraph, g2: LabeledGraph, params: SolverParams, cap: int) -> None:
    for g in (g1, g2):
        if g.num_vertices > cap:
            raise CapExceededError("graph vertices", g.num_vertices, cap)
    if kind is GraphModelKind.E:
        v_model, e_model = _require_label_models(params)
        require_labels_in(g1, v_model, e_model)
        require_labels_in(g2, v_model, e_model)
    # Also validates that every label has a weight.
    graph_size(kind, g1, params)
    graph_size(kind, g2, params)


def _identity(g: LabeledGraph, kind: EmbeddingKind) -> Embedding:
    return Embedding.from_mapping({v: v for v in g.vertices}, kind)


# ----------------------------------------------------------------------
# Brute force
# ----------------------------------------------------------------------

def mcs_brute_force(kind: GraphModelKind, g1: LabeledGraph, g2: LabeledGraph, params: SolverParams) -> McsResult:
    """
    Exhaustive oracle: enumerate subgraphs of g1 and test each against g2.

    Raises:
        CapExceededError: If either graph has more than BRUTE_FORCE_CAP vertices.
        InputError: On missing weights / labels or non-positive label sizes.
    """
    _check_inputs(kind, g1, g2, params, BRUTE_FORCE_CAP)
    if kind is GraphModelKind.E:
        result = _brute_force_extended(g1, g2, params)
    else:
        result = _brute_force_exact_labels(kind, g1, g2, params)
    logger.debug("mcs_brute_force %s: best %s, %d candidates", kind.value, result.best_size, result.nodes_explored)
    return result


def _brute_force_exact_labels(kind: GraphModelKind, g1: LabeledGraph, g2: LabeledGraph, params: SolverParams) -> McsResult:
    induced = kind is GraphModelKind.I
    embeds_into = induced_subgraph_isomorphic if induced else subgraph_isomorphic
    pool = _WitnessPool(params.witness_cap)
    seen = set()
    explored = 0
    for h in iter_subgraphs(g1, induced=induced):
        form = canonical_form(h, cap=CANONICAL_CAP_MAX)
        if form in seen:
            continue
        seen.add(form)
        explored += 1
        size = graph_size(kind, h, params)
        if pool.best is not None and size < pool.best:
            continue
        into_g2 = embeds_into(h, g2)
        if into_g2 is not None:
            pool.offer(size, h, _identity(h, kind.embedding_kind), into_g2)
    return pool.result(explored)


def _structure(g: LabeledGraph) -> nx.Graph:
    return nx.Graph(g.graph)


def _brute_force_extended(g1: LabeledGraph, g2: LabeledGraph, params: SolverParams) -> McsResult:
    v_model, e_model = _require_label_models(params)
    pool = _WitnessPool(params.witness_cap)
    host = _structure(g2)
    explored = 0
    for h in iter_subgraphs(g1):
        if pool.best is not None and size_ges(h, v_model, e_model) < pool.best:
            continue
        if h.is_empty():
            mappings = [{}]
        else:
            matcher = GraphMatcher(host, _structure(h))
            mappings = (
                {p: w for w, p in host_to_pattern.items()}
                for host_to_pattern in matcher.subgraph_monomorphisms_iter()
            )
        for psi in mappings:
            explored += 1
            vertex_labels = {v: max_common_subelements(v_model, h.vertex_label(v), g2.vertex_label(psi[v]))[0] for v in h.vertices}
            edge_labels = {
                (u, v): max_common_subelements(e_model, h.edge_label(u, v), g2.edge_label(psi[u], psi[v]))[0]
                for u, v in h.edges
            }
            size = sum((v_model.size(x) for x in vertex_labels.values()), Fraction(0))
            size += sum((e_model.size(x) for x in edge_labels.values()), Fraction(0))
            if pool.best is not None and size < pool.best:
                continue
            witness = h.relabel(vertex_labels, edge_labels)
            pool.offer(
                size,
                witness,
                _identity(witness, EmbeddingKind.EXTENDED),
                Embedding.from_mapping(psi, EmbeddingKind.EXTENDED),
            )
    return pool.result(explored)


# ----------------------------------------------------------------------
# Optimized solvers
# ----------------------------------------------------------------------

def mcs_solve(kind: GraphModelKind, g1: LabeledGraph, g2: LabeledGraph, params: SolverParams) -> McsResult:
    """
    Exact MCS with the optimized solver for the kind.

    Raises:
        CapExceededError: If either graph exceeds params.cap_vertices.
        InputError: On missing weights / labels or non-positive label sizes.
    """
    cap = max(0, min(SOLVER_CAP_MAX, params.cap_vertices))
    _check_inputs(kind, g1, g2, params, cap)
    if kind is GraphModelKind.I:
        result = _solve_induced(g1, g2, params)
    else:
        result = _BranchAndBound(kind, g1, g2, params).run()
    logger.debug("mcs_solve %s: best %s, %d nodes explored", kind.value, result.best_size, result.nodes_explored)
    return result


def _modular_product(g1: LabeledGraph, g2: LabeledGraph, alpha: LabelWeighting) -> nx.Graph:
    """Labeled modular product; cliques are common induced subgraphs."""
    product = nx.Graph()
    pairs = [
        (v, w) for v in g1.vertices for w in g2.vertices
        if g1.vertex_label(v) == g2.vertex_label(w)
    ]
    scale = lcm(*(alpha.weight(g1.vertex_label(v)).denominator for v, _ in pairs)) if pairs else 1
    for v, w in pairs:
        product.add_node((v, w), weight=int(alpha.weight(g1.vertex_label(v)) * scale))
    for i, (v, w) in enumerate(pairs):
        for x, y in pairs[i + 1:]:
            if v == x or w == y:
                continue
            e1, e2 = g1.has_edge(v, x), g2.has_edge(w, y)
            if e1 != e2:
                continue
            if e1 and g1.edge_label(v, x) != g2.edge_label(w, y):
                continue
            product.add_edge((v, w), (x, y))
    product.graph["scale"] = scale
    return product


def _solve_induced(g1: LabeledGraph, g2: LabeledGraph, params: SolverParams) -> McsResult:
    alpha = _require_alpha(params)
    product = _modular_product(g1, g2, alpha)
    pool = _WitnessPool(params.witness_cap)
    if product.number_of_nodes() == 0:
        cliques = [[]]
    else:
        # Weights are positive, so every maximum-weight clique is maximal.
        _, best = nx.max_weight_clique(product, weight="weight")
        weights = dict(product.nodes(data="weight"))
        cliques = (c for c in nx.find_cliques(product) if sum(weights[p] for p in c) == best)
    for clique in cliques:
        phi = dict(sorted(clique))
        witness = g1.induced_subgraph(phi)
        pool.offer(
            size_gv(witness, alpha),
            witness,
            _identity(witness, EmbeddingKind.INDUCED),
            Embedding.from_mapping(phi, EmbeddingKind.INDUCED),
        )
    return pool.result(product.number_of_nodes())


class _BranchAndBound:
    """
    Branch-and-bound over partial vertex maps for kinds S and E.

    g1 vertices are decided in sorted order: mapped to an unused
    compatible g2 vertex (tried in sorted order) or left out. Each
    matched vertex and each edge between matched vertices contributes
    its gain; the bound is the smaller of two admissible estimates, one
    from the undecided g1 side and one from the unused g2 side.
    """

    def __init__(self, kind: GraphModelKind, g1: LabeledGraph, g2: LabeledGraph, params: SolverParams):
        self.g1, self.g2 = g1, g2
        self.order = g1.vertices
        self.targets = g2.vertices
        self.pool = _WitnessPool(params.witness_cap)
        self.nodes = 0
        if kind is GraphModelKind.S:
            alpha = _require_alpha(params)
            self.vertex_gain = _ExactGain(alpha)
            self.edge_gain = _ExactGain(alpha)
            self.witness_kind = EmbeddingKind.SUBGRAPH
        else:
            v_model, e_model = _require_label_models(params)
            self.vertex_gain = _ModelGain(v_model)
            self.edge_gain = _ModelGain(e_model)
            self.witness_kind = EmbeddingKind.EXTENDED
        self._vgain = {
            (v, w): self.vertex_gain(g1.vertex_label(v), g2.vertex_label(w))
            for v in self.order for w in self.targets
        }
        self._best_edge_g1 = {
            e: max((self._pair_edge_gain(e, f) or Fraction(0) for f in g2.edges), default=Fraction(0))
            for e in g1.edges
        }
        self._best_edge_g2 = {
            f: max((self._pair_edge_gain(e, f) or Fraction(0) for e in g1.edges), default=Fraction(0))
            for f in g2.edges
        }
        self.phi: Dict[str, str] = {}
        self.skipped = set()
        self.used = set()

    def _pair_edge_gain(self, e1: Tuple[str, str], e2: Tuple[str, str]) -> Optional[Fraction]:
        return self.edge_gain(self.g1.edge_label(*e1), self.g2.edge_label(*e2))

    def run(self) -> McsResult:
        self._search(0, Fraction(0))
        return self.pool.result(self.nodes)

    def _bound(self, depth: int) -> Fraction:
        undecided = self.order[depth:]
        free = [w for w in self.targets if w not in self.used]
        side1 = sum(
            (max((self._vgain[v, w] or Fraction(0) for w in free), default=Fraction(0)) for v in undecided),
            Fraction(0),
        )
        open1 = set(undecided)
        side1 += sum(
            (gain for (u, v), gain in self._best_edge_g1.items()
             if (u in open1 or v in open1) and u not in self.skipped and v not in self.skipped),
            Fraction(0),
        )
        side2 = sum(
            (max((self._vgain[v, w] or Fraction(0) for v in undecided), default=Fraction(0)) for w in free),
            Fraction(0),
        )
        open2 = set(free)
        side2 += sum(
            (gain for (x, y), gain in self._best_edge_g2.items() if x in open2 or y in open2),
            Fraction(0),
        )
        return min(side1, side2)

    def _search(self, depth: int, score: Fraction) -> None:
        self.nodes += 1
        if depth == len(self.order):
            self._record(score)
            return
        if not self.pool.beats(score + self._bound(depth)):
            return
        v = self.order[depth]
        for w in self.targets:
            if w in self.used:
                continue
            gain = self._vgain[v, w]
            if gain is None:
                continue
            added = gain
            for u, x in self.phi.items():
                if self.g1.has_edge(u, v) and self.g2.has_edge(x, w):
                    edge = self.edge_gain(self.g1.edge_label(u, v), self.g2.edge_label(x, w))
                    if edge is not None:
                        added += edge
            self.phi[v] = w
            self.used.add(w)
            self._search(depth + 1, score + added)
            self.used.discard(w)
            del self.phi[v]
        self.skipped.add(v)
        self._search(depth + 1, score)
        self.skipped.discard(v)

    def _record(self, score: Fraction) -> None:
        if self.pool.best is not None and score < self.pool.best:
            return
        g1, g2, phi = self.g1, self.g2, self.phi
        vertex_labels = {v: self.vertex_gain.label(g1.vertex_label(v), g2.vertex_label(w)) for v, w in phi.items()}
        edges = []
        for u, v in g1.edges:
            if u in phi and v in phi and g2.has_edge(phi[u], phi[v]):
                if self.edge_gain(g1.edge_label(u, v), g2.edge_label(phi[u], phi[v])) is not None:
                    edges.append((u, v, self.edge_gain.label(g1.edge_label(u, v), g2.edge_label(phi[u], phi[v]))))
        witness = LabeledGraph(vertex_labels, edges)
        key = (tuple(sorted(vertex_labels.items())), tuple(edges))
        self.pool.offer(
            score,
            witness,
            _identity(witness, self.witness_kind),
            Embedding.from_mapping(phi, self.witness_kind),
            key=key,
        )


class _ExactGain:
    """Gain for exact label matching: α(label) when labels agree, else None."""

    def __init__(self, alpha: LabelWeighting):
        self.alpha = alpha

    def __call__(self, a: str, b: str) -> Optional[Fraction]:
        return self.alpha.weight(a) if a == b else None

    def label(self, a: str, b: str) -> str:
        return a


class _ModelGain:
    """Gain for label-model matching: s'(a, b), memoized per pair."""

    def __init__(self, model: FiniteMcsModel):
        self.model = model
        self._memo: Dict[Tuple[str, str], Tuple[Fraction, str]] = {}

    def _lookup(self, a: str, b: str) -> Tuple[Fraction, str]:
        if (a, b) not in self._memo:
            self._memo[a, b] = (max_common_size(self.model, a, b), max_common_subelements(self.model, a, b)[0])
        return self._memo[a, b]

    def __call__(self, a: str, b: str) -> Optional[Fraction]:
        return self._lookup(a, b)[0]

    def label(self, a: str, b: str) -> str:
        return self._lookup(a, b)[1]


# ----------------------------------------------------------------------
# Distances
# ----------------------------------------------------------------------

def graph_distance(
    kind: GraphModelKind,
    metric: MetricKind,
    g1: LabeledGraph,
    g2: LabeledGraph,
    params: SolverParams,
    solver: Callable[..., McsResult] = mcs_solve,
) -> Fraction:
    """metric(size(g1), size(g2), s'(g1, g2)) under the chosen graph model."""
    result = solver(kind, g1, g2, params)
    return metric_value(metric, graph_size(kind, g1, params), graph_size(kind, g2, params), result.best_size)


def distance_matrix(
    kind: GraphModelKind,
    metric: MetricKind,
    graphs: Sequence[LabeledGraph],
    params: SolverParams,
) -> List[List[Fraction]]:
    """
    Symmetric matrix of graph distances with a zero diagonal.

    Raises:
        McsError: Any solver error, with `pair` set to the failing cell.
    """
    n = len(graphs)
    matrix = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            try:
                value = graph_distance(kind, metric, graphs[i], graphs[j], params)
            except McsError as e:
                raise e.with_pair(i, j)
            matrix[i][j] = matrix[j][i] = value
    logger.debug("distance_matrix: %d graphs, kind %s, metric %s", n, kind.value, metric.value)
    return matrix
