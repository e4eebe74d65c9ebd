"""
Labeled Graphs and Subgraph Relations

Finite undirected simple graphs with one label per vertex and per edge,
and the three orders used by the graph MCS models:
- subgraph isomorphic (⊆), non-induced, exact labels
- induced subgraph isomorphic (⊆ᵢ)
- extended subgraph isomorphic (⊆ₑ), labels compared in label MCS models

Isomorphic graphs are treated as the same graph; canonical_form gives
the byte string used as that equality.
"""

import json
import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from itertools import combinations, product
from pathlib import Path
from typing import Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

import networkx as nx
from networkx.algorithms.isomorphism import GraphMatcher

from .core_model import FiniteMcsModel
from .errors import CapExceededError, InputError
from .rational import format_rational, parse_rational

logger = logging.getLogger(__name__)

# Reserved padding labels of graph n-completion; rejected in user documents.
EPS_V = "\u0000V"
EPS_E = "\u0000E"
RESERVED_LABELS = frozenset({EPS_V, EPS_E})

DEFAULT_CANONICAL_CAP = 10
CANONICAL_CAP_MAX = 16

# WL refinement rounds used to split vertices into canonicalization cells.
WL_ITERATIONS = 3


class LabeledGraph:
    """
    A finite undirected simple graph with vertex and edge labels.

    Backed by a frozen networkx.Graph whose nodes and edges carry a
    "label" attribute. Vertex identifiers are strings.

    Example:
        >>> g = LabeledGraph({"u": "a", "v": "b"}, [("u", "v", "x")])
        >>> g.edge_label("v", "u")
        'x'
    """

    def __init__(
        self,
        vertices: Union[Mapping[str, str], Iterable[Tuple[str, str]]] = (),
        edges: Iterable[Tuple[str, str, str]] = (),
    ):
        """
        Build a graph.

        Args:
            vertices: Mapping (or pairs) vertex id -> label.
            edges: Triples (u, v, label).

        Raises:
            InputError: On duplicate vertices, loops, duplicate edges or unknown endpoints.
        """
        items = list(vertices.items()) if isinstance(vertices, Mapping) else list(vertices)
        graph = nx.Graph()
        for vertex, label in items:
            vertex = str(vertex)
            if vertex in graph:
                raise InputError(f"Duplicate vertex {vertex!r}")
            graph.add_node(vertex, label=str(label))
        for u, v, label in edges:
            u, v = str(u), str(v)
            if u == v:
                raise InputError(f"Self-loop on vertex {u!r} is not allowed")
            for endpoint in (u, v):
                if endpoint not in graph:
                    raise InputError(f"Edge ({u!r}, {v!r}) names unknown vertex {endpoint!r}")
            if graph.has_edge(u, v):
                raise InputError(f"Duplicate edge ({u!r}, {v!r})")
            graph.add_edge(u, v, label=str(label))
        self._graph = nx.freeze(graph)

    # ------------------------------------------------------------------
    # Accessors
    # ------------------------------------------------------------------

    @property
    def graph(self) -> nx.Graph:
        """The frozen networkx graph."""
        return self._graph

    @property
    def vertices(self) -> Tuple[str, ...]:
        return tuple(sorted(self._graph.nodes))

    @property
    def edges(self) -> Tuple[Tuple[str, str], ...]:
        return tuple(sorted(_edge_key(u, v) for u, v in self._graph.edges))

    @property
    def num_vertices(self) -> int:
        return self._graph.number_of_nodes()

    @property
    def num_edges(self) -> int:
        return self._graph.number_of_edges()

    def is_empty(self) -> bool:
        return self.num_vertices == 0

    def vertex_label(self, v: str) -> str:
        return self._graph.nodes[v]["label"]

    def edge_label(self, u: str, v: str) -> str:
        return self._graph.edges[u, v]["label"]

    def has_edge(self, u: str, v: str) -> bool:
        return self._graph.has_edge(u, v)

    def vertex_labels(self) -> FrozenSet[str]:
        return frozenset(self.vertex_label(v) for v in self._graph.nodes)

    def edge_labels(self) -> FrozenSet[str]:
        return frozenset(d["label"] for _, _, d in self._graph.edges(data=True))

    def is_complete(self) -> bool:
        n = self.num_vertices
        return self.num_edges == n * (n - 1) // 2

    # ------------------------------------------------------------------
    # Derived graphs
    # ------------------------------------------------------------------

    def induced_subgraph(self, vertices: Iterable[str]) -> "LabeledGraph":
        """The subgraph induced by a vertex subset."""
        keep = set(vertices)
        return LabeledGraph(
            {v: self.vertex_label(v) for v in self.vertices if v in keep},
            [(u, v, self.edge_label(u, v)) for u, v in self.edges if u in keep and v in keep],
        )

    def edge_subgraph(self, vertices: Iterable[str], edges: Iterable[Tuple[str, str]]) -> "LabeledGraph":
        """The subgraph with the given vertices and a subset of the edges among them."""
        keep = set(vertices)
        return LabeledGraph(
            {v: self.vertex_label(v) for v in self.vertices if v in keep},
            [(u, v, self.edge_label(u, v)) for u, v in edges],
        )

    def relabel(
        self,
        vertex_labels: Optional[Mapping[str, str]] = None,
        edge_labels: Optional[Mapping[Tuple[str, str], str]] = None,
    ) -> "LabeledGraph":
        """Copy with some vertex / edge labels replaced (edge keys are sorted pairs)."""
        vertex_labels = vertex_labels or {}
        edge_labels = edge_labels or {}
        return LabeledGraph(
            {v: vertex_labels.get(v, self.vertex_label(v)) for v in self.vertices},
            [(u, v, edge_labels.get((u, v), self.edge_label(u, v))) for u, v in self.edges],
        )

    # ------------------------------------------------------------------
    # Serialization
    # ------------------------------------------------------------------

    def to_dict(self) -> Dict:
        """Convert to the graph JSON document shape."""
        return {
            "vertices": [{"id": v, "label": self.vertex_label(v)} for v in self.vertices],
            "edges": [{"u": u, "v": v, "label": self.edge_label(u, v)} for u, v in self.edges],
        }

    @classmethod
    def from_dict(cls, data: Dict) -> "LabeledGraph":
        """
        Create from a graph JSON document.

        Raises:
            InputError: On malformed documents or reserved padding labels.
        """
        try:
            vertices = [(str(item["id"]), str(item["label"])) for item in data.get("vertices", [])]
            edges = [(str(item["u"]), str(item["v"]), str(item["label"])) for item in data.get("edges", [])]
        except (KeyError, TypeError, AttributeError) as e:
            raise InputError(f"Graph document is malformed: {e}")
        for _, label in vertices:
            _reject_reserved(label)
        for _, _, label in edges:
            _reject_reserved(label)
        return cls(vertices, edges)

    @classmethod
    def load(cls, path: Union[str, Path]) -> "LabeledGraph":
        """Load a graph from a JSON file."""
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            raise InputError(f"Cannot read graph {path}: {e}")
        return cls.from_dict(data)

    def __repr__(self) -> str:
        return f"LabeledGraph(|V|={self.num_vertices}, |E|={self.num_edges})"


def _edge_key(u: str, v: str) -> Tuple[str, str]:
    return (u, v) if u <= v else (v, u)


def _reject_reserved(label: str) -> None:
    if label in RESERVED_LABELS:
        raise InputError(f"Label {label!r} is reserved for graph completion")


@dataclass(frozen=True)
class LabelWeighting:
    """Strictly positive rational weight per label (α)."""
    weights: Mapping[str, Fraction]

    def __post_init__(self):
        parsed = {str(k): parse_rational(v) for k, v in self.weights.items()}
        for label, weight in parsed.items():
            if weight <= 0:
                raise InputError(f"Weight of label {label!r} must be strictly positive, got {format_rational(weight)}")
        object.__setattr__(self, "weights", parsed)

    def weight(self, label: str) -> Fraction:
        try:
            return self.weights[label]
        except KeyError:
            raise InputError(f"Missing weight for label {label!r}")

    @classmethod
    def uniform(cls, labels: Iterable[str]) -> "LabelWeighting":
        """α ≡ 1 over the given labels."""
        return cls({label: Fraction(1) for label in labels})

    def to_dict(self) -> Dict:
        return {label: format_rational(w) for label, w in sorted(self.weights.items())}

    @classmethod
    def from_dict(cls, data: Dict) -> "LabelWeighting":
        if not isinstance(data, dict):
            raise InputError("Label weighting must be an object {label: \"p/q\"}")
        return cls(dict(data))


class EmbeddingKind(Enum):
    """Which relation an embedding witnesses."""
    SUBGRAPH = "subgraph"
    INDUCED = "induced"
    EXTENDED = "extended"
    ISOMORPHISM = "isomorphism"


@dataclass(frozen=True)
class Embedding:
    """Injective vertex map from a pattern graph into a host graph."""
    vertex_map: Tuple[Tuple[str, str], ...]
    kind: EmbeddingKind

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, str], kind: EmbeddingKind) -> "Embedding":
        return cls(tuple(sorted(mapping.items())), kind)

    def as_dict(self) -> Dict[str, str]:
        return dict(self.vertex_map)

    def to_dict(self) -> Dict:
        return {"kind": self.kind.value, "map": self.as_dict()}

    def replay(
        self,
        pattern: LabeledGraph,
        host: LabeledGraph,
        v_model: Optional[FiniteMcsModel] = None,
        e_model: Optional[FiniteMcsModel] = None,
    ) -> bool:
        """Re-check the structure and label conditions of this embedding's kind."""
        phi = self.as_dict()
        if set(phi) != set(pattern.vertices) or len(set(phi.values())) != len(phi):
            return False
        if any(w not in host.graph for w in phi.values()):
            return False
        if self.kind is EmbeddingKind.EXTENDED:
            v_ok = lambda p, h: v_model.leq(p, h)
            e_ok = lambda p, h: e_model.leq(p, h)
        else:
            v_ok = e_ok = lambda p, h: p == h
        for v in pattern.vertices:
            if not v_ok(pattern.vertex_label(v), host.vertex_label(phi[v])):
                return False
        for u, v in pattern.edges:
            if not host.has_edge(phi[u], phi[v]):
                return False
            if not e_ok(pattern.edge_label(u, v), host.edge_label(phi[u], phi[v])):
                return False
        if self.kind in (EmbeddingKind.INDUCED, EmbeddingKind.ISOMORPHISM):
            for u, v in combinations(pattern.vertices, 2):
                if host.has_edge(phi[u], phi[v]) and not pattern.has_edge(u, v):
                    return False
        if self.kind is EmbeddingKind.ISOMORPHISM and pattern.num_vertices != host.num_vertices:
            return False
        return True


# ----------------------------------------------------------------------
# Relations
# ----------------------------------------------------------------------

def _same_label(a: Dict, b: Dict) -> bool:
    return a["label"] == b["label"]


def _invert(host_to_pattern: Mapping[str, str]) -> Dict[str, str]:
    return {p: h for h, p in host_to_pattern.items()}


def _first_embedding(
    pattern: LabeledGraph,
    host: LabeledGraph,
    kind: EmbeddingKind,
    node_match=_same_label,
    edge_match=_same_label,
) -> Optional[Embedding]:
    if pattern.is_empty():
        return Embedding((), kind)
    if pattern.num_vertices > host.num_vertices or pattern.num_edges > host.num_edges:
        return None
    # GraphMatcher(G1, G2) searches subgraphs of G1 matching G2, so the host goes first.
    matcher = GraphMatcher(host.graph, pattern.graph, node_match=node_match, edge_match=edge_match)
    if kind is EmbeddingKind.INDUCED:
        found = matcher.subgraph_isomorphisms_iter()
    else:
        found = matcher.subgraph_monomorphisms_iter()
    for host_to_pattern in found:
        return Embedding.from_mapping(_invert(host_to_pattern), kind)
    return None


def subgraph_isomorphic(pattern: LabeledGraph, host: LabeledGraph) -> Optional[Embedding]:
    """Witness of pattern ⊆ host (exact labels, edges preserved), or None."""
    return _first_embedding(pattern, host, EmbeddingKind.SUBGRAPH)


def induced_subgraph_isomorphic(pattern: LabeledGraph, host: LabeledGraph) -> Optional[Embedding]:
    """Witness of pattern ⊆ᵢ host (non-edges preserved as non-edges), or None."""
    return _first_embedding(pattern, host, EmbeddingKind.INDUCED)


def require_labels_in(g: LabeledGraph, v_model: FiniteMcsModel, e_model: FiniteMcsModel) -> None:
    """Raise InputError when a label of g is missing from its label model."""
    for label in sorted(g.vertex_labels()):
        if label not in v_model:
            raise InputError(f"Vertex label {label!r} is not an element of the vertex label model")
    for label in sorted(g.edge_labels()):
        if label not in e_model:
            raise InputError(f"Edge label {label!r} is not an element of the edge label model")


def extended_subgraph_isomorphic(
    pattern: LabeledGraph,
    host: LabeledGraph,
    v_model: FiniteMcsModel,
    e_model: FiniteMcsModel,
) -> Optional[Embedding]:
    """Witness of pattern ⊆ₑ host: non-induced structure, pattern labels ⪯ host labels."""
    require_labels_in(pattern, v_model, e_model)
    require_labels_in(host, v_model, e_model)
    return _first_embedding(
        pattern,
        host,
        EmbeddingKind.EXTENDED,
        node_match=lambda h, p: v_model.leq(p["label"], h["label"]),
        edge_match=lambda h, p: e_model.leq(p["label"], h["label"]),
    )


def is_isomorphic(g1: LabeledGraph, g2: LabeledGraph) -> Optional[Embedding]:
    """
    Isomorphism witness from g1 to g2, or None.

    The witness is the lexicographically least vertex map (g1 vertices in
    sorted order, each sent to the smallest feasible g2 vertex).
    """
    if g1.num_vertices != g2.num_vertices or g1.num_edges != g2.num_edges:
        return None
    if sorted(g1.vertex_label(v) for v in g1.vertices) != sorted(g2.vertex_label(v) for v in g2.vertices):
        return None
    matcher = GraphMatcher(g1.graph, g2.graph, node_match=_same_label, edge_match=_same_label)
    if not matcher.is_isomorphic():
        return None
    return Embedding.from_mapping(_least_isomorphism(g1, g2), EmbeddingKind.ISOMORPHISM)


def _least_isomorphism(g1: LabeledGraph, g2: LabeledGraph) -> Dict[str, str]:
    order = g1.vertices
    targets = g2.vertices
    phi: Dict[str, str] = {}
    used = set()

    def feasible(v: str, w: str) -> bool:
        if g1.vertex_label(v) != g2.vertex_label(w):
            return False
        if g1.graph.degree(v) != g2.graph.degree(w):
            return False
        for u, x in phi.items():
            if g1.has_edge(u, v) != g2.has_edge(x, w):
                return False
            if g1.has_edge(u, v) and g1.edge_label(u, v) != g2.edge_label(x, w):
                return False
        return True

    def extend(i: int) -> bool:
        if i == len(order):
            return True
        v = order[i]
        for w in targets:
            if w not in used and feasible(v, w):
                phi[v] = w
                used.add(w)
                if extend(i + 1):
                    return True
                del phi[v]
                used.discard(w)
        return False

    extend(0)
    return dict(phi)


# ----------------------------------------------------------------------
# Completion and sizes
# ----------------------------------------------------------------------

def _fresh_vertex_ids(existing: Iterable[str], count: int) -> List[str]:
    taken = set(existing)
    fresh, k = [], 0
    while len(fresh) < count:
        candidate = f"pad{k}"
        if candidate not in taken:
            fresh.append(candidate)
        k += 1
    return fresh


def completion(g: LabeledGraph, n: int, eps_v: str = EPS_V, eps_e: str = EPS_E) -> LabeledGraph:
    """
    Graph n-completion: pad g to n vertices and make it complete.

    New vertices get eps_v, new edges (including those between original
    vertices) get eps_e; original labels are kept.

    Raises:
        InputError: If n < |V|.
    """
    if n < g.num_vertices:
        raise InputError(f"Cannot complete a graph with {g.num_vertices} vertices to n={n}")
    vertices = {v: g.vertex_label(v) for v in g.vertices}
    for v in _fresh_vertex_ids(vertices, n - g.num_vertices):
        vertices[v] = eps_v
    edges = []
    for u, v in combinations(sorted(vertices), 2):
        label = g.edge_label(u, v) if g.has_edge(u, v) else eps_e
        edges.append((u, v, label))
    return LabeledGraph(vertices, edges)


def size_gve(g: LabeledGraph, alpha: LabelWeighting) -> Fraction:
    """Weighted vertex plus edge count (S-MCS size)."""
    if g.is_empty():
        return Fraction(0)
    total = sum((alpha.weight(g.vertex_label(v)) for v in g.vertices), Fraction(0))
    return total + sum((alpha.weight(g.edge_label(u, v)) for u, v in g.edges), Fraction(0))


def size_gv(g: LabeledGraph, alpha: LabelWeighting) -> Fraction:
    """Weighted vertex count (I-MCS size)."""
    return sum((alpha.weight(g.vertex_label(v)) for v in g.vertices), Fraction(0))


def _positive_label_size(model: FiniteMcsModel, label: str, what: str) -> Fraction:
    if label not in model:
        raise InputError(f"{what} label {label!r} is not an element of the {what.lower()} label model")
    value = model.size(label)
    if value <= 0:
        raise InputError(f"{what} label {label!r} has size {format_rational(value)}; label sizes must be strictly positive")
    return value


def size_ges(g: LabeledGraph, v_model: FiniteMcsModel, e_model: FiniteMcsModel) -> Fraction:
    """Sum of label sizes under the vertex and edge label models (E-MCS size)."""
    if g.is_empty():
        return Fraction(0)
    total = sum((_positive_label_size(v_model, g.vertex_label(v), "Vertex") for v in g.vertices), Fraction(0))
    return total + sum(
        (_positive_label_size(e_model, g.edge_label(u, v), "Edge") for u, v in g.edges), Fraction(0)
    )


# ----------------------------------------------------------------------
# Canonical form
# ----------------------------------------------------------------------

def _vertex_cells(g: LabeledGraph) -> List[List[str]]:
    """Partition vertices into isomorphism-invariant cells, cells in invariant order."""
    hashes = nx.weisfeiler_lehman_subgraph_hashes(
        g.graph, edge_attr="label", node_attr="label", iterations=WL_ITERATIONS
    )
    keyed: Dict[Tuple, List[str]] = {}
    for v in g.vertices:
        key = (g.vertex_label(v), g.graph.degree(v), hashes[v][-1] if hashes[v] else "")
        keyed.setdefault(key, []).append(v)
    return [keyed[key] for key in sorted(keyed)]


def _twin_pairs(g: LabeledGraph) -> FrozenSet[Tuple[str, str]]:
    """Ordered pairs (u, w) whose transposition is an automorphism of g."""
    def link(a: str, b: str) -> Optional[str]:
        return g.edge_label(a, b) if g.has_edge(a, b) else None

    pairs = set()
    for u, w in combinations(g.vertices, 2):
        if g.vertex_label(u) != g.vertex_label(w):
            continue
        if all(link(u, x) == link(w, x) for x in g.vertices if x != u and x != w):
            pairs.add((u, w))
            pairs.add((w, u))
    return frozenset(pairs)


def canonical_form(g: LabeledGraph, cap: int = DEFAULT_CANONICAL_CAP) -> bytes:
    """
    Canonical byte string: equal for two graphs iff they are isomorphic.

    Vertices are ordered cell by cell; within cells every order is tried
    (with prefix pruning) and the lexicographically least adjacency
    encoding wins.

    Raises:
        CapExceededError: If g has more than `cap` vertices.
    """
    cap = max(0, min(CANONICAL_CAP_MAX, cap))
    if g.num_vertices > cap:
        raise CapExceededError("canonical form vertices", g.num_vertices, cap)
    if g.is_empty():
        return b'{"e":[],"v":[]}'

    cells = _vertex_cells(g)
    slots = [cell_index for cell_index, cell in enumerate(cells) for _ in cell]
    n = len(slots)
    best_rows: List[Tuple] = []
    best_order: List[str] = []
    placed: List[str] = []
    used = set()

    twins = _twin_pairs(g)

    def row_for(v: str) -> Tuple:
        return tuple((1, g.edge_label(u, v)) if g.has_edge(u, v) else (0, "") for u in placed)

    def search(k: int, rows: List[Tuple]) -> None:
        nonlocal best_rows, best_order
        if k == n:
            if not best_rows or rows < best_rows:
                best_rows, best_order = list(rows), list(placed)
            return
        tried: List[str] = []
        for v in cells[slots[k]]:
            if v in used:
                continue
            # Swapping twins is an automorphism fixing everything placed so far.
            if any((u, v) in twins for u in tried):
                continue
            tried.append(v)
            row = row_for(v)
            # Prune orders whose prefix already encodes larger than the best so far.
            if best_rows and rows == best_rows[:k] and row > best_rows[k]:
                continue
            placed.append(v)
            used.add(v)
            rows.append(row)
            search(k + 1, rows)
            rows.pop()
            used.discard(v)
            placed.pop()

    search(0, [])
    position = {v: i for i, v in enumerate(best_order)}
    encoding = {
        "v": [g.vertex_label(v) for v in best_order],
        "e": sorted(
            [min(position[u], position[v]), max(position[u], position[v]), g.edge_label(u, v)]
            for u, v in g.edges
        ),
    }
    return json.dumps(encoding, sort_keys=True, separators=(",", ":"), ensure_ascii=False).encode("utf-8")


# ----------------------------------------------------------------------
# Small graph universes
# ----------------------------------------------------------------------

def graph_universe(
    max_vertices: int,
    vertex_labels: Sequence[str],
    edge_labels: Sequence[str],
    cap: int = DEFAULT_CANONICAL_CAP,
) -> List[LabeledGraph]:
    """
    All labeled graphs with at most max_vertices vertices, one per isomorphism class.

    Returned in order of (vertex count, edge count, canonical form).
    """
    seen: Dict[bytes, LabeledGraph] = {}
    for n in range(max_vertices + 1):
        ids = [str(i) for i in range(n)]
        pairs = list(combinations(ids, 2))
        for labeling in product(sorted(vertex_labels), repeat=n):
            for choice in product([None] + sorted(edge_labels), repeat=len(pairs)):
                g = LabeledGraph(
                    dict(zip(ids, labeling)),
                    [(u, v, lab) for (u, v), lab in zip(pairs, choice) if lab is not None],
                )
                seen.setdefault(canonical_form(g, cap=cap), g)
    universe = sorted(seen.items(), key=lambda item: (item[1].num_vertices, item[1].num_edges, item[0]))
    logger.debug("graph_universe(%d, %s, %s): %d classes", max_vertices, vertex_labels, edge_labels, len(universe))
    return [g for _, g in universe]


def iter_subgraphs(g: LabeledGraph, induced: bool = False) -> Iterator[LabeledGraph]:
    """Every (induced) subgraph of g on its own vertex ids, empty graph first."""
    vertices = g.vertices
    for k in range(len(vertices) + 1):
        for chosen in combinations(vertices, k):
            if induced:
                yield g.induced_subgraph(chosen)
                continue
            keep = set(chosen)
            inner = [(u, v) for u, v in g.edges if u in keep and v in keep]
            for m in range(len(inner) + 1):
                for edge_set in combinations(inner, m):
                    yield g.edge_subgraph(chosen, edge_set)
