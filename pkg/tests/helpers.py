"""Graph builders and hypothesis strategies shared by the test modules."""

import random
from fractions import Fraction
from itertools import combinations
from pathlib import Path
from typing import Sequence

from hypothesis import strategies as st

from mcsmodel.core_model import chain_model
from mcsmodel.graphs import LabeledGraph
from mcsmodel.mcs_solvers import SolverParams

FIXTURES = Path(__file__).parent / "fixtures"


def path_graph(labels: Sequence[str], edge_label: str = "x") -> LabeledGraph:
    ids = [str(i) for i in range(len(labels))]
    return LabeledGraph(dict(zip(ids, labels)), [(ids[i], ids[i + 1], edge_label) for i in range(len(ids) - 1)])


def complete_graph(labels: Sequence[str], edge_label: str = "x") -> LabeledGraph:
    ids = [str(i) for i in range(len(labels))]
    return LabeledGraph(dict(zip(ids, labels)), [(u, v, edge_label) for u, v in combinations(ids, 2)])


def single(label: str) -> LabeledGraph:
    return LabeledGraph({"0": label})


EMPTY = LabeledGraph()
K3 = complete_graph("aaa")
P3 = path_graph("aaa")
P2 = path_graph("aa")


def uniform(*graphs: LabeledGraph) -> SolverParams:
    return SolverParams.uniform(graphs)


def chain_params() -> SolverParams:
    """Kind E parameters: vertex chain c ⪯ a ⪯ b, single edge label x."""
    return SolverParams(
        vertex_model=chain_model([1, 2, 3], names=["c", "a", "b"]),
        edge_model=chain_model([1], names=["x"]),
    )


def random_graph(rng: random.Random, max_vertices: int, vertex_labels: str = "ab", edge_label: str = "x") -> LabeledGraph:
    n = rng.randint(0, max_vertices)
    ids = [str(i) for i in range(n)]
    return LabeledGraph(
        {v: rng.choice(vertex_labels) for v in ids},
        [(u, v, edge_label) for u, v in combinations(ids, 2) if rng.random() < 0.5],
    )


@st.composite
def labeled_graphs(draw, max_vertices: int = 4, vertex_labels: str = "ab", edge_labels: str = "x"):
    """Random labeled graph on vertex ids "0".."n-1"."""
    n = draw(st.integers(min_value=0, max_value=max_vertices))
    ids = [str(i) for i in range(n)]
    vertices = {v: draw(st.sampled_from(vertex_labels)) for v in ids}
    edges = []
    for u, v in combinations(ids, 2):
        label = draw(st.one_of(st.none(), st.sampled_from(edge_labels)))
        if label is not None:
            edges.append((u, v, label))
    return LabeledGraph(vertices, edges)


@st.composite
def relabelings(draw, g: LabeledGraph):
    """An isomorphic copy of g with shuffled vertex ids."""
    ids = list(g.vertices)
    shuffled = draw(st.permutations(ids))
    rename = {v: f"v{w}" for v, w in zip(ids, shuffled)}
    return LabeledGraph(
        {rename[v]: g.vertex_label(v) for v in ids},
        [(rename[u], rename[v], g.edge_label(u, v)) for u, v in g.edges],
    )


positive_rationals = st.builds(
    Fraction,
    st.integers(min_value=1, max_value=12),
    st.integers(min_value=1, max_value=4),
)
