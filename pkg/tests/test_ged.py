from itertools import product

import pytest

from mcsmodel.core_model import AxiomTag
from mcsmodel.errors import CapExceededError, ContractViolationError, InputError
from mcsmodel.ged import (
    EditCostTables,
    build_correspondence,
    embed,
    ged_brute_force,
    mcs_size_on_complete,
    per_bijection_identity,
    validate_cost_metric,
    verify_ged_correspondence,
    verify_ged_correspondence_all,
)
from mcsmodel.graphs import EPS_E, EPS_V, LabeledGraph, canonical_form, graph_universe, size_ges

from helpers import EMPTY, K3, P2, P3, complete_graph, path_graph, single

DISCRETE = EditCostTables.discrete("ab", "x")


@pytest.fixture
def discrete_costs(fixtures_dir):
    return EditCostTables.load(fixtures_dir / "costs" / "discrete.json")


class TestCostTables:

    def test_document_names_padding_labels(self, discrete_costs):
        assert discrete_costs.vertex(EPS_V, "a") == 1
        assert discrete_costs.vertex("b", "a") == 1
        assert discrete_costs.vertex("a", "a") == 0
        assert discrete_costs.edge("x", EPS_E) == 1

    def test_explicit_reverse_entry_wins(self):
        costs = EditCostTables.from_dict({"vertexCost": {"a|b": "1", "b|a": "2"}, "edgeCost": {}})
        assert costs.vertex("a", "b") == 1 and costs.vertex("b", "a") == 2

    def test_missing_pair(self):
        costs = EditCostTables.from_dict({"vertexCost": {"a|b": "1"}, "edgeCost": {}})
        with pytest.raises(InputError, match="Missing vertex cost"):
            ged_brute_force(single("a"), single("b"), costs)

    def test_rejects_negative_and_reserved(self):
        with pytest.raises(InputError, match="negative"):
            EditCostTables.from_dict({"vertexCost": {"a|b": "-1"}, "edgeCost": {}})
        with pytest.raises(InputError, match="reserved"):
            EditCostTables.from_dict({"vertexCost": {f"a|{EPS_V}": "1"}, "edgeCost": {}})
        with pytest.raises(InputError, match="'a\\|b'"):
            EditCostTables.from_dict({"vertexCost": {"a-b": "1"}, "edgeCost": {}})

    def test_discrete_tables_are_metrics(self, discrete_costs):
        assert validate_cost_metric(discrete_costs).passed
        assert validate_cost_metric(DISCRETE).passed

    def test_triangle_witness_goes_through_padding(self, fixtures_dir):
        costs = EditCostTables.load(fixtures_dir / "costs" / "not_metric.json")
        violation = validate_cost_metric(costs).first(AxiomTag.M3)
        assert violation.witness == ("a", EPS_V, "b")
        assert violation.detail == "vertexCost"

    def test_triangle_witness_in_declared_order(self):
        costs = EditCostTables.from_dict({
            "vertexCost": {"a|b": "3", "b|c": "1", "a|c": "5", "a|epsV": "3", "b|epsV": "3", "c|epsV": "3"},
            "edgeCost": {},
        })
        assert validate_cost_metric(costs).first(AxiomTag.M3).witness == ("a", "b", "c")

    def test_asymmetric_table(self):
        costs = EditCostTables.from_dict({"vertexCost": {"a|b": "1", "b|a": "2", "a|epsV": "1", "b|epsV": "1"},
                                          "edgeCost": {}})
        assert AxiomTag.M2 in validate_cost_metric(costs).tags()


class TestGed:

    def test_single_substitution(self, discrete_costs):
        result = ged_brute_force(single("a"), single("b"), discrete_costs)
        assert result.distance == 1
        assert result.best_bijection == {"0": "0", "pad0": "pad0"}
        assert result.bijections_scanned == 2 and result.completed_size == 2

    def test_identical_graphs(self):
        assert ged_brute_force(P3, P3, DISCRETE).distance == 0

    def test_insert_one_vertex(self):
        assert ged_brute_force(EMPTY, single("a"), DISCRETE).distance == 1

    def test_delete_an_edge(self):
        assert ged_brute_force(K3, P3, DISCRETE).distance == 1
        assert ged_brute_force(P2, path_graph("ab"), DISCRETE).distance == 1

    def test_cap(self):
        g = path_graph("aaaa")
        with pytest.raises(CapExceededError):
            ged_brute_force(g, g, DISCRETE)

    def test_rejects_reserved_labels(self):
        padded = LabeledGraph({"0": EPS_V})
        with pytest.raises(InputError, match="reserved"):
            ged_brute_force(padded, single("a"), DISCRETE)

    def test_to_dict(self):
        doc = ged_brute_force(single("a"), single("b"), DISCRETE).to_dict()
        assert doc["distance"] == "1/1"
        assert doc["completedSize"] == 2


def test_ged_is_a_metric_on_small_graphs():
    universe = graph_universe(2, "ab", "x")
    d = {
        (i, j): ged_brute_force(g, h, DISCRETE).distance
        for (i, g), (j, h) in product(enumerate(universe), repeat=2)
    }
    n = len(universe)
    for i, j in product(range(n), repeat=2):
        assert d[i, j] == d[j, i]
        assert (d[i, j] == 0) == (i == j)
    for i, j, k in product(range(n), repeat=3):
        assert d[i, k] <= d[i, j] + d[j, k]


class TestCorrespondence:

    def test_label_models(self):
        ctx = build_correspondence(1, DISCRETE)
        # Three labels (a, b, padding): three points plus seven edge sets.
        assert len(ctx.vertex_model) == 10
        assert len(ctx.edge_model) == 3
        assert ctx.order == 2

    def test_non_metric_costs_are_rejected(self, fixtures_dir):
        costs = EditCostTables.load(fixtures_dir / "costs" / "not_metric.json")
        with pytest.raises(InputError, match="vertexCost is not a metric: M3"):
            build_correspondence(1, costs)

    def test_caps(self):
        with pytest.raises(CapExceededError):
            build_correspondence(4, DISCRETE)
        with pytest.raises(CapExceededError):
            build_correspondence(1, EditCostTables.discrete("abcd", "x"))

    def test_edge_labels_have_a_smaller_cap(self):
        assert len(build_correspondence(1, EditCostTables.discrete("abc", "xy")).edge_model) == 10
        with pytest.raises(CapExceededError, match="edge labels") as info:
            build_correspondence(1, EditCostTables.discrete("ab", "xyz"))
        assert info.value.required == 4 and info.value.cap == 3

    def test_embedding_of_the_empty_graph(self):
        ctx = build_correspondence(2, DISCRETE)
        x = embed(ctx, EMPTY)
        assert x.num_vertices == 4 and x.is_complete()
        assert x.vertex_labels() == {EPS_V} and x.edge_labels() == {EPS_E}

    def test_embedding_is_injective(self):
        ctx = build_correspondence(2, DISCRETE)
        universe = graph_universe(2, "ab", "x")
        forms = {canonical_form(embed(ctx, g)) for g in universe}
        assert len(forms) == len(universe)

    def test_embedding_errors(self):
        ctx = build_correspondence(1, DISCRETE)
        with pytest.raises(ContractViolationError):
            embed(ctx, P2)
        with pytest.raises(InputError, match="no cost entry"):
            embed(ctx, single("c"))

    def test_common_size_with_itself_is_own_size(self):
        ctx = build_correspondence(2, DISCRETE)
        x = embed(ctx, path_graph("ab"))
        assert mcs_size_on_complete(ctx, x, x) == size_ges(x, ctx.vertex_model, ctx.edge_model)

    def test_common_size_needs_complete_graphs(self):
        ctx = build_correspondence(2, DISCRETE)
        with pytest.raises(ContractViolationError):
            mcs_size_on_complete(ctx, P2, embed(ctx, P2))

    def test_single_pair(self):
        ctx = build_correspondence(2, DISCRETE)
        report = verify_ged_correspondence(ctx, P2, complete_graph("ab"))
        assert report.passed
        assert report.ged.distance == report.model_distance == 1
        assert report.to_dict()["ged"] == "1/1"

    def test_identity_holds_for_every_bijection(self):
        ctx = build_correspondence(2, DISCRETE, theta_offset="1/2")
        assert per_bijection_identity(ctx, single("a"), path_graph("ab")).passed


def test_ged_equals_model_distance_on_the_two_vertex_universe():
    ctx = build_correspondence(2, DISCRETE)
    universe = graph_universe(2, "ab", "x")
    assert len(universe) == 9
    results = verify_ged_correspondence_all(ctx, universe)
    assert len(results) == 9 * 10 // 2
    for i, j, report in results:
        assert report.equal, (i, j, report.to_dict())
        assert report.stable, (i, j, report.to_dict())
        assert report.identity.passed, (i, j, report.to_dict())


def test_weighted_costs_also_correspond():
    costs = EditCostTables.from_dict({
        "vertexCost": {"a|b": "1/2", "a|epsV": "1", "b|epsV": "3/2"},
        "edgeCost": {"x|epsE": "2"},
    })
    ctx = build_correspondence(2, costs)
    for g1, g2 in [(single("a"), single("b")), (P2, EMPTY), (path_graph("ab"), single("b"))]:
        assert verify_ged_correspondence(ctx, g1, g2).passed
