from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from mcsmodel.core_model import (
    AxiomTag,
    FiniteMcsModel,
    MetricKind,
    chain_model,
    check_aux_inequality,
    check_axioms,
    check_global_subelement,
    check_metric_laws,
    check_metric_table,
    common_subelements,
    discrete_model,
    distance,
    max_common_size,
    max_common_size_of,
    max_common_subelements,
    metric_value,
    min_size_element,
    power_set_model,
)
from mcsmodel.errors import CapExceededError, ContractViolationError, InputError, ModelViolationError
from mcsmodel.rational import format_rational, parse_rational

from helpers import positive_rationals


def test_parse_rational_accepts_strings_and_ints():
    assert parse_rational("3/6") == Fraction(1, 2)
    assert parse_rational("4") == Fraction(4)
    assert parse_rational(7) == Fraction(7)


@pytest.mark.parametrize("bad", ["0.5", "1e3", 0.5, True, "x/y", "1/0", None])
def test_parse_rational_rejects_lossy_or_malformed(bad):
    with pytest.raises(InputError):
        parse_rational(bad)


def test_format_rational_always_has_denominator():
    assert format_rational(Fraction(0)) == "0/1"
    assert format_rational(2) == "2/1"
    assert format_rational(Fraction(-2, 4)) == "-1/2"


class TestModelConstruction:

    def test_rejects_unknown_order_element(self):
        with pytest.raises(InputError, match="unknown element"):
            FiniteMcsModel(["a"], [("a", "b")], {"a": 1})

    def test_rejects_missing_and_negative_sizes(self):
        with pytest.raises(InputError, match="Missing size"):
            FiniteMcsModel(["a", "b"], [], {"a": 1})
        with pytest.raises(InputError, match="negative"):
            FiniteMcsModel(["a"], [], {"a": "-1/2"})

    def test_rejects_duplicate_elements(self):
        with pytest.raises(InputError, match="Duplicate"):
            FiniteMcsModel(["a", "a"], [], {"a": 1})

    def test_from_dict_adds_reflexive_pairs_only(self):
        model = FiniteMcsModel.from_dict({
            "elements": ["a", "b", "c"],
            "order": [["a", "b"], ["b", "c"]],
            "size": {"a": "0", "b": "1", "c": "2"},
        })
        assert model.leq("a", "a") and model.leq("c", "c")
        assert not model.leq("a", "c")
        assert check_axioms(model).first(AxiomTag.R2).witness == ("a", "b", "c")

    def test_from_dict_close_order_takes_transitive_closure(self):
        model = FiniteMcsModel.from_dict({
            "elements": ["a", "b", "c"],
            "order": [["a", "b"], ["b", "c"]],
            "size": {"a": "0", "b": "1", "c": "2"},
        }, close_order=True)
        assert model.leq("a", "c")
        assert check_axioms(model).passed

    @pytest.mark.parametrize("document", [
        {"elements": ["a"], "size": ["0"]},
        {"elements": ["a"], "order": {"a": "a"}, "size": {"a": "0"}},
        {"elements": ["a"]},
        ["a"],
    ])
    def test_from_dict_rejects_malformed_documents(self, document):
        with pytest.raises(InputError):
            FiniteMcsModel.from_dict(document)

    def test_round_trip_document(self):
        model = power_set_model([1, 2])
        again = FiniteMcsModel.from_dict(model.to_dict())
        assert again.order == model.order
        assert [again.size(x) for x in again.elements] == [model.size(x) for x in model.elements]


class TestCommonSubelements:

    def test_power_set_pair(self):
        model = power_set_model([1, 2])
        assert common_subelements(model, ["{1}", "{2}"]) == {"{}"}
        assert max_common_size(model, "{1}", "{2}") == 0
        assert max_common_subelements(model, "{1}", "{1,2}") == ["{1}"]
        assert max_common_size(model, "{1,2}", "{1,2}") == 2

    def test_empty_subset_yields_every_element(self):
        model = chain_model([0, 1])
        assert common_subelements(model, []) == {"x0", "x1"}

    def test_s_prime_of_singleton_is_own_size(self):
        model = power_set_model([1, 2])
        assert max_common_size_of(model, ["{1,2}"]) == 2

    def test_s_prime_rejects_larger_subsets(self):
        model = power_set_model([1, 2])
        with pytest.raises(ContractViolationError):
            max_common_size_of(model, ["{}", "{1}", "{2}"])

    def test_empty_cs_is_a_model_violation(self):
        model = discrete_model(["a", "b"])
        with pytest.raises(ModelViolationError):
            max_common_size(model, "a", "b")

    def test_unknown_identifier(self):
        with pytest.raises(InputError, match="Unknown element"):
            max_common_size(power_set_model([1]), "{1}", "{9}")


class TestMetrics:

    @pytest.mark.parametrize("kind, expected", [
        (MetricKind.SYMMETRIC_DIFFERENCE, Fraction(2)),
        (MetricKind.MAX_MINUS_COMMON, Fraction(1)),
        (MetricKind.NORMALIZED_MAX, Fraction(1, 3)),
        (MetricKind.NORMALIZED_UNION, Fraction(1, 2)),
    ])
    def test_metric_values(self, kind, expected):
        assert metric_value(kind, Fraction(3), Fraction(3), Fraction(2)) == expected

    def test_normalized_metrics_on_two_empty_elements(self):
        assert metric_value(MetricKind.NORMALIZED_MAX, 0, 0, 0) == 0
        assert metric_value(MetricKind.NORMALIZED_UNION, 0, 0, 0) == 0

    def test_common_size_must_not_exceed_smaller_size(self):
        with pytest.raises(ContractViolationError):
            metric_value(MetricKind.SYMMETRIC_DIFFERENCE, 1, 3, 2)
        with pytest.raises(ContractViolationError):
            metric_value(MetricKind.SYMMETRIC_DIFFERENCE, 1, 3, -1)

    @pytest.mark.parametrize("text", ["da", "d_b", "DC", "normalized_union"])
    def test_parse_metric(self, text):
        assert MetricKind.parse(text) in MetricKind

    def test_parse_metric_unknown(self):
        with pytest.raises(InputError):
            MetricKind.parse("de")

    def test_distance_on_power_set(self):
        model = power_set_model([1, 2])
        assert distance(model, MetricKind.SYMMETRIC_DIFFERENCE, "{1}", "{2}") == 2
        assert distance(model, MetricKind.NORMALIZED_MAX, "{1}", "{1,2}") == Fraction(1, 2)


class TestCheckers:

    def test_power_set_model_passes_everything(self):
        model = power_set_model([1, 2, 3])
        assert check_axioms(model).passed
        for kind in MetricKind:
            assert check_metric_laws(model, kind).passed
        assert check_aux_inequality(model).passed
        assert check_global_subelement(model).passed
        assert min_size_element(model) == "{}"

    def test_constant_sizes_break_s2_with_smallest_witness(self):
        model = power_set_model([1, 2], size=lambda subset: Fraction(1))
        report = check_axioms(model)
        assert report.first(AxiomTag.S2).witness == ("{}", "{1}")

    def test_antisymmetry_violation(self):
        model = FiniteMcsModel(["a", "b"], [("a", "a"), ("b", "b"), ("a", "b"), ("b", "a")], {"a": 1, "b": 2})
        assert report_tags(model) >= {AxiomTag.R3}
        assert check_axioms(model).first(AxiomTag.R3).witness == ("a", "b")

    def test_reflexivity_violation(self):
        model = FiniteMcsModel(["a"], [], {"a": 1})
        assert check_axioms(model).first(AxiomTag.R1).witness == ("a",)

    def test_missing_common_subelement(self):
        report = check_axioms(discrete_model(["a", "b"]))
        assert report.first(AxiomTag.A1).witness == ("a", "b")

    def test_a2_violation(self):
        sizes = {frozenset(): 0, frozenset({1}): 1, frozenset({2}): 1, frozenset({1, 2}): Fraction(3, 2)}
        model = power_set_model([1, 2], size=lambda subset: sizes[subset])
        assert check_axioms(model).first(AxiomTag.A2).witness == ("{1}", "{2}", "{1,2}")

    def test_a2_violation_breaks_the_triangle_inequality(self):
        # d({1}, {2}) = 2 but both are within 1/2 of {1,2}.
        sizes = {frozenset(): 0, frozenset({1}): 1, frozenset({2}): 1, frozenset({1, 2}): Fraction(3, 2)}
        model = power_set_model([1, 2], size=lambda subset: sizes[subset])
        report = check_metric_laws(model, MetricKind.SYMMETRIC_DIFFERENCE)
        assert not report.passed
        assert report.tags() == {AxiomTag.M3}
        x1, x2, x3 = report.first(AxiomTag.M3).witness
        d = lambda a, b: distance(model, MetricKind.SYMMETRIC_DIFFERENCE, a, b)
        assert d(x1, x3) > d(x1, x2) + d(x2, x3)
        assert {x1, x3} == {"{1}", "{2}"} and x2 == "{1,2}"

    def test_metric_table_triangle_witness(self):
        d = {("a", "b"): 3, ("b", "c"): 1, ("a", "c"): 5}

        def dist(x, y):
            if x == y:
                return Fraction(0)
            return Fraction(d.get((x, y), d.get((y, x))))

        report = check_metric_table(["a", "b", "c"], dist)
        assert report.first(AxiomTag.M3).witness == ("a", "b", "c")

    def test_tied_minimum_is_reported(self):
        model = FiniteMcsModel(["a", "b"], [("a", "a"), ("b", "b")], {"a": 1, "b": 1})
        with pytest.raises(ModelViolationError):
            min_size_element(model)
        assert not check_global_subelement(model).passed

    def test_cap_is_enforced(self):
        model = power_set_model([1, 2, 3])
        with pytest.raises(CapExceededError) as info:
            check_axioms(model, cap=4)
        assert info.value.required == 8


def report_tags(model):
    return check_axioms(model).tags()


@settings(derandomize=True, deadline=None, max_examples=30)
@given(st.lists(positive_rationals, min_size=1, max_size=3))
def test_weighted_set_models_satisfy_all_laws(weights):
    items = list(range(len(weights)))
    model = power_set_model(items, size=lambda subset: sum((weights[i] for i in subset), Fraction(0)))
    assert check_axioms(model).passed
    assert check_aux_inequality(model).passed
    for kind in MetricKind:
        assert check_metric_laws(model, kind).passed


class TestWorkedExamples:

    def test_three_item_power_set(self):
        model = power_set_model([1, 2, 3])
        assert common_subelements(model, ["{1,2}", "{1,3}"]) == {"{}", "{1}"}
        assert max_common_size(model, "{1,2}", "{1,3}") == 1
        assert max_common_subelements(model, "{1,2}", "{1,3}") == ["{1}"]
        assert distance(model, MetricKind.SYMMETRIC_DIFFERENCE, "{1,2}", "{1,3}") == 2

    def test_chain_passes(self):
        model = chain_model([0, 1, 3], names=["a", "b", "c"])
        assert check_axioms(model).passed
        assert min_size_element(model) == "a"

    def test_tied_maximal_common_subelements_are_all_returned(self):
        # p and q are incomparable, equally sized, and both lie below x and y.
        model = FiniteMcsModel.from_dict({
            "elements": ["z", "p", "q", "x", "y"],
            "order": [["z", "p"], ["z", "q"], ["z", "x"], ["z", "y"],
                      ["p", "x"], ["p", "y"], ["q", "x"], ["q", "y"]],
            "size": {"z": "0", "p": "1", "q": "1", "x": "3", "y": "3"},
        })
        assert max_common_subelements(model, "x", "y") == ["p", "q"]
        assert max_common_size(model, "x", "y") == 1

    def test_single_element_model(self):
        model = chain_model([2])
        assert check_axioms(model).passed
        assert check_metric_laws(model, MetricKind.NORMALIZED_UNION).passed
