"""
Abstract MCS Model Machinery

A Maximum Common Subelement (MCS) model is a triple (X, ⪯, s): a finite
domain, a partial order on it and a size function. This module holds the
explicit finite representation of such models plus:
- common subelements (cs), s' and mcs for pairs
- the four metrics d_a, d_b, d_c, d_d
- exhaustive checkers for the order, size and model axioms,
  the metric laws and the auxiliary inequality

All sizes and distances are exact Fractions.
"""

import json
import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from itertools import combinations
from pathlib import Path
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Set, Tuple, Union

import networkx as nx

from .errors import CapExceededError, ContractViolationError, InputError, ModelViolationError
from .rational import format_rational, parse_rational

logger = logging.getLogger(__name__)

Element = str

# A2 is cubic with an inner search; above this many elements the checkers refuse.
DEFAULT_ELEMENT_CAP = 64
ELEMENT_CAP_MAX = 4096


class MetricKind(Enum):
    """The four metrics valid on every MCS model."""
    SYMMETRIC_DIFFERENCE = "da"  # s1 + s2 - 2 s12
    MAX_MINUS_COMMON = "db"      # max(s1, s2) - s12
    NORMALIZED_MAX = "dc"        # 1 - s12 / max(s1, s2)
    NORMALIZED_UNION = "dd"      # 1 - s12 / (s1 + s2 - s12)

    @classmethod
    def parse(cls, text: str) -> "MetricKind":
        """Accept "da".."dd", "d_a".."d_d" or the enum name."""
        key = text.strip().lower().replace("_", "")
        for kind in cls:
            if key == kind.value or key == kind.name.lower().replace("_", ""):
                return kind
        raise InputError(f"Unknown metric: {text!r} (expected one of da, db, dc, dd)")


class AxiomTag(Enum):
    """Tags naming the law a violation breaks."""
    R1 = "R1"
    R2 = "R2"
    R3 = "R3"
    S1 = "S1"
    S2 = "S2"
    A1 = "A1'"
    A2 = "A2"
    M1 = "M1"
    M2 = "M2"
    M3 = "M3"
    M4 = "M4"
    AUX = "AUX"
    GLOBAL_MIN = "MIN"
    RECOVERY = "RECOVERY"
    EDGE_WITNESS = "MCS_EDGE"
    GED_IDENTITY = "GED_IDENTITY"


@dataclass(frozen=True)
class Violation:
    """One failed law with the elements that witness it."""
    tag: AxiomTag
    witness: Tuple[str, ...]
    detail: str = ""

    def to_dict(self) -> Dict:
        data = {"axiom": self.tag.value, "witness": list(self.witness)}
        if self.detail:
            data["detail"] = self.detail
        return data


@dataclass
class AxiomReport:
    """Outcome of an exhaustive check: passed iff no violations were found."""
    violations: List[Violation] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def tags(self) -> Set[AxiomTag]:
        """Set of failed law tags."""
        return {v.tag for v in self.violations}

    def first(self, tag: AxiomTag) -> Optional[Violation]:
        """First recorded violation for a tag, if any."""
        for violation in self.violations:
            if violation.tag == tag:
                return violation
        return None

    def merge(self, other: "AxiomReport") -> "AxiomReport":
        """Combine two reports into a new one."""
        return AxiomReport(self.violations + other.violations)

    def to_dict(self) -> Dict:
        return {
            "passed": self.passed,
            "violations": [v.to_dict() for v in self.violations],
        }


class _FirstWitness:
    """Collects at most one witness per tag (the first one offered)."""

    def __init__(self):
        self._seen: Dict[AxiomTag, Violation] = {}

    def add(self, tag: AxiomTag, *witness: str, detail: str = "") -> None:
        if tag not in self._seen:
            self._seen[tag] = Violation(tag, tuple(witness), detail)

    def has(self, tag: AxiomTag) -> bool:
        return tag in self._seen

    def report(self) -> AxiomReport:
        return AxiomReport(list(self._seen.values()))


class FiniteMcsModel:
    """
    An explicitly finite domain with an order relation and a size map.

    The relation is stored exactly as given: nothing is closed implicitly,
    so the checkers can report a relation that is not a partial order.
    Instances are immutable after construction; s' lookups are memoized.

    Example:
        >>> model = power_set_model([1, 2])
        >>> max_common_size(model, "{1}", "{2}")
        Fraction(0, 1)
    """

    def __init__(
        self,
        elements: Sequence[Element],
        order: Iterable[Tuple[Element, Element]],
        sizes: Mapping[Element, Union[Fraction, int, str]],
    ):
        """
        Build a model.

        Args:
            elements: Element identifiers (unique strings).
            order: Pairs (x1, x2) meaning x1 ⪯ x2.
            sizes: Size of every element, nonnegative.

        Raises:
            InputError: On duplicate or unknown identifiers, missing or negative sizes.
        """
        self._elements: Tuple[Element, ...] = tuple(elements)
        known = set(self._elements)
        if len(known) != len(self._elements):
            dupes = sorted({e for e in self._elements if self._elements.count(e) > 1})
            raise InputError(f"Duplicate element identifiers: {dupes}")

        pairs = set()
        for x1, x2 in order:
            if x1 not in known or x2 not in known:
                missing = x1 if x1 not in known else x2
                raise InputError(f"Order pair ({x1!r}, {x2!r}) names unknown element {missing!r}")
            pairs.add((x1, x2))
        self._order = frozenset(pairs)

        self._sizes: Dict[Element, Fraction] = {}
        for x in self._elements:
            if x not in sizes:
                raise InputError(f"Missing size for element {x!r}")
            value = parse_rational(sizes[x])
            if value < 0:
                raise InputError(f"Size of {x!r} is negative ({format_rational(value)})")
            self._sizes[x] = value
        extra = set(sizes) - known
        if extra:
            raise InputError(f"Sizes given for unknown elements: {sorted(extra)}")

        below: Dict[Element, Set[Element]] = {x: set() for x in self._elements}
        above: Dict[Element, Set[Element]] = {x: set() for x in self._elements}
        for x1, x2 in self._order:
            below[x2].add(x1)
            above[x1].add(x2)
        self._below = {x: frozenset(s) for x, s in below.items()}
        self._above = {x: frozenset(s) for x, s in above.items()}
        self._rank = {x: i for i, x in enumerate(self._elements)}
        self._pair_cache: Dict[Tuple[Element, Element], Tuple[Fraction, Tuple[Element, ...]]] = {}

    # ------------------------------------------------------------------
    # Accessors
    # ------------------------------------------------------------------

    @property
    def elements(self) -> Tuple[Element, ...]:
        return self._elements

    @property
    def order(self) -> frozenset:
        return self._order

    def __len__(self) -> int:
        return len(self._elements)

    def __contains__(self, x: object) -> bool:
        return x in self._sizes

    def require(self, x: Element) -> Element:
        """Return x, or raise InputError when it is not an element."""
        if x not in self._sizes:
            raise InputError(f"Unknown element identifier: {x!r}")
        return x

    def leq(self, x1: Element, x2: Element) -> bool:
        """True iff x1 ⪯ x2."""
        return (x1, x2) in self._order

    def size(self, x: Element) -> Fraction:
        return self._sizes[self.require(x)]

    def down_set(self, x: Element) -> frozenset:
        """All y with y ⪯ x."""
        return self._below[self.require(x)]

    def up_set(self, x: Element) -> frozenset:
        """All y with x ⪯ y."""
        return self._above[self.require(x)]

    def in_order(self, xs: Iterable[Element]) -> List[Element]:
        """Sort elements by declaration order."""
        return sorted(xs, key=self._rank.__getitem__)

    # ------------------------------------------------------------------
    # Serialization
    # ------------------------------------------------------------------

    def to_dict(self) -> Dict:
        """Convert to the JSON document shape."""
        return {
            "elements": list(self._elements),
            "order": [list(p) for p in sorted(self._order)],
            "size": {x: format_rational(self._sizes[x]) for x in self._elements},
        }

    @classmethod
    def from_dict(cls, data: Dict, close_order: bool = False) -> "FiniteMcsModel":
        """
        Create from a JSON document.

        The given pairs are completed with the reflexive pairs. With
        close_order=True the transitive closure is taken as well;
        otherwise the relation is kept as-is and R2 is checked on it.
        """
        try:
            elements = [str(e) for e in data["elements"]]
            raw_order = data.get("order", [])
            raw_sizes = data["size"]
        except (KeyError, TypeError) as e:
            raise InputError(f"Model document is missing field {e}")
        if not isinstance(raw_sizes, dict):
            raise InputError(f"Model field 'size' must be an object {{id: \"p/q\"}}, got {type(raw_sizes).__name__}")
        if not isinstance(raw_order, (list, tuple)):
            raise InputError(f"Model field 'order' must be a list of pairs, got {type(raw_order).__name__}")
        pairs = []
        for item in raw_order:
            if not isinstance(item, (list, tuple)) or len(item) != 2:
                raise InputError(f"Order entries must be [id, id] pairs, got {item!r}")
            pairs.append((str(item[0]), str(item[1])))
        pairs.extend((x, x) for x in elements)
        if close_order:
            pairs = _transitive_closure(elements, pairs)
        return cls(elements, pairs, {str(k): v for k, v in raw_sizes.items()})

    @classmethod
    def load(cls, path: Union[str, Path], close_order: bool = False) -> "FiniteMcsModel":
        """Load a model from a JSON file."""
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            raise InputError(f"Cannot read model {path}: {e}")
        return cls.from_dict(data, close_order=close_order)

    def __repr__(self) -> str:
        return f"FiniteMcsModel({len(self._elements)} elements, {len(self._order)} order pairs)"


def _transitive_closure(elements: Sequence[Element], pairs: Iterable[Tuple[Element, Element]]) -> List[Tuple[Element, Element]]:
    graph = nx.DiGraph()
    graph.add_nodes_from(elements)
    graph.add_edges_from(pairs)
    closed = nx.transitive_closure(graph, reflexive=True)
    return list(closed.edges())


# ----------------------------------------------------------------------
# Example model constructors
# ----------------------------------------------------------------------

def subset_id(items: Iterable) -> str:
    """Identifier of a finite set in power_set_model: "{}", "{1}", "{1,2}"."""
    return "{" + ",".join(str(i) for i in sorted(items, key=str)) + "}"


def power_set_model(items: Sequence, size: Optional[Callable[[frozenset], Fraction]] = None) -> FiniteMcsModel:
    """
    Weighted-set model: all subsets ordered by inclusion.

    Args:
        items: Ground set.
        size: Size of a subset; defaults to its cardinality.
    """
    size = size or (lambda subset: Fraction(len(subset)))
    subsets = [frozenset(c) for k in range(len(items) + 1) for c in combinations(items, k)]
    ids = {s: subset_id(s) for s in subsets}
    order = [(ids[a], ids[b]) for a in subsets for b in subsets if a <= b]
    return FiniteMcsModel([ids[s] for s in subsets], order, {ids[s]: size(s) for s in subsets})


def chain_model(sizes: Sequence[Union[Fraction, int, str]], names: Optional[Sequence[str]] = None) -> FiniteMcsModel:
    """A totally ordered model x0 ⪯ x1 ⪯ ... with the given sizes."""
    names = list(names) if names else [f"x{i}" for i in range(len(sizes))]
    order = [(names[i], names[j]) for i in range(len(names)) for j in range(i, len(names))]
    return FiniteMcsModel(names, order, dict(zip(names, sizes)))


def discrete_model(labels: Iterable[str], size: Union[Fraction, int, str] = 1) -> FiniteMcsModel:
    """Equality-only order: every label is a subelement of itself only."""
    labels = sorted(set(labels))
    return FiniteMcsModel(labels, [(x, x) for x in labels], {x: size for x in labels})


# ----------------------------------------------------------------------
# cs, s', mcs
# ----------------------------------------------------------------------

def common_subelements(model: FiniteMcsModel, subset: Iterable[Element]) -> Set[Element]:
    """
    cs(X') = { x : x ⪯ y for all y in X' }.

    The empty subset yields every element.
    """
    members = [model.require(y) for y in subset]
    if not members:
        return set(model.elements)
    common = set(model.down_set(members[0]))
    for y in members[1:]:
        common &= model.down_set(y)
    return common


def _pair_table(model: FiniteMcsModel, x1: Element, x2: Element) -> Tuple[Fraction, Tuple[Element, ...]]:
    key = (x1, x2) if x1 <= x2 else (x2, x1)
    cached = model._pair_cache.get(key)
    if cached is not None:
        return cached
    common = common_subelements(model, [x1, x2])
    if not common:
        raise ModelViolationError(f"cs({{{x1}, {x2}}}) is empty: axiom A1 fails")
    best = max(model.size(x) for x in common)
    winners = tuple(sorted(x for x in common if model.size(x) == best))
    model._pair_cache[key] = (best, winners)
    return best, winners


def max_common_size(model: FiniteMcsModel, x1: Element, x2: Element) -> Fraction:
    """s'({x1, x2}): the largest size among common subelements."""
    model.require(x1)
    model.require(x2)
    return _pair_table(model, x1, x2)[0]


def max_common_subelements(model: FiniteMcsModel, x1: Element, x2: Element) -> List[Element]:
    """mcs({x1, x2}): common subelements of size s', sorted by identifier."""
    model.require(x1)
    model.require(x2)
    return list(_pair_table(model, x1, x2)[1])


def max_common_size_of(model: FiniteMcsModel, subset: Iterable[Element]) -> Fraction:
    """s'(X') for a subset of one or two elements; larger subsets are rejected."""
    members = sorted(set(subset))
    if not 1 <= len(members) <= 2:
        raise ContractViolationError(f"s' is only defined for 1- or 2-element subsets, got {len(members)}")
    return max_common_size(model, members[0], members[-1])


# ----------------------------------------------------------------------
# Metrics
# ----------------------------------------------------------------------

def metric_value(kind: MetricKind, s1: Fraction, s2: Fraction, s12: Fraction) -> Fraction:
    """
    Evaluate one of the four metrics from the two sizes and s'.

    Raises:
        ContractViolationError: If s12 is negative or exceeds min(s1, s2).
    """
    s1, s2, s12 = Fraction(s1), Fraction(s2), Fraction(s12)
    if s12 < 0 or s12 > min(s1, s2):
        raise ContractViolationError(
            f"common size {format_rational(s12)} must lie in [0, min({format_rational(s1)}, {format_rational(s2)})]"
        )
    if kind is MetricKind.SYMMETRIC_DIFFERENCE:
        return s1 + s2 - 2 * s12
    if kind is MetricKind.MAX_MINUS_COMMON:
        return max(s1, s2) - s12
    if s1 == 0 and s2 == 0:
        return Fraction(0)
    if kind is MetricKind.NORMALIZED_MAX:
        return 1 - s12 / max(s1, s2)
    return 1 - s12 / (s1 + s2 - s12)


def distance(model: FiniteMcsModel, kind: MetricKind, x1: Element, x2: Element) -> Fraction:
    """Distance between two model elements under the chosen metric."""
    return metric_value(kind, model.size(x1), model.size(x2), max_common_size(model, x1, x2))


# ----------------------------------------------------------------------
# Checkers
# ----------------------------------------------------------------------

def _check_cap(model: FiniteMcsModel, cap: int) -> None:
    cap = max(1, min(ELEMENT_CAP_MAX, cap))
    if len(model) > cap:
        raise CapExceededError("model elements", len(model), cap)


def check_axioms(model: FiniteMcsModel, cap: int = DEFAULT_ELEMENT_CAP) -> AxiomReport:
    """
    Exhaustively check R1-R3, S1-S2, A1' and A2.

    Elements are scanned in declaration order, so the witness recorded for
    each failed law is the lexicographically smallest one in that order.

    Raises:
        CapExceededError: If the model has more than `cap` elements.
    """
    _check_cap(model, cap)
    found = _FirstWitness()
    xs = model.elements

    for x in xs:
        if not model.leq(x, x):
            found.add(AxiomTag.R1, x)

    for x1 in xs:
        for x2 in model.in_order(model.up_set(x1)):
            for x3 in model.in_order(model.up_set(x2)):
                if not model.leq(x1, x3):
                    found.add(AxiomTag.R2, x1, x2, x3)
            if x1 != x2:
                if model.leq(x2, x1):
                    found.add(AxiomTag.R3, *model.in_order((x1, x2)))
                if model.size(x1) == model.size(x2):
                    found.add(AxiomTag.S2, x1, x2)
            if model.size(x1) > model.size(x2):
                found.add(AxiomTag.S1, x1, x2)

    for i, x1 in enumerate(xs):
        for x2 in xs[i:]:
            common = model.down_set(x1) & model.down_set(x2)
            if not common:
                found.add(AxiomTag.A1, x1, x2)

    for x1 in xs:
        for x2 in xs:
            common = model.down_set(x1) & model.down_set(x2)
            if not common:
                continue
            best = max(model.size(y) for y in common)
            bound = model.size(x1) + model.size(x2) - best
            for x in model.in_order(model.up_set(x1) & model.up_set(x2)):
                if model.size(x) < bound:
                    found.add(AxiomTag.A2, x1, x2, x)
                    break

    report = found.report()
    logger.debug("check_axioms on %r: %d violation(s)", model, len(report.violations))
    return report


def check_metric_table(
    points: Sequence[str],
    dist: Callable[[str, str], Fraction],
    label: str = "",
) -> AxiomReport:
    """
    Exactly check M1-M4 for a distance function over a finite point list.

    Witnesses are lexicographically smallest in the given point order; for
    M3 the witness (x1, x2, x3) means d(x1, x3) > d(x1, x2) + d(x2, x3).
    """
    found = _FirstWitness()
    xs = list(points)
    table = {(a, b): Fraction(dist(a, b)) for a in xs for b in xs}
    for a in xs:
        if table[a, a] != 0:
            found.add(AxiomTag.M1, a, detail=label)
    for i, a in enumerate(xs):
        for b in xs[i + 1:]:
            if table[a, b] != table[b, a]:
                found.add(AxiomTag.M2, a, b, detail=label)
            if table[a, b] == 0 or table[b, a] == 0:
                found.add(AxiomTag.M4, a, b, detail=label)
    for a in xs:
        for b in xs:
            for c in xs:
                if table[a, c] > table[a, b] + table[b, c]:
                    found.add(AxiomTag.M3, a, b, c, detail=label)
                    break
            if found.has(AxiomTag.M3):
                break
        if found.has(AxiomTag.M3):
            break
    return found.report()


def check_metric_laws(model: FiniteMcsModel, kind: MetricKind, cap: int = DEFAULT_ELEMENT_CAP) -> AxiomReport:
    """Exhaustively check M1-M4 for `distance` on the model."""
    _check_cap(model, cap)
    return check_metric_table(
        model.elements,
        lambda a, b: distance(model, kind, a, b),
        label=kind.value,
    )


def min_size_element(model: FiniteMcsModel) -> Element:
    """
    Return the unique element of minimum size; it must be ⪯ every element.

    Raises:
        ModelViolationError: If the minimum is shared or it is not a global subelement.
    """
    if len(model) == 0:
        raise ModelViolationError("Model has no elements")
    smallest = min(model.size(x) for x in model.elements)
    holders = sorted(x for x in model.elements if model.size(x) == smallest)
    if len(holders) > 1:
        raise ModelViolationError(
            f"Elements {holders[0]!r} and {holders[1]!r} share the minimum size {format_rational(smallest)}"
        )
    x0 = holders[0]
    missing = sorted(set(model.elements) - model.up_set(x0))
    if missing:
        raise ModelViolationError(f"Minimum-size element {x0!r} is not a subelement of {missing[0]!r}")
    return x0


def check_global_subelement(model: FiniteMcsModel) -> AxiomReport:
    """Report (instead of raising) when the minimum-size element is not unique and global."""
    try:
        min_size_element(model)
    except ModelViolationError as e:
        smallest = min(model.size(x) for x in model.elements)
        holders = tuple(sorted(x for x in model.elements if model.size(x) == smallest))
        return AxiomReport([Violation(AxiomTag.GLOBAL_MIN, holders, str(e))])
    return AxiomReport()


def check_aux_inequality(model: FiniteMcsModel, cap: int = DEFAULT_ELEMENT_CAP) -> AxiomReport:
    """Check s'({x1,x2}) + s'({x2,x3}) <= s(x2) + s'({x1,x3}) over all ordered triples."""
    _check_cap(model, cap)
    xs = model.elements
    for x1 in xs:
        for x2 in xs:
            left_12 = max_common_size(model, x1, x2)
            for x3 in xs:
                left = left_12 + max_common_size(model, x2, x3)
                right = model.size(x2) + max_common_size(model, x1, x3)
                if left > right:
                    return AxiomReport([Violation(AxiomTag.AUX, (x1, x2, x3))])
    return AxiomReport()
