import math
from fractions import Fraction

import pytest

from deceptiplan.alteration import (
    INF,
    CostFunction,
    Multiset,
    SensorAlteration,
    altered_observation,
    as_cost,
    build_sigma,
    format_cost,
    sigma_size,
    total_cost,
)
from deceptiplan.world import WorldGraph


def test_multiset_equality_ignores_order():
    assert Multiset.of(["b", "a", "a"]) == Multiset.of(["a", "b", "a"])
    x = Multiset.of(["a", "a", "b"])
    assert x.count("a") == 2 and len(x) == 3 and x.support() == ("a", "b")
    assert hash(x) == hash(Multiset.of(["b", "a", "a"]))
    with pytest.raises(AttributeError):
        x.items = ()


@pytest.mark.parametrize("n,m", [(1, 1), (3, 1), (3, 2), (4, 3), (6, 2)])
def test_sigma_size_matches_enumeration(n, m):
    events = [f"y{i}" for i in range(n)]
    sigma = build_sigma(events, m)
    assert len(sigma) == sigma_size(n, m)
    # stars and bars: multisets of size 1..m from n kinds
    assert sigma_size(n, m) == math.comb(n + m, m) - 1


def test_cost_parsing():
    assert as_cost("1/2") == Fraction(1, 2)
    assert as_cost("inf") == INF and as_cost(float("inf")) == INF
    assert as_cost(0.25) == Fraction(1, 4)
    with pytest.raises(ValueError):
        as_cost(-1)
    assert format_cost(Fraction(3, 2)) == "3/2" and format_cost(INF) == "inf"


def test_cost_function_defaults_and_overrides():
    c = CostFunction(["a", "b", "c"], {("a", "b"): "1/2", ("c", "a"): "inf"}, same=0, other=2)
    assert c("a", "a") == 0 and c("a", "c") == 2 and c("a", "b") == Fraction(1, 2)
    assert c.infinite_pairs() == [("c", "a")]
    assert c.finite_targets("a") == ["a", "b", "c"]
    with pytest.raises(ValueError, match="unknown event"):
        CostFunction(["a"], {("a", "z"): 1})


def test_total_cost_absorbs_infinity():
    c = CostFunction(["a", "b"], {("b", "a"): INF})
    assert total_cost({"a": "b", "b": "b"}, c) == 1
    assert total_cost({"a": "a", "b": "a"}, c) == INF


def test_alteration_must_be_total_and_closed():
    with pytest.raises(ValueError, match="not total"):
        SensorAlteration({"a": "a"}, ["a", "b"])
    with pytest.raises(ValueError, match="outside"):
        SensorAlteration({"a": "z"}, ["a"])
    alt = SensorAlteration.with_changes(["a", "b"], {"a": "b"})
    assert alt.changes() == {"a": "b"} and alt["b"] == "b"


def test_non_injective_alteration_gives_multiset():
    w = WorldGraph.build(
        ["A", "B"], "A", {"s": ["a", "b"]}, [("e", "A", "B", ["a", "b"])]
    )
    x = altered_observation({"a": "b", "b": "b"}, w, "e")
    assert x == Multiset.of(["b", "b"]) and x.count("b") == 2
