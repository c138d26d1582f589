import itertools
import re

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from deceptiplan.automata import (
    DFA,
    NFA,
    PARTIAL,
    AutomatonError,
    FiniteAutomaton,
    RegexSyntaxError,
    accepts,
    complement,
    determinize,
    intersect_empty,
    is_empty,
    minimize,
    parse_regex,
    regex_to_dfa,
    totalize,
    universal_dfa,
)

AB = ("a", "b")


def words(alphabet, max_len):
    for n in range(max_len + 1):
        yield from itertools.product(sorted(alphabet), repeat=n)


def language(aut, max_len=6):
    return {w for w in words(aut.alphabet, max_len) if accepts(aut, w)}


def moore_classes(dfa):
    """Number of Myhill-Nerode classes by naive Moore refinement (second route)."""
    from deceptiplan.automata import reachable_states

    live = sorted(reachable_states(dfa), key=repr)
    cls = {q: q in dfa.accepting for q in live}
    while True:
        sig = {q: (cls[q],) + tuple(cls[dfa.step(q, a)] for a in sorted(dfa.alphabet)) for q in live}
        ids = {s: i for i, s in enumerate(sorted(set(sig.values()), key=repr))}
        new = {q: ids[sig[q]] for q in live}
        if len(set(new.values())) == len(set(cls.values())):
            return len(set(new.values()))
        cls = new


# ends with "a b": the classic three-state NFA
ENDS_AB = FiniteAutomaton(
    [0, 1, 2], AB, {0: {"a": [0, 1], "b": [0]}, 1: {"b": [2]}}, 0, [2], NFA
)


def test_determinize_preserves_language():
    d = determinize(ENDS_AB)
    assert d.kind == DFA
    assert language(d) == {w for w in words(AB, 6) if w[-2:] == ("a", "b")}


def test_minimize_dragon_book_example():
    # (a|b)*abb needs exactly four states
    d = regex_to_dfa("(a|b)* a b b", AB)
    assert len(d.states) == 4
    assert language(d) == {w for w in words(AB, 6) if w[-3:] == ("a", "b", "b")}


def test_minimize_is_canonical():
    d1 = regex_to_dfa("(a b)* | a (b a)* b", AB)
    d2 = regex_to_dfa("(a b)*", AB)
    assert d1.delta == d2.delta and d1.accepting == d2.accepting


def test_complement_requires_total():
    partial = FiniteAutomaton([0], AB, {0: {"a": 0}}, 0, [0], PARTIAL)
    with pytest.raises(AutomatonError, match="total DFA"):
        complement(partial)
    total = totalize(partial)
    assert language(complement(total)) == set(words(AB, 6)) - {("a",) * n for n in range(7)}


def test_total_dfa_must_be_complete():
    with pytest.raises(AutomatonError, match="no transition"):
        FiniteAutomaton([0], AB, {0: {"a": 0}}, 0, [0], DFA)


def test_intersect_empty_returns_shortest_witness():
    a = regex_to_dfa("(a|b)* b (a|b)*", AB)
    b = regex_to_dfa("a a (a|b)*", AB)
    w = intersect_empty(a, b)
    assert w == ("a", "a", "b")
    assert intersect_empty(a, universal_dfa(AB, accept=False)) is None
    assert is_empty(universal_dfa(AB, accept=False))


@pytest.mark.parametrize(
    "text,pos",
    [("a (b", 4), ("a | * b", 4), ("a )", 2), ("c", 0), ("a $", 2)],
)
def test_regex_syntax_errors_carry_position(text, pos):
    with pytest.raises((RegexSyntaxError, AutomatonError)) as info:
        regex_to_dfa(text, AB)
    if isinstance(info.value, RegexSyntaxError):
        assert info.value.position == pos


def test_empty_alternative_is_epsilon():
    assert language(regex_to_dfa("", AB)) == {()}
    assert language(regex_to_dfa("a |", AB)) == {(), ("a",)}


def test_epsilon_spellings():
    for eps in ("eps", "ε", "<eps>"):
        assert language(regex_to_dfa(eps, AB)) == {()}
    assert language(regex_to_dfa("a eps b", AB)) == {("a", "b")}


def test_multi_character_identifiers():
    alphabet = ("e1", "e10", "o1+")
    d = regex_to_dfa("e1 e10* o1+", alphabet)
    assert accepts(d, ("e1", "e10", "e10", "o1+"))
    assert not accepts(d, ("e1",))
    assert parse_regex("e10", alphabet) != parse_regex("e1", alphabet)


# -- randomized, against Python's re module --------------------------------

LETTERS = ("a", "b", "c")


@st.composite
def regexes(draw, depth=3):
    if depth == 0 or draw(st.integers(0, 3)) == 0:
        return draw(st.sampled_from(LETTERS + ("eps",)))
    kind = draw(st.sampled_from(("cat", "alt", "star")))
    if kind == "star":
        return f"({draw(regexes(depth=depth - 1))})*"
    left, right = draw(regexes(depth=depth - 1)), draw(regexes(depth=depth - 1))
    return f"({left} {right})" if kind == "cat" else f"({left} | {right})"


def to_python_re(text):
    return text.replace(" ", "").replace("eps", "")


@settings(max_examples=150, deadline=None)
@given(regexes())
def test_regex_matches_python_re(text):
    d = regex_to_dfa(text, LETTERS)
    pattern = re.compile(to_python_re(text))
    for w in words(LETTERS, 5):
        assert accepts(d, w) == bool(pattern.fullmatch("".join(w))), (text, w)


@st.composite
def nfas(draw):
    n = draw(st.integers(1, 4))
    delta = {}
    for q in range(n):
        for a in AB:
            succ = draw(st.lists(st.integers(0, n - 1), max_size=2))
            if succ:
                delta.setdefault(q, {})[a] = succ
    acc = draw(st.lists(st.integers(0, n - 1), max_size=n))
    return FiniteAutomaton(range(n), AB, delta, 0, acc, NFA)


@settings(max_examples=150, deadline=None)
@given(nfas())
def test_determinize_minimize_roundtrip(nfa):
    d = determinize(nfa)
    m = minimize(d)
    assert language(nfa) == language(d) == language(m)
    assert len(m.states) == moore_classes(d)
    again = minimize(m)
    assert again.delta == m.delta and again.accepting == m.accepting
    comp = language(complement(m))
    assert comp == set(words(AB, 6)) - language(m)
