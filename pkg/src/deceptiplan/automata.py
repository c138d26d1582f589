"""Finite automata over arbitrary hashable alphabets.

Automata are immutable values.  Transitions are stored as
``state -> symbol -> frozenset(states)`` for every kind; DFAs simply have
singleton successor sets.  The operations here are the ones the planner
needs: subset construction, Hopcroft minimization, complementation,
products (with a world graph or with another automaton) and a small
regular-expression compiler.
"""

from __future__ import annotations

from collections import deque
from collections.abc import Callable, Hashable, Iterable, Mapping
from dataclasses import dataclass

NFA = "nfa"
DFA = "dfa"
PARTIAL = "partial"
KINDS = (NFA, DFA, PARTIAL)


class AutomatonError(ValueError):
    pass


def order_key(x):
    """Deterministic sort key for states and symbols of mixed types."""
    k = getattr(x, "sort_key", None)
    if k is not None:
        return (0, type(x).__name__, k)
    if isinstance(x, bool):
        return (1, "int", int(x))
    if isinstance(x, (int, str)):
        return (1, type(x).__name__, x)
    if isinstance(x, tuple):
        return (2, tuple(order_key(i) for i in x))
    if isinstance(x, frozenset):
        return (3, tuple(sorted(order_key(i) for i in x)))
    return (4, repr(x))


def ordered(xs: Iterable) -> list:
    return sorted(xs, key=order_key)


class FiniteAutomaton:
    """An NFA, a total DFA or a partial DFA.

    ``transitions`` maps ``state -> {symbol: successors}``.  Successors may
    be a single state (deterministic kinds) or an iterable of states.
    """

    __slots__ = ("states", "alphabet", "delta", "initial", "accepting", "kind")

    def __init__(
        self,
        states: Iterable[Hashable],
        alphabet: Iterable[Hashable],
        transitions: Mapping,
        initial: Hashable,
        accepting: Iterable[Hashable],
        kind: str = NFA,
    ):
        if kind not in KINDS:
            raise AutomatonError(f"unknown automaton kind {kind!r}")
        states = frozenset(states)
        alphabet = frozenset(alphabet)
        delta: dict = {}
        for q, row in transitions.items():
            if q not in states:
                raise AutomatonError(f"transition source {q!r} is not a state")
            new_row = {}
            for a, succ in row.items():
                if a not in alphabet:
                    raise AutomatonError(f"symbol {a!r} is not in the alphabet")
                succ = frozenset(succ) if kind == NFA else frozenset((succ,))
                for s in succ:
                    if s not in states:
                        raise AutomatonError(f"transition target {s!r} is not a state")
                if succ:
                    new_row[a] = succ
            if new_row:
                delta[q] = new_row
        if initial not in states:
            raise AutomatonError(f"initial state {initial!r} is not a state")
        accepting = frozenset(accepting)
        if not accepting <= states:
            raise AutomatonError("accepting states must be states")
        if kind == DFA:
            for q in states:
                row = delta.get(q, {})
                if len(row) != len(alphabet):
                    missing = ordered(alphabet - row.keys())[0]
                    raise AutomatonError(
                        f"total DFA has no transition from {q!r} on {missing!r}"
                    )
        for attr, val in (
            ("states", states),
            ("alphabet", alphabet),
            ("delta", delta),
            ("initial", initial),
            ("accepting", accepting),
            ("kind", kind),
        ):
            object.__setattr__(self, attr, val)

    def __setattr__(self, name, value):
        raise AttributeError("automata are immutable")

    def __repr__(self):
        return (
            f"FiniteAutomaton(kind={self.kind}, states={len(self.states)}, "
            f"alphabet={len(self.alphabet)}, accepting={len(self.accepting)})"
        )

    @property
    def deterministic(self) -> bool:
        return self.kind in (DFA, PARTIAL)

    def successors(self, q, a) -> frozenset:
        return self.delta.get(q, {}).get(a, frozenset())

    def step(self, q, a):
        """Deterministic successor, or ``None`` where a partial DFA is undefined."""
        succ = self.delta.get(q, {}).get(a)
        if succ is None:
            return None
        if len(succ) != 1:
            raise AutomatonError("step() on a nondeterministic transition")
        return next(iter(succ))

    def out(self, q) -> Mapping:
        return self.delta.get(q, {})

    def transitions(self):
        """Yield ``(q, a, q')`` triples in deterministic order."""
        for q in ordered(self.delta):
            row = self.delta[q]
            for a in ordered(row):
                for s in ordered(row[a]):
                    yield q, a, s


def accepts(aut: FiniteAutomaton, word: Iterable) -> bool:
    current = {aut.initial}
    for a in word:
        if a not in aut.alphabet:
            raise AutomatonError(f"symbol {a!r} is not in the alphabet")
        nxt = set()
        for q in current:
            nxt |= aut.successors(q, a)
        if not nxt:
            return False
        current = nxt
    return not current.isdisjoint(aut.accepting)


def reachable_states(aut: FiniteAutomaton) -> set:
    seen = {aut.initial}
    queue = deque([aut.initial])
    while queue:
        q = queue.popleft()
        for succ in aut.out(q).values():
            for s in succ:
                if s not in seen:
                    seen.add(s)
                    queue.append(s)
    return seen


def coreachable_states(aut: FiniteAutomaton) -> set:
    """States from which some accepting state can be reached."""
    preds: dict = {}
    for q, row in aut.delta.items():
        for succ in row.values():
            for s in succ:
                preds.setdefault(s, set()).add(q)
    seen = set(aut.accepting)
    queue = deque(seen)
    while queue:
        q = queue.popleft()
        for p in preds.get(q, ()):
            if p not in seen:
                seen.add(p)
                queue.append(p)
    return seen


def determinize(aut: FiniteAutomaton) -> FiniteAutomaton:
    """Subset construction.

    Only subsets reachable from ``{initial}`` are built.  States of the
    result are integers in breadth-first discovery order; the empty subset,
    when reachable, is an ordinary rejecting sink.
    """
    if not aut.alphabet:
        raise AutomatonError("cannot determinize over an empty alphabet")
    symbols = ordered(aut.alphabet)
    start = frozenset((aut.initial,))
    index = {start: 0}
    subsets = [start]
    rows: list[dict] = []
    queue = deque([start])
    dead = None
    while queue:
        subset = queue.popleft()
        moves: dict = {}
        for q in subset:
            for a, succ in aut.out(q).items():
                moves.setdefault(a, set()).update(succ)
        row = {}
        for a in symbols:
            target = moves.get(a)
            if target:
                key = frozenset(target)
            else:
                if dead is None:
                    dead = frozenset()
                key = dead
            if key not in index:
                index[key] = len(subsets)
                subsets.append(key)
                queue.append(key)
            row[a] = index[key]
        rows.append(row)
    accepting = [i for i, s in enumerate(subsets) if not s.isdisjoint(aut.accepting)]
    return FiniteAutomaton(
        range(len(subsets)), aut.alphabet, dict(enumerate(rows)), 0, accepting, DFA
    )


def totalize(aut: FiniteAutomaton, sink: Hashable = "__sink__") -> FiniteAutomaton:
    """Complete a partial DFA with an explicit rejecting sink."""
    if aut.kind == DFA:
        return aut
    if aut.kind != PARTIAL:
        raise AutomatonError("totalize() expects a partial DFA")
    if sink in aut.states:
        raise AutomatonError(f"sink name {sink!r} clashes with an existing state")
    states = set(aut.states) | {sink}
    rows = {}
    for q in states:
        row = {a: sink for a in aut.alphabet}
        for a, succ in aut.out(q).items():
            row[a] = next(iter(succ))
        rows[q] = row
    return FiniteAutomaton(states, aut.alphabet, rows, aut.initial, aut.accepting, DFA)


def complement(dfa: FiniteAutomaton) -> FiniteAutomaton:
    """Flip accepting states of a total DFA."""
    if dfa.kind != DFA:
        raise AutomatonError(
            f"complement() needs a total DFA, got {dfa.kind}; totalize it first"
        )
    rows = {q: {a: next(iter(s)) for a, s in row.items()} for q, row in dfa.delta.items()}
    return FiniteAutomaton(
        dfa.states, dfa.alphabet, rows, dfa.initial, dfa.states - dfa.accepting, DFA
    )


def minimize(dfa: FiniteAutomaton) -> FiniteAutomaton:
    """Hopcroft partition refinement on the reachable part of a total DFA.

    Result states are integers numbered in breadth-first order from the
    initial state, so equal languages give identical automata.
    """
    if dfa.kind != DFA:
        raise AutomatonError(f"minimize() needs a total DFA, got {dfa.kind}")
    live = reachable_states(dfa)
    symbols = ordered(dfa.alphabet)
    inverse: dict = {a: {} for a in symbols}
    for q in live:
        for a, succ in dfa.out(q).items():
            inverse[a].setdefault(next(iter(succ)), set()).add(q)

    finals = frozenset(live & dfa.accepting)
    others = frozenset(live - dfa.accepting)
    partition = {p for p in (finals, others) if p}
    work = {min((finals, others), key=len)} if finals and others else set(partition)
    while work:
        splitter = work.pop()
        for a in symbols:
            inv_a = inverse[a]
            x = set()
            for s in splitter:
                x |= inv_a.get(s, set())
            if not x:
                continue
            for block in list(partition):
                inter = block & x
                if not inter or len(inter) == len(block):
                    continue
                diff = block - inter
                inter, diff = frozenset(inter), frozenset(diff)
                partition.remove(block)
                partition.add(inter)
                partition.add(diff)
                if block in work:
                    work.remove(block)
                    work.add(inter)
                    work.add(diff)
                else:
                    work.add(min(inter, diff, key=len))

    block_of = {q: blk for blk in partition for q in blk}
    numbering = {block_of[dfa.initial]: 0}
    queue = deque([block_of[dfa.initial]])
    rows = {}
    while queue:
        blk = queue.popleft()
        rep = next(iter(blk))
        row = {}
        for a in symbols:
            tgt = block_of[dfa.step(rep, a)]
            if tgt not in numbering:
                numbering[tgt] = len(numbering)
                queue.append(tgt)
            row[a] = numbering[tgt]
        rows[numbering[blk]] = row
    accepting = [numbering[b] for b in partition if b <= dfa.accepting]
    return FiniteAutomaton(
        range(len(numbering)), dfa.alphabet, rows, 0, accepting, DFA
    )


def relabel(
    aut: FiniteAutomaton, label: Callable[[Hashable], Hashable], alphabet: Iterable
) -> FiniteAutomaton:
    """Replace every transition symbol ``a`` by ``label(a)``.

    Transitions that collide on a new label become nondeterministic, so the
    result is always an NFA.
    """
    alphabet = frozenset(alphabet)
    rows: dict = {}
    for q, row in aut.delta.items():
        new_row: dict = {}
        for a, succ in row.items():
            new_row.setdefault(label(a), set()).update(succ)
        rows[q] = new_row
    return FiniteAutomaton(aut.states, alphabet, rows, aut.initial, aut.accepting, NFA)


def product_with_world(aut: FiniteAutomaton, world) -> FiniteAutomaton:
    """Synchronous product of a total DFA over edges with a world graph.

    A transition on edge ``e`` exists from ``(q, v)`` only when ``e`` leaves
    ``v``.  Only states reachable from ``(initial, v0)`` are kept.
    """
    if aut.kind != DFA:
        raise AutomatonError("product_with_world() needs a total DFA over edges")
    edges = frozenset(world.edges)
    if aut.alphabet != edges:
        extra = ordered(aut.alphabet ^ edges)
        raise AutomatonError(f"alphabet and edge set differ on {extra[:5]}")
    out_edges = world.out_edges
    start = (aut.initial, world.initial)
    seen = {start}
    queue = deque([start])
    rows = {}
    while queue:
        q, v = queue.popleft()
        row = {}
        for e in out_edges(v):
            nxt = (aut.step(q, e), world.tgt(e))
            row[e] = nxt
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
        rows[(q, v)] = row
    accepting = [s for s in seen if s[0] in aut.accepting]
    return FiniteAutomaton(seen, edges, rows, start, accepting, PARTIAL)


def intersect_empty(a: FiniteAutomaton, b: FiniteAutomaton):
    """Breadth-first emptiness check of ``L(a) & L(b)``.

    Returns ``None`` when the intersection is empty, otherwise a shortest
    word (as a tuple) accepted by both.
    """
    if a.alphabet != b.alphabet:
        raise AutomatonError("intersect_empty() needs equal alphabets")
    start = (a.initial, b.initial)
    parent = {start: None}
    queue = deque([start])
    while queue:
        pair = queue.popleft()
        qa, qb = pair
        if qa in a.accepting and qb in b.accepting:
            word = []
            while parent[pair] is not None:
                pair, sym = parent[pair]
                word.append(sym)
            return tuple(reversed(word))
        row_a, row_b = a.out(qa), b.out(qb)
        if len(row_b) < len(row_a):
            common = [s for s in row_b if s in row_a]
        else:
            common = [s for s in row_a if s in row_b]
        for sym in ordered(common):
            for sa in ordered(row_a[sym]):
                for sb in ordered(row_b[sym]):
                    nxt = (sa, sb)
                    if nxt not in parent:
                        parent[nxt] = (pair, sym)
                        queue.append(nxt)
    return None


def is_empty(aut: FiniteAutomaton) -> bool:
    return reachable_states(aut).isdisjoint(aut.accepting)


def universal_dfa(alphabet: Iterable, accept: bool = True) -> FiniteAutomaton:
    """One-state total DFA accepting everything (or nothing)."""
    alphabet = frozenset(alphabet)
    return FiniteAutomaton(
        [0], alphabet, {0: {a: 0 for a in alphabet}}, 0, [0] if accept else [], DFA
    )


# --------------------------------------------------------------------------
# Regular expressions: literals are whitespace- or operator-separated
# identifiers; ``|``, ``*``, parentheses, juxtaposition; ``ε``/``eps`` is
# the empty word.


class RegexSyntaxError(ValueError):
    def __init__(self, message: str, position: int, text: str = ""):
        self.position = position
        self.text = text
        super().__init__(f"{message} at position {position}")


@dataclass(frozen=True)
class Epsilon:
    pass


@dataclass(frozen=True)
class Literal:
    symbol: str


@dataclass(frozen=True)
class Concat:
    parts: tuple


@dataclass(frozen=True)
class Alt:
    options: tuple


@dataclass(frozen=True)
class Star:
    inner: object


_EPS_WORDS = {"ε", "eps", "<eps>"}
_IDENT_EXTRA = set("_.'+-⁺⁻")


def _tokenize(text: str):
    tokens = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch in "|*()":
            tokens.append((ch, ch, i))
            i += 1
        elif ch == "ε":
            tokens.append(("eps", ch, i))
            i += 1
        elif ch.isalnum() or ch in _IDENT_EXTRA or ch == "<":
            j = i + 1
            if ch == "<":
                j = text.find(">", i)
                if j < 0:
                    raise RegexSyntaxError("unterminated '<'", i, text)
                j += 1
            else:
                while j < len(text) and (text[j].isalnum() or text[j] in _IDENT_EXTRA):
                    j += 1
            word = text[i:j]
            tokens.append(("eps" if word in _EPS_WORDS else "lit", word, i))
            i = j
        else:
            raise RegexSyntaxError(f"unexpected character {ch!r}", i, text)
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, alphabet):
        self.text = text
        self.alphabet = alphabet
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def take(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def parse(self):
        node = self.alternation()
        kind, val, at = self.peek()
        if kind != "end":
            raise RegexSyntaxError(f"unexpected {val!r}", at, self.text)
        return node

    def alternation(self):
        options = [self.concatenation()]
        while self.peek()[0] == "|":
            self.take()
            options.append(self.concatenation())
        return options[0] if len(options) == 1 else Alt(tuple(options))

    def concatenation(self):
        parts = []
        while self.peek()[0] in ("lit", "eps", "("):
            parts.append(self.starred())
        if not parts:
            return Epsilon()
        return parts[0] if len(parts) == 1 else Concat(tuple(parts))

    def starred(self):
        node = self.atom()
        while self.peek()[0] == "*":
            self.take()
            node = Star(node)
        return node

    def atom(self):
        kind, val, at = self.take()
        if kind == "lit":
            if self.alphabet is not None and val not in self.alphabet:
                raise RegexSyntaxError(f"symbol {val!r} is not in the alphabet", at, self.text)
            return Literal(val)
        if kind == "eps":
            return Epsilon()
        if kind == "(":
            node = self.alternation()
            kind2, val2, at2 = self.take()
            if kind2 != ")":
                raise RegexSyntaxError("expected ')'", at2, self.text)
            return node
        raise RegexSyntaxError(f"unexpected {val or 'end of input'!r}", at, self.text)


def parse_regex(text: str, alphabet: Iterable | None = None):
    """Parse ``text`` into a regex syntax tree, checking literals against ``alphabet``."""
    return _Parser(text, None if alphabet is None else frozenset(alphabet)).parse()


def regex_symbols(node) -> set:
    if isinstance(node, Literal):
        return {node.symbol}
    if isinstance(node, Epsilon):
        return set()
    if isinstance(node, Star):
        return regex_symbols(node.inner)
    children = node.parts if isinstance(node, Concat) else node.options
    return set().union(*(regex_symbols(c) for c in children))


def _thompson(node, fresh, eps, moves):
    """Return (start, end) of a Thompson fragment for ``node``."""
    start, end = fresh(), fresh()
    if isinstance(node, Epsilon):
        eps.setdefault(start, set()).add(end)
    elif isinstance(node, Literal):
        moves.setdefault(start, {}).setdefault(node.symbol, set()).add(end)
    elif isinstance(node, Concat):
        prev = start
        for part in node.parts:
            s, t = _thompson(part, fresh, eps, moves)
            eps.setdefault(prev, set()).add(s)
            prev = t
        eps.setdefault(prev, set()).add(end)
    elif isinstance(node, Alt):
        for opt in node.options:
            s, t = _thompson(opt, fresh, eps, moves)
            eps.setdefault(start, set()).add(s)
            eps.setdefault(t, set()).add(end)
    elif isinstance(node, Star):
        s, t = _thompson(node.inner, fresh, eps, moves)
        eps.setdefault(start, set()).update((s, end))
        eps.setdefault(t, set()).update((s, end))
    else:
        raise TypeError(f"not a regex node: {node!r}")
    return start, end


def regex_to_dfa(regex, alphabet: Iterable) -> FiniteAutomaton:
    """Compile a regex (text or syntax tree) to a minimal total DFA over ``alphabet``."""
    alphabet = frozenset(alphabet)
    node = parse_regex(regex, alphabet) if isinstance(regex, str) else regex
    bad = regex_symbols(node) - alphabet
    if bad:
        raise AutomatonError(f"regex uses symbols outside the alphabet: {ordered(bad)}")
    counter = iter(range(1 << 30))
    eps: dict = {}
    moves: dict = {}
    start, end = _thompson(node, lambda: next(counter), eps, moves)

    def closure(states):
        stack = list(states)
        seen = set(states)
        while stack:
            q = stack.pop()
            for s in eps.get(q, ()):
                if s not in seen:
                    seen.add(s)
                    stack.append(s)
        return frozenset(seen)

    # epsilon-free NFA whose states are closures
    init = closure({start})
    index = {init: 0}
    todo = deque([init])
    rows = {}
    while todo:
        cl = todo.popleft()
        row: dict = {}
        for q in cl:
            for a, succ in moves.get(q, {}).items():
                row.setdefault(a, set()).update(succ)
        out = {}
        for a in ordered(row):
            tgt = closure(row[a])
            if tgt not in index:
                index[tgt] = len(index)
                todo.append(tgt)
            out[a] = index[tgt]
        rows[index[cl]] = out
    accepting = [i for cl, i in index.items() if end in cl]
    partial = FiniteAutomaton(index.values(), alphabet, rows, 0, accepting, PARTIAL)
    return minimize(totalize(partial, sink=-1))
