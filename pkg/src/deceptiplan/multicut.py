"""Directed multicut as a source of planning instances with known optima.

Every arc of a digraph becomes a blue and a red parallel edge in a world
graph, each with its own sensor.  A fresh start vertex has one edge per
source-target pair.  With ``literal=False`` (the default) the allowed tours
go from a source to its target and use at least one red edge, the deviation
tours are blue-only, and relabelling a blue event as its red twin costs 1.
A set of blue events that can be relabelled deceptively is then exactly a
T-cut, so the planner's optimum equals the minimum multicut.

``literal=True`` swaps the roles (blue-only allowed tours, red deviations,
red-to-blue relabelling).  That variant is kept for comparison; its optimum
is the number of arcs lying on some source-to-target walk, which is in
general larger than the minimum cut.
"""

from __future__ import annotations

from collections import deque
from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from itertools import combinations

from .alteration import INF, CostFunction, SensorAlteration, total_cost
from .automata import DFA, FiniteAutomaton, ordered
from .verifier import DeceptionInstance, InstanceError
from .world import WorldGraph

START = "v0"
TRAP = "trap"


@dataclass(frozen=True)
class Digraph:
    nodes: tuple
    arcs: tuple  # ((u, v), ...)

    def __post_init__(self):
        nodes = set(self.nodes)
        seen = set()
        for u, v in self.arcs:
            if u not in nodes or v not in nodes:
                raise ValueError(f"arc ({u}, {v}) has an endpoint outside the node set")
            if u == v:
                raise ValueError(f"self-loop on {u} is not allowed")
            if (u, v) in seen:
                raise ValueError(f"duplicate arc ({u}, {v})")
            seen.add((u, v))

    @classmethod
    def from_arcs(cls, arcs: Iterable, nodes: Iterable = ()) -> "Digraph":
        arcs = tuple((str(u), str(v)) for u, v in arcs)
        ns = {str(n) for n in nodes} | {x for a in arcs for x in a}
        return cls(tuple(ordered(ns)), arcs)

    def successors(self, u, removed=frozenset()):
        return [v for (a, v) in self.arcs if a == u and (a, v) not in removed]


def reaches(g: Digraph, s, t, removed=frozenset()) -> bool:
    seen = {s}
    queue = deque([s])
    while queue:
        u = queue.popleft()
        if u == t:
            return True
        for v in g.successors(u, removed):
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return False


def is_cut(g: Digraph, pairs, cut) -> bool:
    cut = frozenset(cut)
    return not any(reaches(g, s, t, cut) for s, t in pairs)


def check_pairs(g: Digraph, pairs) -> list:
    pairs = [(str(s), str(t)) for s, t in pairs]
    nodes = set(g.nodes)
    for s, t in pairs:
        if s not in nodes or t not in nodes:
            raise ValueError(f"pair ({s}, {t}) names a node outside the graph")
        if s == t:
            raise ValueError(f"pair ({s}, {t}) can never be disconnected")
    return pairs


def connectify(g: Digraph, pairs, k: int):
    """Add an arc s->t for each pair with no s-t path; the budget grows by the same count."""
    pairs = check_pairs(g, pairs)
    extra = []
    for s, t in pairs:
        if not reaches(g, s, t) and (s, t) not in extra:
            extra.append((s, t))
    return Digraph(g.nodes, g.arcs + tuple(extra)), pairs, k + len(extra)


class CutBudgetExceeded(RuntimeError):
    pass


def brute_force_min_multicut(g: Digraph, pairs, max_arcs: int = 20) -> int:
    """Smallest number of arcs whose removal disconnects every pair."""
    pairs = check_pairs(g, pairs)
    if len(g.arcs) > max_arcs:
        raise CutBudgetExceeded(f"{len(g.arcs)} arcs exceed the enumeration budget of {max_arcs}")
    for size in range(len(g.arcs) + 1):
        for cut in combinations(g.arcs, size):
            if is_cut(g, pairs, cut):
                return size
    raise AssertionError("removing every arc must disconnect all pairs")


def min_multicuts(g: Digraph, pairs, max_arcs: int = 20) -> list:
    """All minimum T-cuts, each as a sorted tuple of arcs."""
    size = brute_force_min_multicut(g, pairs, max_arcs)
    pairs = check_pairs(g, pairs)
    return [c for c in combinations(g.arcs, size) if is_cut(g, pairs, c)]


def _names(g: Digraph):
    width = len(str(len(g.arcs)))
    blue = {a: f"b{i:0{width}d}" for i, a in enumerate(g.arcs, 1)}
    red = {a: f"r{i:0{width}d}" for i, a in enumerate(g.arcs, 1)}
    return blue, red


def reduce_to_mcsd(g: Digraph, pairs, literal: bool = False, name: str = "") -> DeceptionInstance:
    """Build the planning instance whose optimum is the minimum T-cut of ``(g, pairs)``.

    Every pair must be connected; run :func:`connectify` first otherwise.
    """
    pairs = check_pairs(g, pairs)
    if not pairs:
        raise InstanceError("the pair set is empty")
    for s, t in pairs:
        if not reaches(g, s, t):
            raise InstanceError(f"no path from {s} to {t}; run connectify first")
    start = START
    while start in g.nodes:
        start = "_" + start
    blue, red = _names(g)
    width = len(str(len(pairs)))
    entry = {j: f"s{j:0{width}d}" for j in range(1, len(pairs) + 1)}
    edges = []
    for arc in g.arcs:
        u, v = arc
        edges.append((blue[arc], u, v, {"y" + blue[arc]}))
        edges.append((red[arc], u, v, {"y" + red[arc]}))
    for j, (s, _) in enumerate(pairs, 1):
        edges.append((entry[j], start, s, {"y" + entry[j]}))
    sensors = {"S" + e[0]: ("y" + e[0],) for e in edges}
    world = WorldGraph.build((start,) + g.nodes, start, sensors, edges)
    blue_edges = set(blue.values())
    red_edges = set(red.values())
    alphabet = frozenset(world.edges)

    def blue_only():
        # pre-start state, one copy of the graph per pair, trap
        states = [("pre",), TRAP] + [(v, i) for i in range(1, len(pairs) + 1) for v in g.nodes]
        delta = {q: {e: TRAP for e in alphabet} for q in states}
        for j, (s, _) in enumerate(pairs, 1):
            delta[("pre",)][entry[j]] = (s, j)
        for e in blue_edges:
            for i in range(1, len(pairs) + 1):
                delta[(world.src(e), i)][e] = (world.tgt(e), i)
        acc = [(t, i) for i, (_, t) in enumerate(pairs, 1)]
        return FiniteAutomaton(states, alphabet, delta, ("pre",), acc, DFA)

    def some_red(cross):
        # column 1 before the first crossing edge, column 2 after it
        states = [("pre",), TRAP] + [
            (v, i, j) for i in range(1, len(pairs) + 1) for j in (1, 2) for v in g.nodes
        ]
        delta = {q: {e: TRAP for e in alphabet} for q in states}
        for j, (s, _) in enumerate(pairs, 1):
            delta[("pre",)][entry[j]] = (s, j, 1)
        for e in blue_edges | red_edges:
            for i in range(1, len(pairs) + 1):
                u, v = world.src(e), world.tgt(e)
                if e in cross:
                    delta[(u, i, 1)][e] = (v, i, 2)
                    delta[(u, i, 2)][e] = (v, i, 2)
                else:
                    delta[(u, i, 1)][e] = (v, i, 1)
                    delta[(u, i, 2)][e] = (v, i, 2)
        acc = [(t, i, 2) for i, (_, t) in enumerate(pairs, 1)]
        return FiniteAutomaton(states, alphabet, delta, ("pre",), acc, DFA)

    overrides = {}
    if literal:
        itinerary, deviation = blue_only(), some_red(red_edges)
        for arc in g.arcs:
            overrides[("y" + red[arc], "y" + blue[arc])] = 1
    else:
        itinerary, deviation = some_red(red_edges), blue_only()
        for arc in g.arcs:
            overrides[("y" + blue[arc], "y" + red[arc])] = 1
    cost = CostFunction(world.events, overrides, same=0, other=INF)
    twins = {}
    for arc in g.arcs:
        twins[blue[arc]] = red[arc]
        twins[red[arc]] = blue[arc]
    extra = {
        "reduction": "literal" if literal else "corrected",
        "arcs": {blue[a]: list(a) for a in g.arcs} | {red[a]: list(a) for a in g.arcs},
        "twins": twins,
        "blue": ordered(blue_edges),
        "red": ordered(red_edges),
        "pairs": [list(p) for p in pairs],
    }
    return DeceptionInstance(
        world, itinerary, deviation, cost,
        name=name or ("multicut-literal" if literal else "multicut"),
        extra=extra,
    )


def alteration_from_cut(instance: DeceptionInstance, cut: Iterable) -> SensorAlteration:
    """The twin alteration that relabels exactly the events of the cut arcs."""
    extra = instance.extra
    literal = extra["reduction"] == "literal"
    cut = {tuple(a) for a in cut}
    changes = {}
    for e, arc in extra["arcs"].items():
        if tuple(arc) not in cut:
            continue
        altered = e in extra["red"] if literal else e in extra["blue"]
        if altered:
            changes["y" + e] = "y" + extra["twins"][e]
    return SensorAlteration.with_changes(instance.events, changes)


def extract_cut(instance: DeceptionInstance, alteration: Mapping) -> set:
    """Arcs whose edge event the alteration relabels as the twin event."""
    if "twins" not in instance.extra:
        raise InstanceError("instance carries no twin metadata")
    if total_cost(alteration, instance.cost) == INF:
        raise ValueError("alteration has infinite cost")
    arcs = instance.extra["arcs"]
    cut = set()
    for y, t in alteration.items():
        if y != t:
            cut.add(tuple(arcs[y[1:]]))
    return cut


def parse_arc_list(text: str) -> list:
    """Whitespace-separated node pairs, one per line; ``#`` starts a comment."""
    out = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.replace(",", " ").split()
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected two node names, got {line!r}")
        out.append((parts[0], parts[1]))
    return out


def format_arc_list(pairs) -> str:
    return "".join(f"{u} {v}\n" for u, v in pairs)


# Three source-target pairs on an eight-node digraph; the minimum cut has two arcs.
FIG4_ARCS = (
    ("a", "b"), ("b", "c"), ("c", "d"), ("a", "e"), ("e", "c"),
    ("e", "f"), ("f", "g"), ("g", "h"), ("d", "h"), ("b", "f"),
)
FIG4_PAIRS = (("a", "d"), ("e", "h"), ("b", "g"))


def fig4_digraph():
    return Digraph.from_arcs(FIG4_ARCS), list(FIG4_PAIRS)


def random_digraph(rng, max_nodes=6, max_arcs=10, max_pairs=3):
    """Random simple digraph with distinct-endpoint pairs, already connectified."""
    n = rng.randint(2, max_nodes)
    nodes = [f"n{i}" for i in range(n)]
    possible = [(u, v) for u in nodes for v in nodes if u != v]
    arcs = rng.sample(possible, rng.randint(1, min(max_arcs, len(possible))))
    pairs = []
    for _ in range(rng.randint(1, max_pairs)):
        s, t = rng.sample(nodes, 2)
        if (s, t) not in pairs:
            pairs.append((s, t))
    g = Digraph.from_arcs(arcs, nodes)
    g2, pairs, _ = connectify(g, pairs, 0)
    if len(g2.arcs) > max_arcs:
        # drop unrelated arcs so the bound still holds after connectify
        keep = [a for a in g2.arcs if a not in g.arcs]
        rest = [a for a in g.arcs][: max_arcs - len(keep)]
        g2, pairs, _ = connectify(Digraph.from_arcs(rest + keep, nodes), pairs, 0)
    return g2, pairs
