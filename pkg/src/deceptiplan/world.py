"""World graphs: regions, doors, sensors and the events they fire."""

from __future__ import annotations

from collections import deque
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field

from .automata import (
    DFA,
    AutomatonError,
    FiniteAutomaton,
    complement,
    determinize,
    intersect_empty,
    ordered,
    product_with_world,
    relabel,
)


class WorldError(ValueError):
    pass


@dataclass(frozen=True)
class Edge:
    id: str
    src: str
    tgt: str
    observation: frozenset


@dataclass(frozen=True)
class WorldGraph:
    """Edge-labelled directed multigraph with sensors.

    ``sensors`` maps a sensor id to the tuple of events it can fire; each
    edge carries the (nonempty) set of events fired when it is taken.
    Construction does not validate; call :meth:`validate`.
    """

    vertices: tuple
    edges: Mapping[str, Edge]
    initial: str
    sensors: Mapping[str, tuple]
    _out: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        out: dict = {v: [] for v in self.vertices}
        for e in ordered(self.edges):
            out.setdefault(self.edges[e].src, []).append(e)
        object.__setattr__(self, "_out", {v: tuple(es) for v, es in out.items()})

    @classmethod
    def build(cls, vertices, initial, sensors, edges):
        """Convenience constructor.

        ``edges`` is an iterable of ``(id, src, tgt, events)`` tuples.
        """
        edge_map = {}
        for eid, src, tgt, obs in edges:
            if eid in edge_map:
                raise WorldError(f"duplicate edge id {eid!r}")
            edge_map[eid] = Edge(eid, src, tgt, frozenset(obs))
        return cls(
            tuple(vertices),
            edge_map,
            initial,
            {s: tuple(evs) for s, evs in sensors.items()},
        )

    # -- basic accessors -------------------------------------------------

    def src(self, e: str) -> str:
        return self.edges[e].src

    def tgt(self, e: str) -> str:
        return self.edges[e].tgt

    def observation(self, e: str) -> frozenset:
        return self.edges[e].observation

    def out_edges(self, v: str) -> tuple:
        return self._out.get(v, ())

    @property
    def events(self) -> tuple:
        """All events, sorted."""
        return tuple(ordered({y for evs in self.sensors.values() for y in evs}))

    @property
    def sensor_of(self) -> dict:
        return {y: s for s, evs in self.sensors.items() for y in evs}

    @property
    def max_simultaneous(self) -> int:
        """The largest number of events fired by a single edge."""
        return max((len(ed.observation) for ed in self.edges.values()), default=0)

    # -- checks ----------------------------------------------------------

    def validate(self) -> list[str]:
        """Return a list of human-readable problems; empty means valid."""
        problems = []
        verts = set(self.vertices)
        if len(verts) != len(self.vertices):
            problems.append("duplicate vertex ids")
        if self.initial not in verts:
            problems.append(f"initial vertex {self.initial!r} is not a vertex")
        if not self.sensors:
            problems.append("no sensors: the sensor set must be nonempty")
        owner: dict = {}
        for s in ordered(self.sensors):
            evs = self.sensors[s]
            if not evs:
                problems.append(f"sensor {s!r} has no events")
            for y in evs:
                if y in owner and owner[y] != s:
                    problems.append(
                        f"disjointness: event {y!r} belongs to sensors {owner[y]!r} and {s!r}"
                    )
                owner.setdefault(y, s)
        for e in ordered(self.edges):
            ed = self.edges[e]
            if ed.id != e:
                problems.append(f"edge key {e!r} does not match its id {ed.id!r}")
            for end, name in ((ed.src, "source"), (ed.tgt, "target")):
                if end not in verts:
                    problems.append(f"edge {e!r}: {name} {end!r} is not a vertex")
            if not ed.observation:
                problems.append(f"edge {e!r}: empty observation")
            for y in ordered(ed.observation):
                if y not in owner:
                    problems.append(f"edge {e!r}: event {y!r} belongs to no sensor")
        return problems

    def check(self) -> "WorldGraph":
        problems = self.validate()
        if problems:
            raise WorldError("; ".join(problems))
        return self

    # -- walks -----------------------------------------------------------

    def is_walk(self, seq: Sequence[str]) -> bool:
        v = self.initial
        for e in seq:
            if e not in self.edges:
                raise WorldError(f"unknown edge {e!r}")
            if self.edges[e].src != v:
                return False
            v = self.edges[e].tgt
        return True

    def observe(self, walk: Sequence[str]) -> tuple:
        """Sequence of world-observations (event sets) produced by a walk."""
        if not self.is_walk(walk):
            raise WorldError(f"not a walk: {list(walk)}")
        return tuple(self.edges[e].observation for e in walk)

    def walks(self, max_len: int):
        """Yield every walk of length at most ``max_len`` (shortest first)."""
        frontier = [((), self.initial)]
        yield ()
        for _ in range(max_len):
            nxt = []
            for walk, v in frontier:
                for e in self.out_edges(v):
                    w = walk + (e,)
                    yield w
                    nxt.append((w, self.edges[e].tgt))
            frontier = nxt

    def to_dot(self) -> str:
        """Graphviz rendering of the graph."""
        lines = ["digraph world {", f'  "{self.initial}" [shape=doublecircle];']
        for e in ordered(self.edges):
            ed = self.edges[e]
            label = ",".join(ordered(ed.observation))
            lines.append(f'  "{ed.src}" -> "{ed.tgt}" [label="{e}: {label}"];')
        lines.append("}")
        return "\n".join(lines)


@dataclass(frozen=True)
class CertifyingVerdict:
    certifying: bool
    allowed_walk: tuple | None = None
    other_walk: tuple | None = None

    def __bool__(self):
        return self.certifying


def _lift(partial: FiniteAutomaton, world: WorldGraph, letters: Sequence, label) -> tuple:
    """Find an accepted walk of ``partial`` whose labels spell ``letters``."""
    layer = {partial.initial: ()}
    for x in letters:
        nxt = {}
        for q in ordered(layer):
            for e, succ in partial.out(q).items():
                if label(e) != x:
                    continue
                s = next(iter(succ))
                if s not in nxt:
                    nxt[s] = layer[q] + (e,)
        layer = nxt
    for q in ordered(layer):
        if q in partial.accepting:
            return layer[q]
    raise AssertionError("witness word could not be lifted to a walk")


def is_certifying(world: WorldGraph, itinerary: FiniteAutomaton) -> CertifyingVerdict:
    """Decide whether the sensors separate itinerary walks from all other walks.

    On failure the verdict carries an itinerary walk and a non-itinerary
    walk with identical observation sequences, of minimum length.
    """
    if itinerary.kind != DFA:
        raise AutomatonError("the itinerary must be a total DFA")
    from .alteration import Multiset, build_sigma

    sigma = build_sigma(world.events, max(world.max_simultaneous, 1))
    label = lambda e: Multiset.of(world.observation(e))  # noqa: E731
    inside = product_with_world(itinerary, world)
    outside = product_with_world(complement(itinerary), world)
    word = intersect_empty(
        determinize(relabel(inside, label, sigma)),
        determinize(relabel(outside, label, sigma)),
    )
    if word is None:
        return CertifyingVerdict(True)
    return CertifyingVerdict(
        False, _lift(inside, world, word, label), _lift(outside, world, word, label)
    )


def certifying_by_enumeration(
    world: WorldGraph, itinerary: FiniteAutomaton, max_len: int
) -> CertifyingVerdict:
    """Search pairs of equally observed walks directly from the definition.

    Walk pairs are explored in lockstep, one pair of edges with equal
    observations at a time; a pair configuration already seen at a shorter
    length is not revisited, so the search is exhaustive up to ``max_len``.
    """
    start = (itinerary.initial, world.initial, itinerary.initial, world.initial)
    seen = {start}
    layer = [(start, (), ())]
    for _ in range(max_len + 1):
        nxt = []
        for (q1, v1, q2, v2), r, t in layer:
            if q1 in itinerary.accepting and q2 not in itinerary.accepting:
                return CertifyingVerdict(False, r, t)
            for e1 in world.out_edges(v1):
                for e2 in world.out_edges(v2):
                    if world.observation(e1) != world.observation(e2):
                        continue
                    cfg = (
                        itinerary.step(q1, e1),
                        world.tgt(e1),
                        itinerary.step(q2, e2),
                        world.tgt(e2),
                    )
                    if cfg not in seen:
                        seen.add(cfg)
                        nxt.append((cfg, r + (e1,), t + (e2,)))
        if not nxt:
            break
        layer = nxt
    return CertifyingVerdict(True)


def reachable_vertices(world: WorldGraph) -> set:
    seen = {world.initial}
    queue = deque([world.initial])
    while queue:
        v = queue.popleft()
        for e in world.out_edges(v):
            t = world.tgt(e)
            if t not in seen:
                seen.add(t)
                queue.append(t)
    return seen


def edge_alphabet(world: WorldGraph) -> frozenset:
    return frozenset(world.edges)


def walks_of(world: WorldGraph, aut: FiniteAutomaton, max_len: int) -> Iterable[tuple]:
    """Walks of length <= ``max_len`` accepted by ``aut`` (edge alphabet)."""
    from .automata import accepts

    for w in world.walks(max_len):
        if accepts(aut, w):
            yield w
