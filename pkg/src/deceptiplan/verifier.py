"""Deception instances, the deceptiveness check, and the exhaustive baseline planner."""

from __future__ import annotations

import heapq
import warnings
from collections import Counter
from collections.abc import Mapping
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

from .alteration import (
    INF,
    CostFunction,
    Multiset,
    SensorAlteration,
    altered_observation,
    build_sigma,
    format_cost,
    realizable_set,
    total_cost,
)
from .automata import (
    DFA,
    AutomatonError,
    FiniteAutomaton,
    complement,
    determinize,
    intersect_empty,
    minimize,
    ordered,
    product_with_world,
    relabel,
)
from .world import WorldGraph, _lift, is_certifying


class InstanceError(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    def __init__(self, needed: int, budget: int):
        self.needed = needed
        self.budget = budget
        super().__init__(
            f"exhaustive search needs {needed} alterations, budget is {budget}"
        )


@dataclass(frozen=True)
class OutsideAcceptor:
    """Minimal total DFA for observation words no itinerary walk produces."""

    dfa: FiniteAutomaton
    sink: int | None


@dataclass(frozen=True, eq=False)
class DeceptionInstance:
    world: WorldGraph
    itinerary: FiniteAutomaton
    deviation: FiniteAutomaton
    cost: CostFunction
    name: str = ""
    budget: Fraction | None = None
    # original textual specs, kept for printing
    itinerary_spec: object = None
    deviation_spec: object = None
    notes: str = ""
    extra: Mapping = field(default_factory=dict)

    def validate(self, require_certifying: bool = False) -> list[str]:
        problems = list(self.world.validate())
        edges = frozenset(self.world.edges)
        for label, aut in (("itinerary", self.itinerary), ("deviation", self.deviation)):
            if aut.kind != DFA:
                problems.append(f"{label} must be a total DFA, got {aut.kind}")
            if aut.alphabet != edges:
                problems.append(f"{label} alphabet differs from the edge set")
        if set(self.cost.events) != set(self.world.events):
            problems.append("cost function events differ from world events")
        if require_certifying and not problems and not self.certifying:
            problems.append("sensor set does not certify the itinerary")
        return problems

    def check(self, require_certifying: bool = False) -> "DeceptionInstance":
        problems = self.validate()
        if problems:
            raise InstanceError("; ".join(problems))
        if not self.certifying:
            msg = f"instance {self.name!r}: sensors do not certify the itinerary"
            if require_certifying:
                raise InstanceError(msg)
            warnings.warn(msg, stacklevel=2)
        return self

    @property
    def events(self) -> tuple:
        return self.world.events

    @cached_property
    def certifying(self) -> bool:
        return is_certifying(self.world, self.itinerary).certifying

    @cached_property
    def m(self) -> int:
        return self.world.max_simultaneous

    @cached_property
    def sigma(self) -> frozenset:
        return build_sigma(self.events, self.m)

    @cached_property
    def realizable(self) -> frozenset:
        return realizable_set(self.world)

    @cached_property
    def itinerary_product(self) -> FiniteAutomaton:
        return product_with_world(self.itinerary, self.world)

    @cached_property
    def deviation_product(self) -> FiniteAutomaton:
        return product_with_world(self.deviation, self.world)

    @cached_property
    def outside(self) -> OutsideAcceptor:
        return build_outside_acceptor(self)


@dataclass(frozen=True)
class DeceptionVerdict:
    deceptive: bool
    walk: tuple | None = None
    observed: tuple | None = None

    def __bool__(self):
        return self.deceptive

    def to_dict(self) -> dict:
        out = {"deceptive": self.deceptive}
        if not self.deceptive:
            out["witness"] = {
                "walk": list(self.walk),
                "observed": [list(x.elements()) for x in self.observed],
            }
        return out


@dataclass
class PlanResult:
    status: str  # "optimal" | "infeasible"
    alteration: SensorAlteration | None = None
    cost: object = None
    certificate: str = ""
    stats: dict = field(default_factory=dict)

    @property
    def feasible(self) -> bool:
        return self.status == "optimal"

    def to_dict(self) -> dict:
        out = {"status": self.status}
        if self.feasible:
            out["cost"] = format_cost(self.cost)
            out["alteration"] = dict(self.alteration.changes())
        else:
            out["certificate"] = self.certificate
        out["stats"] = dict(self.stats)
        return out


def observation_label(world: WorldGraph):
    return lambda e: Multiset.of(world.observation(e))


def altered_label(world: WorldGraph, alteration: Mapping):
    return lambda e: altered_observation(alteration, world, e)


def relax_itinerary(product: FiniteAutomaton, world: WorldGraph, sigma=None) -> FiniteAutomaton:
    """Relabel each edge transition of the itinerary product by its observation."""
    if sigma is None:
        sigma = build_sigma(world.events, max(world.max_simultaneous, 1))
    return relabel(product, observation_label(world), sigma)


def relax_deviation(
    product: FiniteAutomaton, world: WorldGraph, alteration: Mapping, sigma=None
) -> FiniteAutomaton:
    """Relabel each edge transition of the deviation product by its altered observation."""
    if sigma is None:
        sigma = build_sigma(world.events, max(world.max_simultaneous, 1))
    return relabel(product, altered_label(world, alteration), sigma)


def build_outside_acceptor(instance: DeceptionInstance) -> OutsideAcceptor:
    """Minimal total DFA over Σ for words not produced by itinerary walks.

    The sink is the unique accepting state that loops on every symbol.  Every
    unrealizable observation leads to it from every state; if the check
    fails the construction is broken and an error is raised.
    """
    relaxed = relax_itinerary(instance.itinerary_product, instance.world, instance.sigma)
    dfa = minimize(complement(determinize(relaxed)))
    sinks = [
        q
        for q in ordered(dfa.accepting)
        if all(dfa.step(q, x) == q for x in dfa.alphabet)
    ]
    if len(sinks) > 1:
        raise AutomatonError("minimized outside acceptor has several sinks")
    sink = sinks[0] if sinks else None
    unrealizable = instance.sigma - instance.realizable
    if unrealizable:
        if sink is None:
            raise AutomatonError("outside acceptor has no sink although Σ ⊋ Z")
        for q in dfa.states:
            for x in unrealizable:
                if dfa.step(q, x) != sink:
                    raise AutomatonError(
                        f"unrealizable observation {x!r} does not lead to the sink from {q}"
                    )
    return OutsideAcceptor(dfa, sink)


def is_deceptive(instance: DeceptionInstance, alteration: Mapping) -> DeceptionVerdict:
    """Decide whether every deviation walk looks like some itinerary walk.

    Empty intersection of the outside acceptor with the determinized altered
    deviation means deceptive; otherwise a shortest offending deviation walk
    is returned with what the monitor would observe.
    """
    alteration = SensorAlteration(alteration, instance.events)
    outside = instance.outside.dfa
    relaxed = relax_deviation(
        instance.deviation_product, instance.world, alteration, instance.sigma
    )
    word = intersect_empty(outside, determinize(relaxed))
    if word is None:
        return DeceptionVerdict(True)
    walk = _lift(
        instance.deviation_product, instance.world, word, altered_label(instance.world, alteration)
    )
    return DeceptionVerdict(False, walk, tuple(word))


def semantic_deceptive(
    instance: DeceptionInstance, alteration: Mapping, max_len: int
) -> DeceptionVerdict:
    """Reference check straight from the definition, bounded by walk length.

    Deviation walks are extended edge by edge while tracking every itinerary
    walk with the same observation so far; a configuration seen at a shorter
    length is not explored again.
    """
    world, itin, dev = instance.world, instance.itinerary, instance.deviation
    obs = {e: Counter(world.observation(e)) for e in world.edges}

    def image(e):
        return Counter(alteration[y] for y in world.observation(e))

    start = (dev.initial, world.initial, frozenset({(itin.initial, world.initial)}))
    seen = {start}
    layer = [(start, ())]
    for _ in range(max_len + 1):
        nxt = []
        for (d, v, matches), walk in layer:
            if d in dev.accepting and not any(i in itin.accepting for i, _ in matches):
                return DeceptionVerdict(False, walk, altered_observe_tuple(instance, alteration, walk))
            for e in world.out_edges(v):
                x = image(e)
                follow = frozenset(
                    (itin.step(i, f), world.tgt(f))
                    for i, u in matches
                    for f in world.out_edges(u)
                    if obs[f] == x
                )
                cfg = (dev.step(d, e), world.tgt(e), follow)
                if cfg not in seen:
                    seen.add(cfg)
                    nxt.append((cfg, walk + (e,)))
        if not nxt:
            break
        layer = nxt
    return DeceptionVerdict(True)


def altered_observe_tuple(instance, alteration, walk):
    return tuple(altered_observation(alteration, instance.world, e) for e in walk)


def brute_force_plan(instance: DeceptionInstance, max_alterations: int = 50_000) -> PlanResult:
    """Try total alterations cheapest first; the first deceptive one is optimal.

    Alterations are generated best-first from a priority queue keyed by
    (cost so far, target indices), so equal-cost ties resolve
    lexicographically by event id.  Refuses when ``|Y|^|Y|`` exceeds
    ``max_alterations``.
    """
    events = instance.events
    needed = len(events) ** len(events)
    if needed > max_alterations:
        raise BudgetExceeded(needed, max_alterations)
    cost = instance.cost
    options = [
        [(cost(y, t), events.index(t)) for t in cost.finite_targets(y)] for y in events
    ]
    checks = 0
    if any(not opts for opts in options):
        return PlanResult(
            "infeasible",
            certificate="some event has no finite-cost image",
            stats={"checked": 0},
        )
    heap = [(Fraction(0), ())]
    while heap:
        acc, key = heapq.heappop(heap)
        if len(key) == len(events):
            alteration = SensorAlteration(
                {y: events[i] for y, i in zip(events, key)}, events
            )
            checks += 1
            if is_deceptive(instance, alteration):
                return PlanResult(
                    "optimal",
                    alteration,
                    total_cost(alteration, cost),
                    stats={"checked": checks},
                )
            continue
        for c, i in options[len(key)]:
            heapq.heappush(heap, (acc + c, key + (i,)))
    return PlanResult(
        "infeasible",
        certificate=f"all {checks} finite-cost alterations refuted",
        stats={"checked": checks},
    )


def exhaustive_min_cost(instance: DeceptionInstance):
    """Unordered enumeration of every alteration; returns the minimum deceptive cost or None."""
    from itertools import product

    events = instance.events
    best = None
    for targets in product(events, repeat=len(events)):
        alteration = dict(zip(events, targets))
        c = total_cost(alteration, instance.cost)
        if c == INF or (best is not None and c >= best):
            continue
        if is_deceptive(instance, alteration):
            best = c
    return best
