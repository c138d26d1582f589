"""Sensor alterations, their costs, and multiset observations."""

from __future__ import annotations

import math
from collections import Counter
from collections.abc import Iterable, Mapping, Sequence
from fractions import Fraction
from itertools import combinations_with_replacement

from .automata import ordered

INF = math.inf


class Multiset:
    """Finite multiset of events with structural equality and hashing.

    Stored canonically as sorted ``(event, multiplicity)`` pairs.
    """

    __slots__ = ("items", "_hash")

    def __init__(self, items: Iterable[tuple]):
        items = tuple(sorted((y, n) for y, n in items if n > 0))
        object.__setattr__(self, "items", items)
        object.__setattr__(self, "_hash", hash(items))

    def __setattr__(self, name, value):
        raise AttributeError("Multiset is immutable")

    @classmethod
    def of(cls, events: Iterable) -> "Multiset":
        return cls(Counter(events).items())

    def count(self, y) -> int:
        for z, n in self.items:
            if z == y:
                return n
        return 0

    def support(self) -> tuple:
        return tuple(y for y, _ in self.items)

    def elements(self) -> tuple:
        return tuple(y for y, n in self.items for _ in range(n))

    def __len__(self):
        return sum(n for _, n in self.items)

    def __contains__(self, y):
        return any(z == y for z, _ in self.items)

    def __iter__(self):
        return iter(self.elements())

    def __eq__(self, other):
        return isinstance(other, Multiset) and self.items == other.items

    def __hash__(self):
        return self._hash

    @property
    def sort_key(self):
        return (len(self), self.items)

    def __lt__(self, other):
        return self.sort_key < other.sort_key

    def __repr__(self):
        return "{" + ",".join(self.elements()) + "}"


def multiplicity(y, x: Multiset) -> int:
    return x.count(y)


def build_sigma(events: Iterable, m: int) -> frozenset:
    """All nonempty event multisets of size at most ``m``."""
    if m < 1:
        raise ValueError("m must be at least 1")
    events = ordered(set(events))
    return frozenset(
        Multiset.of(combo)
        for k in range(1, m + 1)
        for combo in combinations_with_replacement(events, k)
    )


def sigma_size(n_events: int, m: int) -> int:
    return sum(math.comb(n_events + k - 1, k) for k in range(1, m + 1))


def realizable_set(world) -> frozenset:
    """Observations that label at least one edge, as multisets."""
    return frozenset(Multiset.of(world.observation(e)) for e in world.edges)


def as_cost(value):
    """Normalise a cost: ``inf``/``"inf"`` stay infinite, numbers become Fractions."""
    if isinstance(value, str):
        if value.strip().lower() in ("inf", "infinity", "∞"):
            return INF
        value = Fraction(value)
    if isinstance(value, float):
        if math.isinf(value):
            if value < 0:
                raise ValueError("costs must be nonnegative")
            return INF
        value = Fraction(str(value))
    value = Fraction(value)
    if value < 0:
        raise ValueError("costs must be nonnegative")
    return value


def format_cost(value) -> str:
    if value == INF:
        return "inf"
    value = Fraction(value)
    return str(value.numerator) if value.denominator == 1 else str(value)


class CostFunction:
    """Cost ``c(y, y')`` of altering event ``y`` into ``y'``.

    Unlisted pairs follow the default rule: ``same`` on the diagonal and
    ``other`` elsewhere.  Infinite cost forbids an alteration.
    """

    def __init__(
        self,
        events: Iterable,
        overrides: Mapping[tuple, object] | None = None,
        same=0,
        other=1,
    ):
        self.events = tuple(ordered(set(events)))
        self.same = as_cost(same)
        self.other = as_cost(other)
        self.overrides = {}
        known = set(self.events)
        for (y1, y2), c in (overrides or {}).items():
            if y1 not in known or y2 not in known:
                raise ValueError(f"cost override ({y1!r}, {y2!r}) names an unknown event")
            self.overrides[(y1, y2)] = as_cost(c)

    def __call__(self, y1, y2):
        c = self.overrides.get((y1, y2))
        if c is not None:
            return c
        return self.same if y1 == y2 else self.other

    def finite_targets(self, y) -> list:
        """Targets reachable at finite cost, cheapest first, ties by event id."""
        opts = [(self(y, t), t) for t in self.events if self(y, t) != INF]
        opts.sort(key=lambda ct: (ct[0], self.events.index(ct[1])))
        return [t for _, t in opts]

    def min_cost(self, y):
        return min((self(y, t) for t in self.events), default=INF)

    def infinite_pairs(self) -> list:
        return [(a, b) for a in self.events for b in self.events if self(a, b) == INF]

    def as_triples(self) -> list:
        return [
            (a, b, format_cost(c))
            for (a, b), c in sorted(self.overrides.items(), key=lambda kv: (
                self.events.index(kv[0][0]), self.events.index(kv[0][1])))
        ]

    def __eq__(self, other):
        if not isinstance(other, CostFunction) or other.events != self.events:
            return False
        return all(self(a, b) == other(a, b) for a in self.events for b in self.events)


class SensorAlteration(Mapping):
    """Total map from events to events, fixed before any walk is taken."""

    def __init__(self, mapping: Mapping, events: Iterable | None = None):
        events = ordered(set(events) if events is not None else set(mapping))
        missing = [y for y in events if y not in mapping]
        if missing:
            raise ValueError(f"alteration is not total: no image for {missing}")
        universe = set(events)
        bad = {y: t for y, t in mapping.items() if t not in universe or y not in universe}
        if bad:
            raise ValueError(f"alteration maps outside the event set: {bad}")
        self._map = {y: mapping[y] for y in events}

    @classmethod
    def identity(cls, events: Iterable) -> "SensorAlteration":
        return cls({y: y for y in events})

    @classmethod
    def with_changes(cls, events: Iterable, changes: Mapping) -> "SensorAlteration":
        base = {y: y for y in events}
        base.update(changes)
        return cls(base)

    def __getitem__(self, y):
        return self._map[y]

    def __iter__(self):
        return iter(self._map)

    def __len__(self):
        return len(self._map)

    def __hash__(self):
        return hash(tuple(self._map.items()))

    def __eq__(self, other):
        return isinstance(other, Mapping) and dict(self.items()) == dict(other.items())

    def changes(self) -> dict:
        return {y: t for y, t in self._map.items() if y != t}

    def __repr__(self):
        ch = ", ".join(f"{y}->{t}" for y, t in self.changes().items())
        return f"SensorAlteration({ch or 'identity'})"


def total_cost(alteration: Mapping, cost: CostFunction):
    total = Fraction(0)
    for y, t in alteration.items():
        c = cost(y, t)
        if c == INF:
            return INF
        total += c
    return total


def altered_observation(alteration: Mapping, world, edge: str) -> Multiset:
    """Multiset image of an edge's observation under ``alteration``."""
    return Multiset.of(alteration[y] for y in world.observation(edge))


def altered_observe(alteration: Mapping, world, walk: Sequence[str]) -> tuple:
    if not world.is_walk(walk):
        raise ValueError(f"not a walk: {list(walk)}")
    return tuple(altered_observation(alteration, world, e) for e in walk)
