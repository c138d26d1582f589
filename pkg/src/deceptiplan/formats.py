"""Instance documents (JSON), result documents, and the seeded random generator."""

from __future__ import annotations

import json
import os
import random
from collections.abc import Mapping
from fractions import Fraction

from .alteration import INF, CostFunction, SensorAlteration, as_cost, format_cost
from .automata import (
    DFA,
    AutomatonError,
    FiniteAutomaton,
    RegexSyntaxError,
    intersect_empty,
    complement,
    ordered,
    regex_to_dfa,
)
from .verifier import DeceptionInstance, InstanceError
from .world import WorldGraph, is_certifying

SEED_ENV = "DECEPTIPLAN_SEED"


class FormatError(InstanceError):
    """Malformed instance document; ``path`` locates the offending field."""

    def __init__(self, message: str, path: str = ""):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


def _req(doc, key, path, kind=None):
    if not isinstance(doc, Mapping) or key not in doc:
        raise FormatError(f"missing field {key!r}", path)
    val = doc[key]
    if kind is not None and not isinstance(val, kind):
        raise FormatError(f"field {key!r} must be {kind.__name__}", path)
    return val


def _parse_world(doc) -> WorldGraph:
    path = "world"
    vertices = _req(doc, "vertices", path, list)
    initial = _req(doc, "initial", path, str)
    sensors = _req(doc, "sensors", path, dict)
    edges = _req(doc, "edges", path, list)
    rows = []
    for i, ed in enumerate(edges):
        p = f"world.edges[{i}]"
        rows.append((
            str(_req(ed, "id", p)), str(_req(ed, "src", p)), str(_req(ed, "tgt", p)),
            [str(y) for y in _req(ed, "observation", p, list)],
        ))
    try:
        world = WorldGraph.build(
            [str(v) for v in vertices], initial,
            {str(s): [str(y) for y in evs] for s, evs in sensors.items()}, rows,
        )
    except ValueError as exc:
        raise FormatError(str(exc), path) from exc
    problems = world.validate()
    if problems:
        raise FormatError("; ".join(problems), path)
    return world


def _parse_automaton(doc, world: WorldGraph, path: str) -> FiniteAutomaton:
    edges = frozenset(world.edges)
    if not isinstance(doc, Mapping):
        raise FormatError("expected an object with 'regex' or 'dfa'", path)
    if "regex" in doc:
        text = doc["regex"]
        if not isinstance(text, str):
            raise FormatError("regex must be a string", path)
        try:
            return regex_to_dfa(text, edges)
        except RegexSyntaxError as exc:
            raise FormatError(f"regex error at column {exc.position + 1}: {exc}", path) from exc
        except AutomatonError as exc:
            raise FormatError(str(exc), path) from exc
    if "dfa" in doc:
        d = doc["dfa"]
        p = path + ".dfa"
        states = [str(s) for s in _req(d, "states", p, list)]
        initial = str(_req(d, "initial", p))
        accepting = [str(s) for s in _req(d, "accepting", p, list)]
        known = set(states)
        trap = d.get("default")
        delta = {q: {} for q in states}
        for i, tr in enumerate(_req(d, "transitions", p, list)):
            if not isinstance(tr, list) or len(tr) != 3:
                raise FormatError("transition must be [state, edge, state]", f"{p}.transitions[{i}]")
            q, e, r = (str(x) for x in tr)
            if e not in edges:
                raise FormatError(f"unknown edge {e!r}", f"{p}.transitions[{i}]")
            if q not in known or r not in known:
                raise FormatError(f"unknown state in {tr}", f"{p}.transitions[{i}]")
            delta[q][e] = r
        if trap is not None:
            trap = str(trap)
            if trap not in known:
                raise FormatError(f"default state {trap!r} is not a state", p)
            for q in states:
                for e in edges:
                    delta[q].setdefault(e, trap)
        try:
            return FiniteAutomaton(states, edges, delta, initial, accepting, DFA)
        except AutomatonError as exc:
            raise FormatError(str(exc), p) from exc
    raise FormatError("expected 'regex' or 'dfa'", path)


def _parse_cost(doc, world: WorldGraph) -> CostFunction:
    path = "cost"
    doc = doc or {}
    events = set(world.events)
    overrides = {}
    for i, tr in enumerate(doc.get("overrides", [])):
        p = f"cost.overrides[{i}]"
        if not isinstance(tr, list) or len(tr) != 3:
            raise FormatError("override must be [event, event, cost]", p)
        a, b, c = str(tr[0]), str(tr[1]), tr[2]
        for y in (a, b):
            if y not in events:
                raise FormatError(f"unknown event {y!r}", p)
        try:
            overrides[(a, b)] = as_cost(c)
        except (ValueError, ZeroDivisionError) as exc:
            raise FormatError(f"bad cost {c!r}: {exc}", p) from exc
    try:
        return CostFunction(world.events, overrides, doc.get("same", 0), doc.get("other", 1))
    except (ValueError, ZeroDivisionError) as exc:
        raise FormatError(str(exc), path) from exc


def instance_from_dict(doc: Mapping) -> DeceptionInstance:
    if not isinstance(doc, Mapping):
        raise FormatError("instance document must be a JSON object")
    world = _parse_world(_req(doc, "world", ""))
    itin_doc = _req(doc, "itinerary", "")
    dev_doc = _req(doc, "deviation", "")
    budget = doc.get("budget")
    if budget is not None:
        try:
            budget = as_cost(budget)
        except (ValueError, ZeroDivisionError) as exc:
            raise FormatError(f"bad budget {budget!r}", "budget") from exc
    return DeceptionInstance(
        world,
        _parse_automaton(itin_doc, world, "itinerary"),
        _parse_automaton(dev_doc, world, "deviation"),
        _parse_cost(doc.get("cost"), world),
        name=str(doc.get("name", "")),
        budget=budget,
        itinerary_spec=dict(itin_doc),
        deviation_spec=dict(dev_doc),
        notes=str(doc.get("notes", "")),
        extra=dict(doc.get("extra", {})),
    )


def parse_instance(text: str) -> DeceptionInstance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return instance_from_dict(doc)


def load_instance(path: str) -> DeceptionInstance:
    with open(path, encoding="utf-8") as fh:
        return parse_instance(fh.read())


def _cost_doc(x):
    if x == INF:
        return "inf"
    x = Fraction(x)
    return x.numerator if x.denominator == 1 else str(x)


def dfa_doc(aut: FiniteAutomaton) -> dict:
    names = {q: str(i) for i, q in enumerate(ordered(aut.states))}
    trans = [
        [names[q], e, names[aut.step(q, e)]]
        for q in ordered(aut.states)
        for e in ordered(aut.out(q))
    ]
    return {
        "states": [names[q] for q in ordered(aut.states)],
        "initial": names[aut.initial],
        "accepting": [names[q] for q in ordered(aut.accepting)],
        "transitions": trans,
    }


def world_doc(world: WorldGraph) -> dict:
    return {
        "vertices": list(world.vertices),
        "initial": world.initial,
        "sensors": {s: list(evs) for s, evs in world.sensors.items()},
        "edges": [
            {"id": e, "src": world.src(e), "tgt": world.tgt(e),
             "observation": ordered(world.observation(e))}
            for e in ordered(world.edges)
        ],
    }


def instance_to_dict(inst: DeceptionInstance) -> dict:
    cost = inst.cost
    doc = {"name": inst.name}
    if inst.notes:
        doc["notes"] = inst.notes
    doc["world"] = world_doc(inst.world)
    for key, aut, spec in (
        ("itinerary", inst.itinerary, inst.itinerary_spec),
        ("deviation", inst.deviation, inst.deviation_spec),
    ):
        if isinstance(spec, Mapping) and "regex" in spec:
            doc[key] = {"regex": spec["regex"]}
        else:
            doc[key] = {"dfa": dfa_doc(aut)}
    doc["cost"] = {
        "same": _cost_doc(cost.same),
        "other": _cost_doc(cost.other),
        "overrides": [
            [a, b, _cost_doc(cost(a, b))] for a, b, _ in cost.as_triples()
        ],
    }
    if inst.budget is not None:
        doc["budget"] = _cost_doc(inst.budget)
    if inst.extra:
        doc["extra"] = json.loads(json.dumps(inst.extra))
    return doc


def print_instance(inst: DeceptionInstance) -> str:
    return json.dumps(instance_to_dict(inst), indent=2, ensure_ascii=False) + "\n"


def same_language(a: FiniteAutomaton, b: FiniteAutomaton) -> bool:
    if a.alphabet != b.alphabet:
        return False
    return intersect_empty(a, complement(b)) is None and intersect_empty(b, complement(a)) is None


def instances_equal(a: DeceptionInstance, b: DeceptionInstance) -> bool:
    """Structural equality: same world, cost table, budget and automaton languages."""
    return (
        a.world == b.world
        and a.cost == b.cost
        and a.budget == b.budget
        and same_language(a.itinerary, b.itinerary)
        and same_language(a.deviation, b.deviation)
    )


def parse_alteration(text: str, events) -> SensorAlteration:
    """Alteration file: a JSON object of changed events; unlisted events map to themselves."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, Mapping):
        raise FormatError("alteration must be a JSON object")
    if "alteration" in doc and isinstance(doc["alteration"], Mapping):
        doc = doc["alteration"]
    try:
        return SensorAlteration.with_changes(events, {str(k): str(v) for k, v in doc.items()})
    except ValueError as exc:
        raise FormatError(str(exc), "alteration") from exc


def result_doc(name: str, result) -> dict:
    doc = {"instance": name}
    doc.update(result.to_dict())
    doc["stats"] = {k: v for k, v in doc["stats"].items() if k != "seconds"}
    return doc


# ---------------------------------------------------------------------------
# Random instances


def resolve_seed(seed: int | None) -> int:
    env = os.environ.get(SEED_ENV)
    if env not in (None, ""):
        try:
            return int(env)
        except ValueError as exc:
            raise FormatError(f"{SEED_ENV} must be an integer, got {env!r}") from exc
    return 0 if seed is None else seed


def _random_dfa(
    rng: random.Random, edges: list, n_states: int, density: float, accept_empty: bool
) -> dict:
    states = [str(i) for i in range(n_states)]
    accepting = [q for q in states if (accept_empty or q != "0") and rng.random() < density]
    trans = [[q, e, rng.choice(states)] for q in states for e in edges]
    return {"states": states, "initial": "0", "accepting": accepting, "transitions": trans}


def _random_walks(rng: random.Random, edges: list, start: str, count: int, max_len: int) -> dict:
    out = {}
    for e in edges:
        out.setdefault(e["src"], []).append(e)
    walks = []
    for _ in range(count):
        v, walk = start, []
        for _ in range(rng.randint(1, max_len)):
            if v not in out:
                break
            e = rng.choice(out[v])
            walk.append(e["id"])
            v = e["tgt"]
        walks.append(" ".join(walk) if walk else "eps")
    if not walks:
        return {"dfa": {"states": ["0"], "initial": "0", "accepting": [], "transitions": [],
                        "default": "0"}}
    return {"regex": " | ".join(sorted(set(walks)))}


def gen_random(
    n_vertices: int = 4,
    n_edges: int = 6,
    n_events: int = 4,
    m: int = 2,
    itinerary_density: float = 0.5,
    deviation_density: float = 0.5,
    seed: int | None = None,
    dfa_states: int = 3,
    require_certifying: bool = True,
    max_tries: int = 200,
    other_cost=1,
    inf_rate: float = 0.0,
    accept_empty: bool = False,
    language: str = "dfa",
    itinerary_walks: int = 3,
    deviation_walks: int = 2,
    max_walk: int = 4,
) -> dict:
    """A random instance document; identical parameters and seed give identical output.

    Events are grouped into sensors of one or two events.  Each edge fires a
    random nonempty set of at most ``m`` events.

    With ``language="dfa"`` the itinerary and deviation are random DFAs whose
    states accept with the given densities (the initial state only when
    ``accept_empty`` is set).  With ``language="walks"`` they are finite sets
    of random walks from the initial vertex, written as regular expressions.

    Candidates whose sensors do not certify the itinerary are redrawn up to
    ``max_tries`` times.
    """
    if language not in ("dfa", "walks"):
        raise ValueError(f"unknown language kind {language!r}")
    seed = resolve_seed(seed)
    rng = random.Random(seed)
    if n_events < 1 or n_vertices < 1 or n_edges < 1 or m < 1:
        raise ValueError("sizes must be positive")
    last = None
    for attempt in range(max_tries):
        vertices = [f"v{i}" for i in range(n_vertices)]
        events = [f"y{i}" for i in range(n_events)]
        sensors = {}
        k = 0
        while k < n_events:
            size = 1 if k == n_events - 1 else rng.choice((1, 2))
            sensors[f"s{len(sensors)}"] = events[k:k + size]
            k += size
        edges = []
        for i in range(n_edges):
            size = rng.randint(1, min(m, n_events))
            obs = ordered(rng.sample(events, size))
            # the first edges leave the initial vertex so walks exist
            src = vertices[0] if i < 2 else rng.choice(vertices)
            edges.append({"id": f"e{i}", "src": src, "tgt": rng.choice(vertices), "observation": obs})
        edge_ids = [e["id"] for e in edges]
        cost = {"same": 0, "other": other_cost, "overrides": []}
        for a in events:
            for b in events:
                if a != b and inf_rate and rng.random() < inf_rate:
                    cost["overrides"].append([a, b, "inf"])
        if language == "dfa":
            itinerary = {"dfa": _random_dfa(rng, edge_ids, dfa_states, itinerary_density, accept_empty)}
            deviation = {"dfa": _random_dfa(rng, edge_ids, dfa_states, deviation_density, accept_empty)}
        else:
            itinerary = _random_walks(rng, edges, vertices[0], itinerary_walks, max_walk)
            deviation = _random_walks(rng, edges, vertices[0], deviation_walks, max_walk)
        doc = {
            "name": f"random-{seed}-{attempt}",
            "world": {"vertices": vertices, "initial": vertices[0], "sensors": sensors, "edges": edges},
            "itinerary": itinerary,
            "deviation": deviation,
            "cost": cost,
        }
        last = doc
        if not require_certifying:
            return doc
        inst = instance_from_dict(doc)
        if is_certifying(inst.world, inst.itinerary).certifying:
            return doc
    raise InstanceError(f"no certifying instance after {max_tries} tries (last {last['name']})")


def dumps(doc) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def format_result_text(name: str, result) -> str:
    lines = [f"instance: {name}", f"status: {result.status}"]
    if result.feasible:
        lines.append(f"cost: {format_cost(result.cost)}")
        changes = result.alteration.changes()
        if changes:
            lines.append("alteration:")
            lines.extend(f"  {y} -> {t}" for y, t in changes.items())
        else:
            lines.append("alteration: identity")
    else:
        lines.append(f"reason: {result.certificate}")
    return "\n".join(lines)
