"""Bundled instances: the department, three gridworld variants, the museum and a multicut.

The department and gridworld floor plans are reconstructions.  Edge
numbering, door placement and sensor placement were recovered from the
written description of the scenarios, so an unexpected optimum should be
blamed on the transcription before the solver.
"""

from __future__ import annotations

from functools import lru_cache

from .formats import instance_from_dict, instance_to_dict
from .multicut import fig4_digraph, reduce_to_mcsd
from .verifier import DeceptionInstance

# -- department -------------------------------------------------------------
# Regions: H hub corridor (start), W west corridor, X east corridor, rooms
# A..G.  Beams b1..b6 fire on passage in either direction; occupancy o1
# (rooms A and C), o2 (D), o3 (E and F) fire o+ on entry and o- on exit.
# G has three doors: to H (b5), to F on the left (b5) and to F on the right
# (no beam).  F's door to H carries b6.
DEPARTMENT_EDGES = (
    ("e1", "H", "W", ["b3"]),
    ("e2", "W", "H", ["b3"]),
    ("e3", "W", "A", ["o1+"]),
    ("e4", "A", "W", ["o1-"]),
    ("e5", "B", "W", ["b1"]),
    ("e6", "W", "B", ["b1"]),
    ("e7", "H", "C", ["o1+"]),
    ("e8", "C", "H", ["o1-"]),
    ("e9", "H", "X", ["b4"]),
    ("e10", "X", "H", ["b4"]),
    ("e11", "C", "D", ["o1-", "o2+"]),
    ("e12", "D", "C", ["o1+", "o2-"]),
    ("e13", "B", "X", ["b2"]),
    ("e14", "X", "B", ["b2"]),
    ("e15", "D", "X", ["o2-"]),
    ("e16", "X", "D", ["o2+"]),
    ("e17", "H", "G", ["b5"]),
    ("e18", "G", "H", ["b5"]),
    ("e19", "H", "F", ["b6", "o3+"]),
    ("e20", "F", "H", ["b6", "o3-"]),
    ("e21", "G", "F", ["b5", "o3+"]),  # left door
    ("e22", "F", "G", ["b5", "o3-"]),
    ("e23", "G", "F", ["o3+"]),  # right door
    ("e24", "F", "G", ["o3-"]),
    ("e25", "X", "E", ["o3+"]),
    ("e26", "E", "X", ["o3-"]),
)

_ANY = "(" + "|".join(f"e{i}" for i in range(1, 27)) + ")*"
_FG = "(e17|e19)(e21|e22|e23|e24)*(e18|e20)"

DEPARTMENT_ROWS = {
    1: (_ANY, "eps", "any walk is allowed; the deviation is standing still"),
    2: (_ANY, _ANY, "any walk is allowed and any walk is intended"),
    3: ("e9 e25", "e1 e3", "allowed: go straight to E; intended: go straight to A"),
    4: (
        "(e1|e2|e9|e10)*" + _FG,
        "e1 e6 e13 e10",
        "allowed: wander the corridor, then visit F/G; intended: clockwise loop through B",
    ),
    5: (
        "e17 (e21|e23) e20",
        "e7 e11 e15",
        "allowed: G then F by either door, then back; intended: C, D, then the corridor",
    ),
    6: (
        _FG + "(e1|e7)(e3 e4)*(e2|e8)",
        "e7 e11 e15 (e14 e5 e2 | e25 e26 e10)",
        "allowed: F/G, then A any number of times or C, then back; "
        "intended: C, D, then B or E, then back",
    ),
}


def department_world() -> dict:
    sensors = {f"b{i}": [f"b{i}"] for i in range(1, 7)}
    sensors.update({f"o{i}": [f"o{i}+", f"o{i}-"] for i in range(1, 4)})
    return {
        "vertices": ["H", "W", "X", "A", "B", "C", "D", "E", "F", "G"],
        "initial": "H",
        "sensors": sensors,
        "edges": [
            {"id": e, "src": s, "tgt": t, "observation": obs}
            for e, s, t, obs in DEPARTMENT_EDGES
        ],
    }


def department_doc(row: int) -> dict:
    itinerary, deviation, notes = DEPARTMENT_ROWS[row]
    return {
        "name": f"department-row{row}",
        "notes": notes + " (floor plan transcribed from a figure)",
        "world": department_world(),
        "itinerary": {"regex": itinerary},
        "deviation": {"regex": deviation},
        "cost": {"same": 0, "other": 1, "overrides": []},
    }


# -- gridworld ---------------------------------------------------------------
# 5x5 rooms named by row and column ("00" top left).  Lettered rooms:
GRID_NAMED = {"14": "A", "22": "B", "33": "C", "34": "D", "44": "E", "42": "F", "03": "G", "20": "H"}
# Occupancy-sensed rooms: the lettered ones plus six more, 14 sensors in all.
GRID_GUARDED = tuple(sorted(set(GRID_NAMED) | {"01", "02", "11", "23", "30", "41"}))

GRID_ROUTES = {
    # start to B
    "blue": [("00", "01", "02", "12", "22"), ("00", "01", "11", "12", "22"), ("00", "01", "11", "21", "22")],
    # B to E, through C only when D follows
    "green": [("22", "23", "33", "34", "44"), ("22", "32", "33", "34", "44"), ("22", "23", "24", "34", "44")],
    # E to G
    "gray": [("44", "43", "33", "23", "13", "03"), ("44", "34", "24", "23", "13", "03")],
    # start to H, then F, avoiding E
    "red": [("00", "01", "11", "10", "20", "30", "40", "41", "42"), ("00", "01", "11", "10", "20", "30", "31", "41", "42")],
    # F to A
    "red-ext": [("42", "32", "22", "23", "24", "14"), ("42", "43", "33", "34", "24", "14")],
}


def _grid_world() -> dict:
    cells = [f"{r}{c}" for r in range(5) for c in range(5)]
    guarded = set(GRID_GUARDED)
    edges = []
    for a in cells:
        for b in cells:
            if abs(int(a[0]) - int(b[0])) + abs(int(a[1]) - int(b[1])) != 1:
                continue
            obs = ([f"o{a}-"] if a in guarded else []) + ([f"o{b}+"] if b in guarded else [])
            # a door between two unsensed rooms fires nothing and is left out
            if obs:
                edges.append({"id": f"m{a}_{b}", "src": a, "tgt": b, "observation": obs})
    return {
        "vertices": cells,
        "initial": "00",
        "sensors": {f"o{c}": [f"o{c}+", f"o{c}-"] for c in GRID_GUARDED},
        "edges": edges,
    }


def _walk(cells) -> str:
    return " ".join(f"m{a}_{b}" for a, b in zip(cells, cells[1:]))


def _any(walks) -> str:
    return "(" + " | ".join(_walk(w) for w in walks) + ")"


def grid_doc(variant: str) -> dict:
    r = GRID_ROUTES
    itinerary = _any(r["blue"]) + " " + _any(r["green"])
    deviation = _any(r["red"])
    if variant == "b":
        itinerary += " " + _any(r["gray"])
        deviation += " " + _walk(r["red-ext"][0])
    elif variant == "c":
        itinerary += " " + _any(r["gray"])
        deviation += " " + _any(r["red-ext"])
    elif variant != "a":
        raise KeyError(variant)
    return {
        "name": f"grid-{variant}",
        "notes": "5x5 gridworld; room layout and sensor placement transcribed from a figure",
        "world": _grid_world(),
        "itinerary": {"regex": itinerary},
        "deviation": {"regex": deviation},
        "cost": {"same": 0, "other": 1, "overrides": []},
    }


# -- museum --------------------------------------------------------------------
# Entrance V, rooms 1..12 each with an occupancy sensor.  Two wings leave
# room 2 and meet again at room 6; rooms 11 and 12 form a side gallery.
VAULT_DOORS = (
    ("V", "1"), ("1", "2"), ("2", "3"), ("3", "4"), ("4", "5"), ("5", "6"),
    ("2", "10"), ("10", "9"), ("9", "8"), ("8", "6"), ("6", "7"),
    ("1", "11"), ("11", "12"),
)
VAULT_TOURS = {
    "blue": ["V", "1", "2", "3", "4", "5", "6", "7"],
    "green": ["V", "1", "11", "12", "11", "1", "V"],
    "red": ["V", "1", "2", "10", "9", "8", "6", "7"],
}
VAULT_SWAPS = (("5", "8"), ("4", "9"), ("3", "10"))


def green_vault_doc() -> dict:
    rooms = [str(i) for i in range(1, 13)]
    edges = []
    for a, b in VAULT_DOORS:
        for s, t in ((a, b), (b, a)):
            obs = ([f"o{s}-"] if s != "V" else []) + ([f"o{t}+"] if t != "V" else [])
            edges.append({"id": f"d{s}_{t}", "src": s, "tgt": t, "observation": obs})
    events = [f"o{r}{p}" for r in rooms for p in "+-"]
    # relabelling within a polarity costs 1/2, across polarities 1
    overrides = [
        [a, b, "1/2"] for a in events for b in events if a != b and a[-1] == b[-1]
    ]
    tour = lambda rs: " ".join(f"d{a}_{b}" for a, b in zip(rs, rs[1:]))  # noqa: E731
    return {
        "name": "green-vault",
        "notes": "museum floor plan; two allowed tours and one adversarial tour",
        "world": {
            "vertices": ["V"] + rooms,
            "initial": "V",
            "sensors": {f"o{r}": [f"o{r}+", f"o{r}-"] for r in rooms},
            "edges": edges,
        },
        "itinerary": {"regex": f"{tour(VAULT_TOURS['blue'])} | {tour(VAULT_TOURS['green'])}"},
        "deviation": {"regex": tour(VAULT_TOURS["red"])},
        "cost": {"same": 0, "other": 1, "overrides": overrides},
    }


def vault_swap_alteration() -> dict:
    changes = {}
    for a, b in VAULT_SWAPS:
        for p in "+-":
            changes[f"o{a}{p}"] = f"o{b}{p}"
            changes[f"o{b}{p}"] = f"o{a}{p}"
    return changes


# -- registry ------------------------------------------------------------------


def _fig4_doc() -> dict:
    g, pairs = fig4_digraph()
    doc = instance_to_dict(reduce_to_mcsd(g, pairs, name="fig4-multicut"))
    doc["notes"] = "multicut reduction of a three-pair digraph"
    return doc


BUILTIN_DOCS = {f"department-row{i}": (lambda i=i: department_doc(i)) for i in range(1, 7)}
BUILTIN_DOCS.update({f"grid-{v}": (lambda v=v: grid_doc(v)) for v in "abc"})
BUILTIN_DOCS["green-vault"] = green_vault_doc
BUILTIN_DOCS["fig4-multicut"] = _fig4_doc

BUILTIN_NAMES = tuple(BUILTIN_DOCS)
ALIASES = {"department": "department-row1", "fig4": "fig4-multicut"}


def builtin_doc(name: str) -> dict:
    name = ALIASES.get(name, name)
    if name not in BUILTIN_DOCS:
        raise KeyError(f"unknown builtin instance {name!r}; choose from {', '.join(BUILTIN_NAMES)}")
    return BUILTIN_DOCS[name]()


@lru_cache(maxsize=None)
def builtin_instance(name: str) -> DeceptionInstance:
    name = ALIASES.get(name, name)
    if name == "fig4-multicut":
        # keep the twin metadata attached to the in-memory instance
        g, pairs = fig4_digraph()
        return reduce_to_mcsd(g, pairs, name=name)
    return instance_from_dict(builtin_doc(name))
