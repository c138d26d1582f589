"""The integer program for minimum-cost deceptive alterations.

``build_model`` emits the linearized program (with the observation set
restricted to realizable observations and the sink constraints), ``export_lp``
/ ``parse_lp`` move it through the CPLEX LP text format, ``check_assignment``
evaluates any assignment exactly, and ``solve`` finds the optimum with a
branch-and-bound over the alteration rows.
"""

from __future__ import annotations

import heapq
import re
import time
from collections import Counter, deque
from collections.abc import Mapping
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

from .alteration import INF, Multiset, SensorAlteration, format_cost, total_cost
from .automata import coreachable_states, ordered
from .verifier import DeceptionInstance, PlanResult

FAMILIES = (
    "init",
    "mapping",
    "forbidden",
    "deceptive",
    "bigmup",
    "bigmlo",
    "cdef",
    "ldefup",
    "ldeflo",
    "step",
    "sink",
)
LINEARIZED = ("bigmup", "bigmlo", "cdef", "ldefup", "ldeflo", "step", "sink")


@dataclass
class Variable:
    name: str
    kind: str
    index: tuple
    lower: object = 0
    upper: object = 1
    integer: bool = True
    binary: bool = True


@dataclass(frozen=True)
class LinearConstraint:
    name: str
    terms: tuple  # ((coefficient, variable name), ...)
    sense: str  # "<=", "=", ">="
    rhs: object

    @property
    def tag(self) -> str:
        return self.name.split("_", 1)[0]

    def lhs(self, values: Mapping):
        return sum(c * values[v] for c, v in self.terms)

    def holds(self, values: Mapping) -> bool:
        lhs = self.lhs(values)
        if self.sense == "<=":
            return lhs <= self.rhs
        if self.sense == ">=":
            return lhs >= self.rhs
        return lhs == self.rhs


@dataclass
class IlpModel:
    variables: dict = field(default_factory=dict)
    constraints: list = field(default_factory=list)
    objective: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)
    context: object = field(default=None, repr=False, compare=False)

    def add_var(self, kind, index, lower=0, upper=1, integer=True, binary=True):
        name = kind + "_" + "_".join(str(i) for i in index)
        self.variables[name] = Variable(name, kind, tuple(index), lower, upper, integer, binary)
        return name

    def add(self, tag, index, terms, sense, rhs):
        merged: dict = {}
        for c, v in terms:
            merged[v] = merged.get(v, 0) + c
        terms = tuple((c, v) for v, c in merged.items() if c != 0)
        name = tag + "_" + "_".join(str(i) for i in index) if index else tag
        self.constraints.append(LinearConstraint(name, terms, sense, rhs))

    def same_as(self, other: "IlpModel") -> bool:
        """Structural equality of variables, constraints and objective."""

        def norm_var(v):
            return (v.name, v.kind, v.index, Fraction(v.lower),
                    None if v.upper == INF else Fraction(v.upper), v.integer, v.binary)

        def norm_con(c):
            return (c.name, tuple(sorted((v, Fraction(k)) for k, v in c.terms)),
                    c.sense, Fraction(c.rhs))

        return (
            sorted(map(norm_var, self.variables.values()))
            == sorted(map(norm_var, other.variables.values()))
            and sorted(map(norm_con, self.constraints)) == sorted(map(norm_con, other.constraints))
            and {k: Fraction(v) for k, v in self.objective.items()}
            == {k: Fraction(v) for k, v in other.objective.items()}
        )


class PlanningContext:
    """Indexed view of an instance shared by the model builder, checker and solver."""

    def __init__(self, instance: DeceptionInstance):
        self.instance = instance
        world = instance.world
        self.world = world
        self.events = instance.events
        self.event_index = {y: i for i, y in enumerate(self.events)}
        self.edges = tuple(ordered(world.edges))
        self.edge_index = {e: i for i, e in enumerate(self.edges)}
        self.z = tuple(ordered(instance.realizable))
        self.z_index = {x: i for i, x in enumerate(self.z)}
        self.obs = {e: Multiset.of(world.observation(e)) for e in self.edges}
        outside = instance.outside
        self.O = outside.dfa
        self.sink = outside.sink
        self.q_states = tuple(ordered(self.O.states))
        self.q_index = {q: i for i, q in enumerate(self.q_states)}
        self.M = instance.deviation_product
        self.p_states = tuple(ordered(self.M.states))
        self.p_index = {p: i for i, p in enumerate(self.p_states)}
        self.moves = {
            p: tuple((e, self.M.step(p, e)) for e in ordered(self.M.out(p)))
            for p in self.p_states
        }

    @cached_property
    def m(self) -> int:
        return self.world.max_simultaneous

    def delta_o(self, q, x):
        return self.O.step(q, x)

    def a_name(self, q, p):
        return f"a_{self.q_index[q]}_{self.p_index[p]}"

    def u_name(self, y, t):
        return f"u_{self.event_index[y]}_{self.event_index[t]}"

    def legend(self) -> dict:
        return {
            "events": list(self.events),
            "edges": list(self.edges),
            "observations": [list(x.elements()) for x in self.z],
            "outside_states": len(self.q_states),
            "deviation_states": [[str(d), v] for d, v in self.p_states],
        }


def choose_big_m(instance: DeceptionInstance) -> tuple[int, int]:
    """Smallest constants that make both big-M families exact.

    ``|Σ_{y'∈O(e)} u[y',y] - n[y,x]| <= m`` because both terms lie in
    ``[0, m]``; the l-definition sum is at most ``|x| + |O(e)| <= 2m``.
    """
    m = instance.world.max_simultaneous
    return m, 2 * m


def build_model(instance: DeceptionInstance, big_m: tuple | None = None) -> IlpModel:
    ctx = PlanningContext(instance)
    if ctx.m == 0:
        raise ValueError("world has no edges carrying observations")
    M, Mp = big_m if big_m is not None else choose_big_m(instance)
    model = IlpModel(context=ctx)
    model.metadata = {
        "instance": instance.name,
        "M": M,
        "M_prime": Mp,
        "big_m_derivation": "M = m bounds |sum u - n|; M' = 2m bounds sum b + sum c",
        "q_sink": None if ctx.sink is None else ctx.q_index[ctx.sink],
        "legend": ctx.legend(),
    }
    ev, E, Z = ctx.events, ctx.edges, ctx.z
    ei, xi, yi = ctx.edge_index, ctx.z_index, ctx.event_index
    cost = instance.cost

    a = {}
    for q in ctx.q_states:
        for p in ctx.p_states:
            a[q, p] = model.add_var("a", (ctx.q_index[q], ctx.p_index[p]))
    u = {}
    for y in ev:
        for t in ev:
            c = cost(y, t)
            u[y, t] = model.add_var("u", (yi[y], yi[t]), upper=0 if c == INF else 1)
            if c != INF and c != 0:
                model.objective[u[y, t]] = c
    n = {}
    for y in ev:
        for x in Z:
            k = x.count(y)
            n[y, x] = model.add_var("n", (yi[y], xi[x]), lower=k, upper=k, binary=False)
    b = {}
    for x in Z:
        for e in E:
            for y in x.support():
                b[x, e, y] = model.add_var("b", (xi[x], ei[e], yi[y]))
    cm = {}
    for e in E:
        for y in ev:
            cm[e, y] = model.add_var(
                "c", (ei[e], yi[y]), upper=len(ctx.obs[e]), binary=False
            )
    lv = {}
    for x in Z:
        for e in E:
            lv[x, e] = model.add_var("l", (xi[x], ei[e]))

    q0, p0 = ctx.O.initial, ctx.M.initial
    model.add("init", (ctx.q_index[q0], ctx.p_index[p0]), [(1, a[q0, p0])], "=", 1)
    for y in ev:
        model.add("mapping", (yi[y],), [(1, u[y, t]) for t in ev], "=", 1)
    for y, t in cost.infinite_pairs():
        model.add("forbidden", (yi[y], yi[t]), [(1, u[y, t])], "=", 0)
    for q in ordered(ctx.O.accepting):
        for p in ordered(ctx.M.accepting):
            model.add("deceptive", (ctx.q_index[q], ctx.p_index[p]), [(1, a[q, p])], "=", 0)
    for x in Z:
        for e in E:
            for y in x.support():
                into = [(1, u[y2, y]) for y2 in ordered(ctx.obs[e].support())]
                idx = (xi[x], ei[e], yi[y])
                model.add("bigmup", idx, into + [(-1, n[y, x]), (-M, b[x, e, y])], "<=", 0)
                model.add("bigmlo", idx, into + [(-1, n[y, x]), (M, b[x, e, y])], ">=", 0)
    for e in E:
        for y in ev:
            into = [(-1, u[y2, y]) for y2 in ordered(ctx.obs[e].support())]
            model.add("cdef", (ei[e], yi[y]), [(1, cm[e, y])] + into, "=", 0)
    for x in Z:
        for e in E:
            s = [(1, b[x, e, y]) for y in x.support()]
            s += [(1, cm[e, y]) for y in ev if y not in x]
            idx = (xi[x], ei[e])
            model.add("ldefup", idx, s + [(Mp, lv[x, e])], "<=", Mp)
            model.add("ldeflo", idx, s + [(-Mp, lv[x, e])], ">=", -Mp)
    for q in ctx.q_states:
        qi = ctx.q_index[q]
        for p in ctx.p_states:
            pi = ctx.p_index[p]
            for e, p2 in ctx.moves[p]:
                for x in Z:
                    nxt = a[ctx.delta_o(q, x), p2]
                    model.add(
                        "step", (qi, pi, ei[e], xi[x]),
                        [(1, a[q, p]), (1, lv[x, e]), (-1, nxt)], "<=", 1,
                    )
                if ctx.sink is not None:
                    terms = [(1, a[q, p]), (-1, a[ctx.sink, p2])]
                    terms += [(-1, lv[x, e]) for x in Z]
                    model.add("sink", (qi, pi, ei[e]), terms, "<=", 0)
    return model


def model_stats(model: IlpModel) -> dict:
    """Variable and constraint counts per family."""
    variables = Counter(v.kind for v in model.variables.values())
    constraints = Counter(c.tag for c in model.constraints)
    binaries = Counter(v.kind for v in model.variables.values() if v.binary)
    return {
        "variables": {k: variables.get(k, 0) for k in ("a", "u", "n", "b", "c", "l")},
        "constraints": {k: constraints.get(k, 0) for k in FAMILIES},
        "binary": {k: binaries.get(k, 0) for k in ("a", "u", "b", "l")},
        "total_variables": len(model.variables),
        "total_constraints": len(model.constraints),
    }


# ---------------------------------------------------------------------------
# Assignments


def assignment_from_alteration(
    instance: DeceptionInstance, model: IlpModel, alteration: Mapping
) -> dict:
    """Canonical assignment induced by an alteration.

    The a-variables take the least fixed point of the step and sink rules,
    i.e. exactly the (outside state, deviation state) pairs reachable from
    the initial pair.
    """
    ctx = model.context or PlanningContext(instance)
    alteration = SensorAlteration(alteration, ctx.events)
    values = {name: 0 for name in model.variables}
    for y in ctx.events:
        values[ctx.u_name(y, alteration[y])] = 1
    for var in model.variables.values():
        if var.kind == "n":
            values[var.name] = var.lower
    images = {e: Multiset.of(alteration[y] for y in ctx.world.observation(e)) for e in ctx.edges}
    for e in ctx.edges:
        ie = ctx.edge_index[e]
        for y in ctx.events:
            values[f"c_{ie}_{ctx.event_index[y]}"] = images[e].count(y)
        for x in ctx.z:
            ix = ctx.z_index[x]
            if images[e] == x:
                values[f"l_{ix}_{ie}"] = 1
            for y in x.support():
                differs = images[e].count(y) != x.count(y)
                values[f"b_{ix}_{ie}_{ctx.event_index[y]}"] = int(differs)
    for q, p in _reachable_pairs(ctx, images):
        values[ctx.a_name(q, p)] = 1
    return values


def _reachable_pairs(ctx: PlanningContext, images: Mapping) -> set:
    start = (ctx.O.initial, ctx.M.initial)
    seen = {start}
    queue = deque([start])
    while queue:
        q, p = queue.popleft()
        for e, p2 in ctx.moves[p]:
            nxt = (ctx.delta_o(q, images[e]), p2)
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return seen


@dataclass
class CheckReport:
    satisfied: bool
    violations: list
    logical_satisfied: bool | None
    linearized_satisfied: bool
    objective: object
    divergences: list = field(default_factory=list)

    @property
    def divergence(self) -> bool:
        return bool(self.divergences)

    def to_dict(self) -> dict:
        return {
            "satisfied": self.satisfied,
            "objective": format_cost(self.objective),
            "logical_satisfied": self.logical_satisfied,
            "linearized_satisfied": self.linearized_satisfied,
            "divergence": self.divergence,
            "divergences": list(self.divergences),
            "violations": [
                {"constraint": n, "lhs": str(lhs), "sense": s, "rhs": str(r)}
                for n, lhs, s, r in self.violations
            ],
        }


_GROUP = {"bigmup": "bigm", "bigmlo": "bigm", "ldefup": "ldef", "ldeflo": "ldef",
          "step": "step", "sink": "sink"}


def check_assignment(model: IlpModel, assignment: Mapping) -> CheckReport:
    """Evaluate every bound and constraint exactly.

    For models built by :func:`build_model` each linearized group (the two
    big-M rows for one ``b``, the two rows defining one ``l``, each step and
    sink row) is also evaluated as the implication it encodes:

    * ``b = 0  =>  sum of u into y over O(e) == n[y, x]``
    * ``l = 1  =>  sum of b over x + sum of c outside x == 0``
    * ``a[q,p] and l[x,e]  =>  a[next]``
    * ``a[q,p]  =>  a[sink, p'] or some l[x,e]``

    A group whose implication and linear rows disagree is a divergence.
    """
    missing = [v for v in model.variables if v not in assignment]
    if missing:
        raise KeyError(f"assignment lacks variables: {missing[:5]}")
    values = {k: Fraction(v) for k, v in assignment.items()}
    violations = []
    for var in model.variables.values():
        val = values[var.name]
        bad = val < var.lower or (var.upper != INF and val > var.upper)
        if var.integer and val.denominator != 1:
            bad = True
        if bad:
            violations.append((var.name, val, "in", f"[{var.lower}, {var.upper}]"))
    linear_groups: dict = {}
    for con in model.constraints:
        ok = con.holds(values)
        if not ok:
            violations.append((con.name, con.lhs(values), con.sense, con.rhs))
        fam = _GROUP.get(con.tag)
        if fam is not None:
            key = (fam, con.name.split("_", 1)[1] if "_" in con.name else "")
            linear_groups[key] = linear_groups.get(key, True) and ok
    objective = sum(Fraction(c) * values[v] for v, c in model.objective.items())
    linearized_ok = all(linear_groups.values())
    logical_ok, divergences = None, []
    if model.context is not None:
        logical = _logical_groups(model.context, values, linear_groups)
        logical_ok = all(logical.values())
        divergences = [
            f"{fam}_{idx}" for (fam, idx), ok in linear_groups.items()
            if logical.get((fam, idx), ok) != ok
        ]
    return CheckReport(
        not violations, violations, logical_ok, linearized_ok, objective, divergences
    )


def _logical_groups(ctx: PlanningContext, values: Mapping, groups) -> dict:
    ev, edges, z = ctx.events, ctx.edges, ctx.z

    def val(name):
        return values[name]

    def u_into(e, y):
        return sum(val(ctx.u_name(y2, y)) for y2 in ctx.obs[e].support())

    out = {}
    for fam, idx in groups:
        parts = [int(i) for i in idx.split("_")]
        if fam == "bigm":
            ix, ie, iy = parts
            x, e, y = z[ix], edges[ie], ev[iy]
            b = val(f"b_{ix}_{ie}_{iy}")
            out[fam, idx] = b == 1 or u_into(e, y) == val(f"n_{iy}_{ix}")
        elif fam == "ldef":
            ix, ie = parts
            x, e = z[ix], edges[ie]
            s = sum(val(f"b_{ix}_{ie}_{ctx.event_index[y]}") for y in x.support())
            s += sum(val(f"c_{ie}_{iy}") for iy, y in enumerate(ev) if y not in x)
            out[fam, idx] = val(f"l_{ix}_{ie}") == 0 or s == 0
        elif fam == "step":
            qi, pi, ie, ix = parts
            q, p, e, x = ctx.q_states[qi], ctx.p_states[pi], edges[ie], z[ix]
            p2 = ctx.M.step(p, e)
            nxt = val(ctx.a_name(ctx.delta_o(q, x), p2))
            out[fam, idx] = not (val(f"a_{qi}_{pi}") == 1 and val(f"l_{ix}_{ie}") == 1) or nxt == 1
        elif fam == "sink":
            qi, pi, ie = parts
            p, e = ctx.p_states[pi], edges[ie]
            p2 = ctx.M.step(p, e)
            alive = val(ctx.a_name(ctx.sink, p2)) == 1 or any(
                val(f"l_{ix}_{ie}") == 1 for ix in range(len(z))
            )
            out[fam, idx] = val(f"a_{qi}_{pi}") == 0 or alive
    return out


# ---------------------------------------------------------------------------
# LP text format


def _fmt_num(c) -> str:
    c = Fraction(c)
    if c.denominator == 1:
        return str(c.numerator)
    d = c.denominator
    while d % 2 == 0:
        d //= 2
    while d % 5 == 0:
        d //= 5
    if d == 1:
        # finite decimal expansion, written exactly
        digits = 0
        while (c * 10**digits).denominator != 1:
            digits += 1
        return f"{float(c):.{digits}f}"
    return repr(float(c))


def _fmt_expr(terms) -> list[str]:
    parts = []
    for c, v in terms:
        c = Fraction(c)
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        body = v if mag == 1 else f"{_fmt_num(mag)} {v}"
        parts.append(f"{sign} {body}")
    if parts and parts[0].startswith("+ "):
        parts[0] = parts[0][2:]
    return parts


def _wrap(head: str, parts: list[str], tail: str = "", width: int = 200) -> list[str]:
    lines, cur = [], head
    for p in parts + ([tail] if tail else []):
        if len(cur) + len(p) + 1 > width:
            lines.append(cur)
            cur = "   " + p
        else:
            cur = f"{cur} {p}" if cur.strip() else f"{cur}{p}"
    lines.append(cur)
    return lines


def export_lp(model: IlpModel) -> str:
    """Render the model in CPLEX LP format with family-tagged row names."""
    out = [f"\\ deceptiplan model {model.metadata.get('instance', '')}".rstrip()]
    out.append(
        f"\\ M = {model.metadata.get('M')}, M' = {model.metadata.get('M_prime')}, "
        f"q_sink = {model.metadata.get('q_sink')}"
    )
    out.append("Minimize")
    obj = [(c, v) for v, c in model.objective.items() if c != 0]
    if not obj:
        obj = [(0, next(iter(model.variables)))]
        out.extend(_wrap(" obj:", [f"0 {obj[0][1]}"]))
    else:
        out.extend(_wrap(" obj:", _fmt_expr(obj)))
    out.append("Subject To")
    for con in model.constraints:
        terms = con.terms or ((0, next(iter(model.variables))),)
        parts = _fmt_expr(terms) if con.terms else [f"0 {terms[0][1]}"]
        sense = {"<=": "<=", ">=": ">=", "=": "="}[con.sense]
        out.extend(_wrap(f" {con.name}:", parts, f"{sense} {_fmt_num(con.rhs)}"))
    out.append("Bounds")
    for var in model.variables.values():
        lo, hi = var.lower, var.upper
        if var.binary and lo == 0 and hi == 1:
            continue
        if lo == hi:
            out.append(f" {var.name} = {_fmt_num(lo)}")
        elif hi == INF:
            out.append(f" {var.name} >= {_fmt_num(lo)}")
        else:
            out.append(f" {_fmt_num(lo)} <= {var.name} <= {_fmt_num(hi)}")
    out.append("Binaries")
    names = [v.name for v in model.variables.values() if v.binary]
    out.extend(_wrap("", names))
    out.append("Generals")
    names = [v.name for v in model.variables.values() if v.integer and not v.binary]
    out.extend(_wrap("", names))
    out.append("End")
    return "\n".join(out) + "\n"


class LpFormatError(ValueError):
    pass


_SECTION = {
    "minimize": "obj", "minimum": "obj", "min": "obj",
    "subject to": "st", "such that": "st", "st": "st", "s.t.": "st",
    "bounds": "bounds", "bound": "bounds",
    "binaries": "bin", "binary": "bin", "bin": "bin",
    "generals": "gen", "general": "gen", "gen": "gen",
    "end": "end",
}
_TERM = re.compile(r"([+-])?\s*(\d+(?:\.\d*)?(?:[eE][+-]?\d+)?)?\s*([A-Za-z_][\w.]*)")
_NAME = re.compile(r"^([a-z]+)((?:_\d+)+)$")


def _parse_expr(text: str, where: int) -> list:
    terms = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        mt = _TERM.match(text, pos)
        if not mt or mt.end() == pos:
            raise LpFormatError(f"line {where}: cannot parse expression near {text[pos:pos+20]!r}")
        sign, coef, name = mt.groups()
        c = Fraction(coef) if coef else Fraction(1)
        if sign == "-":
            c = -c
        terms.append((c, name))
        pos = mt.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1
    return terms


def parse_lp(text: str) -> IlpModel:
    """Read a model written by :func:`export_lp` (CPLEX LP subset)."""
    model = IlpModel()
    section = None
    pending: list[tuple[int, str]] = []
    rows: list[tuple[int, str]] = []
    bounds, binaries, generals = [], [], []
    objective_text = []

    def flush():
        if pending:
            rows.append((pending[0][0], " ".join(t for _, t in pending)))
            pending.clear()

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("\\", 1)[0].strip()
        if not line:
            continue
        key = line.lower()
        if key in _SECTION:
            flush()
            section = _SECTION[key]
            if section == "end":
                break
            continue
        if section == "obj":
            objective_text.append(line)
        elif section == "st":
            if ":" in line.split()[0] or re.match(r"^[A-Za-z_][\w.]*\s*:", line):
                flush()
            pending.append((lineno, line))
        elif section == "bounds":
            bounds.append((lineno, line))
        elif section == "bin":
            binaries.extend(line.split())
        elif section == "gen":
            generals.extend(line.split())
        else:
            raise LpFormatError(f"line {lineno}: content outside any section")
    flush()

    seen: dict = {}

    def var(name):
        if name not in seen:
            m = _NAME.match(name)
            kind, index = (m.group(1), tuple(int(i) for i in m.group(2)[1:].split("_"))) if m else (name, ())
            seen[name] = Variable(name, kind, index, 0, INF, False, False)
        return seen[name]

    obj = " ".join(objective_text)
    if ":" in obj:
        obj = obj.split(":", 1)[1]
    for c, v in _parse_expr(obj, 0):
        var(v)
        if c != 0:
            model.objective[v] = model.objective.get(v, 0) + c

    for lineno, row in rows:
        name, body = row.split(":", 1)
        mt = re.search(r"(<=|>=|=<|=>|<|>|=)\s*([+-]?\s*\d+(?:\.\d*)?(?:[eE][+-]?\d+)?)\s*$", body)
        if not mt:
            raise LpFormatError(f"line {lineno}: constraint {name.strip()!r} has no relation")
        sense = {"<": "<=", "=<": "<=", "<=": "<=", ">": ">=", "=>": ">=", ">=": ">=", "=": "="}[mt.group(1)]
        rhs = Fraction(mt.group(2).replace(" ", ""))
        terms = [(c, v) for c, v in _parse_expr(body[: mt.start()], lineno) if c != 0]
        for _, v in terms:
            var(v)
        model.constraints.append(LinearConstraint(name.strip(), tuple(terms), sense, rhs))

    num = r"[+-]?\d+(?:\.\d*)?(?:[eE][+-]?\d+)?"
    for lineno, line in bounds:
        if m := re.fullmatch(rf"({num})\s*<=\s*([\w.]+)\s*<=\s*({num})", line):
            v = var(m.group(2))
            v.lower, v.upper = Fraction(m.group(1)), Fraction(m.group(3))
        elif m := re.fullmatch(rf"([\w.]+)\s*=\s*({num})", line):
            v = var(m.group(1))
            v.lower = v.upper = Fraction(m.group(2))
        elif m := re.fullmatch(rf"([\w.]+)\s*>=\s*({num})", line):
            var(m.group(1)).lower = Fraction(m.group(2))
        elif m := re.fullmatch(rf"([\w.]+)\s*<=\s*({num})", line):
            var(m.group(1)).upper = Fraction(m.group(2))
        elif m := re.fullmatch(r"([\w.]+)\s+free", line, re.I):
            var(m.group(1)).lower = -INF
        else:
            raise LpFormatError(f"line {lineno}: cannot parse bound {line!r}")
    for name in binaries:
        v = var(name)
        v.integer = v.binary = True
        if v.upper == INF:
            v.upper = 1
    for name in generals:
        var(name).integer = True
    model.variables = dict(sorted(seen.items(), key=lambda kv: kv[0]))
    return model


# ---------------------------------------------------------------------------
# Solver


class _Search:
    """Branch-and-bound over the rows of u (one event image at a time)."""

    def __init__(self, ctx: PlanningContext):
        self.ctx = ctx
        inst = ctx.instance
        cost = inst.cost
        M = ctx.M
        useful = coreachable_states(M)
        self.useful = useful
        # transitions that can lie on a path to an accepting deviation state
        self.moves = {
            p: tuple((e, p2) for e, p2 in ctx.moves[p] if p2 in useful)
            for p in ctx.p_states
            if p in useful
        }
        order: list = []
        seen_events: set = set()
        queue = deque([M.initial]) if M.initial in useful else deque()
        visited = set(queue)
        while queue:
            p = queue.popleft()
            for e, p2 in self.moves[p]:
                for y in ordered(ctx.world.observation(e)):
                    if y not in seen_events:
                        seen_events.add(y)
                        order.append(y)
                if p2 not in visited:
                    visited.add(p2)
                    queue.append(p2)
        self.order = order
        self.fixed = {}
        base = Fraction(0)
        self.infeasible_reason = None
        for y in inst.events:
            if not cost.finite_targets(y):
                self.infeasible_reason = f"event {y} has no finite-cost image"
            elif y not in seen_events:
                t = cost.finite_targets(y)[0]
                self.fixed[y] = t
                base += cost(y, t)
        self.base = base
        self.options = [
            [(cost(y, t), ctx.event_index[t], t) for t in cost.finite_targets(y)]
            for y in order
        ]
        mins = [opts[0][0] if opts else INF for opts in self.options]
        self.rest = [sum(mins[k:], Fraction(0)) for k in range(len(order) + 1)]
        # edges become fully determined once their last event is fixed
        pos = {y: k for k, y in enumerate(order)}
        self.ready_at: dict = {}
        for p, mv in self.moves.items():
            for e, _ in mv:
                k = max(pos[y] for y in ctx.world.observation(e)) + 1
                self.ready_at[e] = k
        self.final = {(q, p) for q in ctx.O.accepting for p in M.accepting}
        self.nodes = 0
        self.pruned = 0

    def doomed(self, assigned: tuple) -> bool:
        """Propagate over determined edges; True if a violation is forced."""
        ctx = self.ctx
        depth = len(assigned)
        amap = dict(self.fixed)
        for y, (_, _, t) in zip(self.order, assigned):
            amap[y] = t
        world = ctx.world
        sink = ctx.sink
        start = (ctx.O.initial, ctx.M.initial)
        if start[1] not in self.useful:
            return False
        seen = {start}
        queue = deque([start])
        images = {}
        while queue:
            q, p = queue.popleft()
            if (q, p) in self.final or (q == sink and sink is not None):
                return True
            for e, p2 in self.moves[p]:
                if self.ready_at[e] > depth:
                    continue
                x = images.get(e)
                if x is None:
                    x = images[e] = Multiset.of(amap[y] for y in world.observation(e))
                nxt = (ctx.delta_o(q, x), p2)
                if nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)
        return False

    def run(self):
        if self.infeasible_reason:
            return None
        if self.doomed(()):
            return None
        n = len(self.order)
        heap = [(self.base + self.rest[0], (), ())]
        while heap:
            bound, key, assigned = heapq.heappop(heap)
            self.nodes += 1
            if len(assigned) == n:
                return bound, assigned
            k = len(assigned)
            for c, ti, t in self.options[k]:
                child = assigned + ((c, ti, t),)
                if self.doomed(child):
                    self.pruned += 1
                    continue
                acc = bound - self.rest[k] + c + self.rest[k + 1]
                heapq.heappush(heap, (acc, key + (ti,), child))
        return None


def solve(
    instance: DeceptionInstance,
    cross_check: bool = True,
    timing: bool = False,
) -> PlanResult:
    """Exact minimum-cost deceptive alteration, or an infeasibility verdict."""
    t0 = time.perf_counter()
    ctx = PlanningContext(instance)
    search = _Search(ctx)
    found = search.run()
    stats = {
        "nodes_expanded": search.nodes,
        "nodes_pruned": search.pruned,
        "branching_events": len(search.order),
    }
    if found is None:
        if timing:
            stats["seconds"] = round(time.perf_counter() - t0, 3)
        reason = search.infeasible_reason or (
            f"search tree exhausted after {search.nodes} nodes; every branch "
            f"forces an outside-accepting state on an accepting deviation walk"
        )
        return PlanResult("infeasible", certificate=reason, stats=stats)
    _, assigned = found
    mapping = dict(search.fixed)
    for y, (_, _, t) in zip(search.order, assigned):
        mapping[y] = t
    alteration = SensorAlteration(mapping, instance.events)
    value = total_cost(alteration, instance.cost)
    if cross_check:
        model = build_model(instance)
        report = check_assignment(model, assignment_from_alteration(instance, model, alteration))
        if not report.satisfied or report.divergence or report.objective != value:
            raise AssertionError(
                f"solver result fails the integer program: {report.violations[:3]}"
            )
        stats["model_checked"] = True
    if timing:
        stats["seconds"] = round(time.perf_counter() - t0, 3)
    return PlanResult("optimal", alteration, value, stats=stats)
