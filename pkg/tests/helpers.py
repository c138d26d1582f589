"""Seeded random instances shared by the test modules."""

from __future__ import annotations

import random

from deceptiplan.formats import gen_random, instance_from_dict

COSTS = ("1/2", 1, 1, 2, 3, "inf")


def random_doc(seed: int, small: bool = True) -> dict:
    """A certifying random instance with |Y| <= 4, |E| <= 6 and |V| <= 5.

    Three seeds in four use languages built from random walks, the rest
    random DFAs; a third of the instances get random cost overrides.
    """
    rng = random.Random(seed)
    walks = seed % 4 != 3
    doc = gen_random(
        n_vertices=rng.randint(2, 5),
        n_edges=rng.randint(4, 6),
        n_events=rng.randint(3, 4) if small else rng.randint(4, 5),
        m=rng.choice((1, 2, 2)),
        seed=seed,
        language="walks" if walks else "dfa",
        itinerary_walks=rng.randint(4, 6),
        deviation_walks=rng.randint(1, 2),
        max_walk=rng.randint(2, 4),
        dfa_states=rng.randint(2, 3),
        itinerary_density=rng.choice((0.3, 0.5, 0.7)),
        deviation_density=rng.choice((0.3, 0.5)),
    )
    if rng.random() < 1 / 3:
        events = sorted({y for evs in doc["world"]["sensors"].values() for y in evs})
        for a in events:
            for b in events:
                if a != b and rng.random() < 0.4:
                    doc["cost"]["overrides"].append([a, b, rng.choice(COSTS)])
    return doc


def random_instance(seed: int, small: bool = True):
    return instance_from_dict(random_doc(seed, small))


def random_alteration(rng: random.Random, events) -> dict:
    """Identity on roughly half the events, a random image elsewhere."""
    events = list(events)
    return {y: (y if rng.random() < 0.5 else rng.choice(events)) for y in events}


def expected_census(inst) -> dict:
    """Closed-form variable and constraint counts, computed from the instance alone."""
    out = inst.outside
    dev = inst.deviation_product
    y = len(inst.events)
    z = len(inst.realizable)
    e = len(inst.world.edges)
    supp = sum(len(x.support()) for x in inst.realizable)
    qo = len(out.dfa.states)
    qm = len(dev.states)
    moves = sum(len(dev.out(p)) for p in dev.states)
    finals = len(out.dfa.accepting) * len(dev.accepting)
    forbidden = len(inst.cost.infinite_pairs())
    return {
        "variables": {"a": qo * qm, "u": y * y, "n": y * z, "b": e * supp, "c": e * y, "l": z * e},
        "constraints": {
            "init": 1, "mapping": y, "forbidden": forbidden, "deceptive": finals,
            "bigmup": e * supp, "bigmlo": e * supp, "cdef": e * y,
            "ldefup": z * e, "ldeflo": z * e,
            "step": qo * moves * z, "sink": qo * moves if out.sink is not None else 0,
        },
        "binary": {"a": qo * qm, "u": y * y, "b": e * supp, "l": z * e},
    }


def highs_solve(model):
    """Solve an exported model with HiGHS; returns (status, objective) or None without highspy."""
    try:
        import highspy
    except ImportError:
        return None
    import os
    import tempfile

    from deceptiplan.ilp import export_lp

    with tempfile.NamedTemporaryFile("w", suffix=".lp", delete=False) as fh:
        fh.write(export_lp(model))
        path = fh.name
    try:
        h = highspy.Highs()
        h.setOptionValue("output_flag", False)
        if h.readModel(path) != highspy.HighsStatus.kOk:
            raise AssertionError("HiGHS could not read the exported model")
        h.run()
        status = h.modelStatusToString(h.getModelStatus())
        if status == "Optimal":
            return "optimal", h.getInfo().objective_function_value
        return status.lower(), None
    finally:
        os.unlink(path)
