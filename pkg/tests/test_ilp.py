import itertools
import random
from fractions import Fraction

import pytest

from deceptiplan.alteration import INF, Multiset, total_cost
from deceptiplan.builtins import builtin_instance
from deceptiplan.ilp import (
    LpFormatError,
    assignment_from_alteration,
    build_model,
    check_assignment,
    choose_big_m,
    export_lp,
    model_stats,
    parse_lp,
    solve,
)
from deceptiplan.verifier import brute_force_plan, is_deceptive
from helpers import expected_census, highs_solve, random_alteration, random_instance


def all_alterations(inst):
    ev = inst.events
    for targets in itertools.product(ev, repeat=len(ev)):
        yield dict(zip(ev, targets))


@pytest.mark.parametrize("name", ["department-row3", "department-row5", "green-vault", "fig4-multicut"])
def test_census_matches_closed_form(name):
    inst = builtin_instance(name)
    stats = model_stats(build_model(inst))
    want = expected_census(inst)
    for key in ("variables", "constraints", "binary"):
        assert stats[key] == want[key], key


@pytest.mark.parametrize("name", ["department-row4", "green-vault", "fig4-multicut"])
def test_lp_round_trip(name):
    model = build_model(builtin_instance(name))
    text = export_lp(model)
    back = parse_lp(text)
    assert back.same_as(model)
    # the parser orders variables by name, so compare the second round trip
    again = export_lp(back)
    assert export_lp(parse_lp(again)) == again


def test_lp_fractional_costs_round_trip():
    model = build_model(builtin_instance("green-vault"))
    assert Fraction(1, 2) in model.objective.values()
    assert "0.5 u_" in export_lp(model)
    assert parse_lp(export_lp(model)).same_as(model)


def test_lp_parse_errors():
    with pytest.raises(LpFormatError, match="no relation"):
        parse_lp("Minimize\n obj: x\nSubject To\n c1: x + y\nEnd\n")
    with pytest.raises(LpFormatError, match="bound"):
        parse_lp("Minimize\n obj: x\nSubject To\n c1: x >= 1\nBounds\n x ~ 3\nEnd\n")


def test_canonical_assignment_feasible_iff_deceptive():
    # the linear program projected onto u accepts exactly the deceptive alterations
    for seed in range(700, 706):
        inst = random_instance(seed)
        model = build_model(inst)
        for alt in all_alterations(inst):
            if total_cost(alt, inst.cost) == INF:
                continue
            report = check_assignment(model, assignment_from_alteration(inst, model, alt))
            assert report.satisfied == is_deceptive(inst, alt).deceptive, (seed, alt)
            assert not report.divergence
            assert report.objective == total_cost(alt, inst.cost)


def test_perturbed_assignments_never_diverge():
    rng = random.Random(11)
    for seed in range(720, 740):
        inst = random_instance(seed)
        model = build_model(inst)
        binaries = [v.name for v in model.variables.values() if v.binary and v.upper == 1]
        for _ in range(5):
            values = assignment_from_alteration(inst, model, random_alteration(rng, inst.events))
            for name in rng.sample(binaries, min(3, len(binaries))):
                values[name] = 1 - values[name]
            assert not check_assignment(model, values).divergence


def test_undersized_big_m_is_detected():
    inst = builtin_instance("department-row3")
    model = build_model(inst, big_m=(0, 0))
    alt = {y: y for y in inst.events} | {"b3": "b4", "o1+": "o3+"}
    report = check_assignment(model, assignment_from_alteration(inst, model, alt))
    assert report.divergence
    assert any(d.startswith("bigm_") for d in report.divergences)
    assert report.logical_satisfied and not report.linearized_satisfied


def test_big_m_derivation():
    inst = builtin_instance("department-row3")
    assert choose_big_m(inst) == (2, 4)
    assert build_model(inst).metadata["M"] == 2


def test_ten_times_big_m_keeps_feasible_set():
    for seed in range(740, 744):
        inst = random_instance(seed)
        m, mp = choose_big_m(inst)
        small, big = build_model(inst), build_model(inst, big_m=(10 * m, 10 * mp))
        for alt in all_alterations(inst):
            if total_cost(alt, inst.cost) == INF:
                continue
            a = check_assignment(small, assignment_from_alteration(inst, small, alt)).satisfied
            b = check_assignment(big, assignment_from_alteration(inst, big, alt)).satisfied
            assert a == b


def test_check_reports_violations_and_bounds():
    inst = builtin_instance("department-row3")
    model = build_model(inst)
    values = assignment_from_alteration(inst, model, {y: y for y in inst.events})
    report = check_assignment(model, values)
    assert not report.satisfied
    assert any(name.startswith("deceptive_") for name, *_ in report.violations)
    values["u_0_0"] = Fraction(1, 2)
    names = [name for name, *_ in check_assignment(model, values).violations]
    assert "u_0_0" in names
    with pytest.raises(KeyError):
        check_assignment(model, {})


def test_solver_stats_and_cross_check():
    result = solve(builtin_instance("department-row3"), timing=True)
    assert result.cost == 2 and result.stats["model_checked"]
    assert result.stats["seconds"] >= 0
    assert "seconds" not in solve(builtin_instance("department-row3")).stats


def test_solver_ties_are_deterministic():
    inst = builtin_instance("department-row3")
    assert solve(inst).alteration == solve(inst).alteration


def test_solver_matches_brute_force_small():
    for seed in range(760, 790):
        inst = random_instance(seed)
        a, b = solve(inst), brute_force_plan(inst)
        assert (a.status, a.cost) == (b.status, b.cost), seed


@pytest.mark.parametrize("name", ["department-row3", "department-row5", "fig4-multicut"])
def test_highs_agrees_on_exported_model(name):
    inst = builtin_instance(name)
    got = highs_solve(build_model(inst))
    if got is None:
        pytest.skip("highspy not installed")
    ours = solve(inst)
    if ours.feasible:
        assert got[0] == "optimal" and Fraction(got[1]).limit_denominator(100) == ours.cost
    else:
        assert got[0] == "infeasible"


def test_highs_agrees_on_random_instances():
    if highs_solve(build_model(random_instance(0))) is None:
        pytest.skip("highspy not installed")
    for seed in range(800, 815):
        inst = random_instance(seed)
        got, ours = highs_solve(build_model(inst)), solve(inst)
        if ours.feasible:
            assert got[0] == "optimal", seed
            assert Fraction(got[1]).limit_denominator(100) == ours.cost, seed
        else:
            assert got[0] == "infeasible", seed


def test_single_edge_single_event_model():
    from deceptiplan.formats import instance_from_dict

    inst = instance_from_dict({
        "world": {"vertices": ["A"], "initial": "A", "sensors": {"s": ["y"]},
                  "edges": [{"id": "e", "src": "A", "tgt": "A", "observation": ["y"]}]},
        "itinerary": {"regex": "e*"},
        "deviation": {"regex": "e"},
    })
    model = build_model(inst)
    assert [c.name for c in model.constraints if c.tag == "mapping"] == ["mapping_0"]
    result = solve(inst)
    assert result.cost == 0
    values = assignment_from_alteration(inst, model, result.alteration)
    assert values["u_0_0"] == 1 and check_assignment(model, values).satisfied


def test_flipping_an_a_variable_breaks_the_step_family():
    inst = builtin_instance("department-row3")
    model = build_model(inst)
    alt = {y: y for y in inst.events} | {"b3": "b4", "o1+": "o3+"}
    values = assignment_from_alteration(inst, model, alt)
    ctx = model.context
    start = ctx.a_name(ctx.O.initial, ctx.M.initial)
    # switch off a pair reached in one step from the start
    e, p = ctx.moves[ctx.M.initial][0]
    image = Multiset.of(alt[y] for y in ctx.world.observation(e))
    q = ctx.delta_o(ctx.O.initial, image)
    assert values[start] == 1 and values[ctx.a_name(q, p)] == 1
    values[ctx.a_name(q, p)] = 0
    report = check_assignment(model, values)
    assert any(name.startswith("step_") for name, *_ in report.violations)
    assert not report.divergence


def test_row1_identity_leaves_final_pairs_off():
    inst = builtin_instance("department-row1")
    model = build_model(inst)
    values = assignment_from_alteration(inst, model, {y: y for y in inst.events})
    ctx = model.context
    for q in ctx.O.accepting:
        for p in ctx.M.accepting:
            assert values[ctx.a_name(q, p)] == 0


def test_row5_sampled_alterations_reach_a_final_pair():
    rng = random.Random(5)
    inst = builtin_instance("department-row5")
    model = build_model(inst)
    ctx = model.context
    finals = [ctx.a_name(q, p) for q in ctx.O.accepting for p in ctx.M.accepting]
    for _ in range(200):
        values = assignment_from_alteration(inst, model, random_alteration(rng, inst.events))
        assert any(values[f] == 1 for f in finals)
