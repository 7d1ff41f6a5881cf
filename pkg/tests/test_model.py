"""Schedules, plan evaluation, and the shared numeric helpers."""

import math
import random
from fractions import Fraction

import pytest

from krobust.errors import MalformedSchedule, MissingResidual, TrivialInstance
from krobust.model import (
    CARDINALITY,
    SUBSET,
    Schedule,
    ScenarioSequence,
    ThriftyPlan,
    UncertaintySpec,
    argmin_stage,
    evaluate_thrifty,
    free_plan,
    guess_grid,
    harmonic,
    ln_upper,
    merge_stages,
    threshold_tau,
    trivial_plan,
    validate_schedule,
)

F = Fraction


def test_ln_upper_bounds_log():
    assert ln_upper(1) == 0
    for n in (2, 3, 7, 100, 10**6):
        approx = ln_upper(n)
        assert float(approx) > math.log(n)
        assert float(approx) - math.log(n) < 1e-5


def test_harmonic_exact():
    assert harmonic(1) == 1
    assert harmonic(4) == F(25, 12)
    assert harmonic(0) == 0


def test_schedule_of_coerces():
    s = Schedule.of([3, 2, 1], ["1", "3/2", 4])
    assert s.horizon == 2
    assert s.k == (3, 2, 1)
    assert s.lam == (F(1), F(3, 2), F(4))
    validate_schedule(s, 3)


@pytest.mark.parametrize("horizon,k,lam,ground,msg", [
    (1, (3, 2), (F(1),), 3, "inflations must have"),
    (1, (3,), (F(1), F(2)), 3, "cardinalities must have"),
    (1, (3, -1), (F(1), F(2)), 3, "negative"),
    (1, (3, 2), (F(2), F(2)), 3, "lam[0] must be 1"),
    (1, (3, 2), (F(1), F(0)), 3, "not positive"),
    (1, (3, 2), (F(1), F(1, 2)), 3, "nondecreasing"),
    (1, (2, 3), (F(1), F(2)), 2, "nonincreasing"),
    (1, (3, 2), (F(1), F(2)), 4, "ground-set size"),
])
def test_validate_schedule_rejects(horizon, k, lam, ground, msg):
    sched = Schedule(horizon, k, lam)
    with pytest.raises(MalformedSchedule) as exc:
        validate_schedule(sched, ground)
    assert msg in str(exc.value)


def test_argmin_stage_breaks_ties_low():
    # lam*k is (4, 4, 6): the tie between days 0 and 1 goes to day 0.
    s = Schedule.of([4, 2, 1], [1, 2, 6])
    assert argmin_stage(s) == 0
    # (6, 4, 3): unique minimum on the last day.
    assert argmin_stage(Schedule.of([6, 2, 1], [1, 2, 3])) == 2


def test_argmin_stage_trivial():
    with pytest.raises(TrivialInstance):
        argmin_stage(Schedule.of([2, 0], [1, 2]))


def test_threshold_tau_hand_value():
    s = Schedule.of([2, 1], [1, 2])
    # max(2/(1*2), 2/(2*1)) = 1, scaled by beta.
    assert threshold_tau(F(2), s, F(3)) == 3
    with pytest.raises(TrivialInstance):
        threshold_tau(F(2), Schedule.of([2, 0], [1, 2]), F(3))


def test_merge_stages_keeps_growth_days():
    s = Schedule.of([5, 4, 3, 2], [1, F(3, 2), 2, 5])
    merged, day_map = merge_stages(s, 2)
    assert merged.lam == (F(1), F(2), F(5))
    assert merged.k == (5, 3, 2)
    assert day_map == (0, 0, 2, 3)
    # Ratio 1 keeps every day verbatim.
    same, ident = merge_stages(s, 1)
    assert same == s and ident == (0, 1, 2, 3)
    with pytest.raises(ValueError):
        merge_stages(s, F(1, 2))


def test_uncertainty_validation():
    s = Schedule.of([3, 1], [1, 2])
    UncertaintySpec().validate(s, (1, 2, 3))
    with pytest.raises(MalformedSchedule):
        UncertaintySpec(CARDINALITY, (frozenset({1}),)).validate(s, (1, 2, 3))
    with pytest.raises(MalformedSchedule):
        UncertaintySpec("fuzzy").validate(s, (1, 2, 3))
    with pytest.raises(MalformedSchedule):
        UncertaintySpec(SUBSET, ()).validate(s, (1, 2, 3))
    with pytest.raises(MalformedSchedule):
        UncertaintySpec(SUBSET, (frozenset({7}),)).validate(s, (1, 2, 3))
    UncertaintySpec(SUBSET, (frozenset({2}),)).validate(s, (1, 2, 3))


def test_scenario_actives_intersect():
    seq = ScenarioSequence((frozenset({1, 2}), frozenset({2, 3})))
    assert seq.actives((1, 2, 3)) == (
        frozenset({1, 2, 3}), frozenset({1, 2}), frozenset({2}))


def test_scenario_validate():
    s = Schedule.of([3, 2, 1], [1, 2, 3])
    seq = ScenarioSequence((frozenset({1, 2}), frozenset({2})))
    seq.validate(s, UncertaintySpec())
    with pytest.raises(MalformedSchedule):
        ScenarioSequence((frozenset({1}),)).validate(s, UncertaintySpec())
    with pytest.raises(MalformedSchedule):
        ScenarioSequence((frozenset({1}), frozenset({2}))).validate(
            s, UncertaintySpec())
    sub = UncertaintySpec(SUBSET, (frozenset({1, 2}), frozenset({3})))
    seq.validate(s, sub)
    with pytest.raises(MalformedSchedule):
        ScenarioSequence((frozenset({1, 2, 3}), frozenset({3, 1}))).validate(
            Schedule.of([3, 1, 1], [1, 2, 3]), sub)


def _plan(residuals, critical_day, conservative=False, day0_cost=F(0)):
    return ThriftyPlan(guess=F(1), beta=F(1), tau=F(1),
                       critical_day=critical_day, net=frozenset(),
                       day0_purchase=(), day0_cost=day0_cost,
                       residuals=residuals,
                       residual_actions={u: () for u in residuals},
                       conservative=conservative)


def test_evaluate_thrifty_top_k_witness():
    s = Schedule.of([3, 2, 1], [1, 2, 3])
    plan = _plan({1: F(5), 2: F(3), 3: F(3)}, critical_day=1, day0_cost=F(1))
    report = evaluate_thrifty(plan, s, units=(1, 2, 3))
    # Top two residuals are 5 and 3; the id-2 copy of the tie wins.
    assert report.worst_day_cost == 2 * (5 + 3)
    assert report.robcov == 17
    assert report.witness == (1, 2)
    assert not report.conservative


def test_evaluate_thrifty_drops_zero_witnesses():
    s = Schedule.of([2, 2], [1, 2])
    report = evaluate_thrifty(_plan({1: F(4), 2: F(0)}, 1), s)
    assert report.witness == (1,)
    assert report.worst_day_cost == 8


def test_evaluate_thrifty_missing_residual():
    s = Schedule.of([2, 1], [1, 2])
    with pytest.raises(MissingResidual):
        evaluate_thrifty(_plan({1: F(1)}, 1), s, units=(1, 2))


def test_trivial_and_free_plans():
    t = trivial_plan((1, 2))
    assert t.day0_cost == 0 and t.residuals[2] == 0
    f = free_plan((0, 1, 2), (4, 5), critical_day=1)
    assert f.day0_purchase == (4, 5)
    assert f.net == frozenset({0, 1, 2})
    g = free_plan((0, 1), (), critical_day=0, net=(1,))
    assert g.net == frozenset({1})


def test_guess_grid_doubles_and_caps():
    assert guess_grid(F(1), F(10)) == [1, 2, 4, 8, 10]
    assert guess_grid(F(3), F(3)) == [3]
    with pytest.raises(ValueError):
        guess_grid(F(0), F(1))


def test_guess_grid_always_hits_endpoints():
    rng = random.Random(7)
    for _ in range(50):
        lb = F(rng.randint(1, 50), rng.randint(1, 9))
        ub = lb + F(rng.randint(0, 400), rng.randint(1, 5))
        grid = guess_grid(lb, ub)
        assert grid[0] == lb and grid[-1] == ub
        assert all(b <= 2 * a for a, b in zip(grid, grid[1:]))
