"""Set system construction, greedy cover, and the thrifty set cover solver."""

from fractions import Fraction

import pytest

from krobust.errors import Infeasible
from krobust.fixtures import gen_lowerbound_allstages, gen_random
from krobust.model import SETCOVER, Schedule, evaluate_thrifty, guess_grid
from krobust.setcover import SetSystem, build_net, greedy_cover, solve, thrifty_plan

F = Fraction


def _system(*sets, universe=None):
    size = universe if universe is not None else max(e for m, _ in sets for e in m)
    return SetSystem.build(size, sets)


def test_build_tracks_cheapest_set():
    sys_ = _system(({1, 2}, 2), ({2}, F(1, 2)), ({1}, 2))
    assert sys_.minset_cost == {1: 2, 2: F(1, 2)}
    # the tie between sets 0 and 2 for element 1 goes to the smaller id
    assert sys_.minset_id == {1: 0, 2: 1}
    assert sys_.elements() == (1, 2)
    assert sys_.covered_by([1, 2]) == frozenset({1, 2})


@pytest.mark.parametrize("sets,universe,msg", [
    ((({1}, -1),), 1, "negative cost"),
    ((({0}, 1),), 1, "unknown element"),
    ((({2}, 1),), 1, "unknown element"),
    ((({1}, 1),), 2, "not covered"),
])
def test_build_rejects(sets, universe, msg):
    with pytest.raises(Infeasible, match=msg):
        SetSystem.build(universe, sets)


def test_greedy_prefers_free_then_ratio():
    sys_ = _system(({1, 2}, 2), ({2, 3}, 2), ({3}, 0), ({1, 2, 3}, 5))
    chosen, total = greedy_cover(sys_, (1, 2, 3))
    assert chosen == [2, 0]
    assert total == 2


def test_greedy_tie_smallest_id():
    sys_ = _system(({1}, 1), ({1}, 1))
    chosen, total = greedy_cover(sys_, (1,))
    assert chosen == [0] and total == 1


def test_greedy_rejects_uncoverable_target():
    sys_ = _system(({1}, 1))
    with pytest.raises(Infeasible):
        greedy_cover(sys_, (9,))


def test_build_net_threshold_inclusive():
    sys_ = _system(({1}, 1), ({2}, 2))
    assert build_net(sys_, F(2)) == frozenset({2})
    assert build_net(sys_, F(1)) == frozenset({1, 2})
    assert build_net(sys_, F(3)) == frozenset()


def test_thrifty_plan_shared_minset_is_conservative():
    sys_ = _system(({1, 2}, 3), ({1}, 5))
    sched = Schedule.of([2, 1], [1, 2])
    plan = thrifty_plan(sys_, sched, F(3))
    assert plan.conservative
    assert plan.residual_actions == {1: (0,), 2: (0,)}
    report = evaluate_thrifty(plan, sched, sys_.elements())
    # both elements charge set 0 separately, so this is only an upper bound
    assert report.robcov == 6


def test_solve_multi_inflation_instance():
    inst = gen_lowerbound_allstages(2, F(2, 5))
    assert inst.kind == SETCOVER
    plan, report = solve(inst.payload, inst.schedule)
    assert report.robcov == F(343, 125)
    assert plan.guess == F(7, 5)
    assert plan.critical_day == 2
    assert plan.day0_purchase == () and plan.day0_cost == 0
    assert plan.net == frozenset()
    assert plan.tau == F(1559583, 43750)
    assert not plan.conservative
    assert report.witness == (1,)


def test_solve_trivial_when_nothing_survives():
    sys_ = _system(({1}, 1), ({2}, 1))
    plan, report = solve(sys_, Schedule.of([2, 0], [1, 2]))
    assert report.robcov == 0 and plan.day0_purchase == ()


def test_solve_free_cover_buys_day0():
    sys_ = _system(({1, 2}, 0))
    plan, report = solve(sys_, Schedule.of([2, 1], [1, 3]))
    assert report.robcov == 0
    assert plan.day0_purchase == (0,)


def test_solve_picks_best_grid_guess():
    for seed in range(8):
        inst = gen_random(SETCOVER, 4, 6, 2, seed)
        sys_, sched = inst.payload, inst.schedule
        plan, report = solve(sys_, sched)
        lb = max(sys_.minset_cost[e] for e in sys_.elements())
        _, ub = greedy_cover(sys_, sys_.elements())
        evals = [evaluate_thrifty(thrifty_plan(sys_, sched, g), sched).robcov
                 for g in guess_grid(lb, ub)]
        assert report.robcov == min(evals)
        assert plan.guess in guess_grid(lb, ub)


def test_plan_invariants_on_random_batch(solved_batches):
    for inst, plan, report in solved_batches[SETCOVER]:
        sys_ = inst.payload
        covered = sys_.covered_by(plan.day0_purchase)
        assert plan.net <= covered
        for e in sys_.elements():
            acts = plan.residual_actions[e]
            assert plan.residuals[e] == sum(
                (sys_.sets[s][1] for s in acts), F(0))
            if e in covered:
                assert acts == () and plan.residuals[e] == 0
        assert report.robcov == plan.day0_cost + report.worst_day_cost
