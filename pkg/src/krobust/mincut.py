"""Thrifty solver for multistage robust minimum cut.

Units are the non-root vertices; buying an edge means cutting it.  Day 0
separates a net of hard-to-cut vertices from the root, and on the critical
day each still-active vertex buys its own minimum cut in what is left of the
graph.  Residual cuts of different vertices may share edges, so evaluated
worst cases are upper bounds (plans are always marked conservative).
"""

from __future__ import annotations

from dataclasses import replace
from fractions import Fraction

from .errors import Infeasible
from .graphcore import (WeightedGraph, delete_or_contract, min_cut,
                        preprocess_cost_scaling)
from .model import (MINCUT, CostReport, Schedule, ThriftyPlan, argmin_stage,
                    evaluate_thrifty, free_plan, guess_grid, threshold_tau,
                    trivial_plan, validate_schedule)

BETA = Fraction(50)


def _require_root(g: WeightedGraph) -> int:
    if g.root is None:
        raise ValueError("min-cut instance needs a root vertex")
    return g.root


def units_of(g: WeightedGraph) -> tuple[int, ...]:
    root = _require_root(g)
    return tuple(v for v in range(g.n) if v != root)


def build_net(g: WeightedGraph, root: int, threshold: Fraction) -> frozenset[int]:
    """Non-root vertices whose min cut from the root strictly exceeds the
    threshold (the solvers pass 2*T*tau)."""
    return frozenset(v for v in range(g.n) if v != root
                     and min_cut(g, root, [v])[0] > threshold)


def thrifty_plan(g: WeightedGraph, schedule: Schedule, guess: Fraction,
                 beta: Fraction | None = None) -> ThriftyPlan:
    """Build the two-day plan for one guess of the optimal value."""
    root = _require_root(g)
    if beta is None:
        beta = BETA
    tau = threshold_tau(guess, schedule, beta)
    net = build_net(g, root, 2 * schedule.horizon * tau)
    day0_cost, day0 = min_cut(g, root, net)
    rest = delete_or_contract(g, day0.ids, "delete")
    residuals = {}
    actions = {}
    for v in units_of(g):
        value, cut = min_cut(rest, root, [v])
        residuals[v] = value
        actions[v] = tuple(sorted(cut.ids))
    return ThriftyPlan(guess=Fraction(guess), beta=Fraction(beta), tau=tau,
                       critical_day=argmin_stage(schedule), net=net,
                       day0_purchase=tuple(sorted(day0.ids)),
                       day0_cost=day0_cost, residuals=residuals,
                       residual_actions=actions, conservative=True)


def _preprocessed_candidates(g: WeightedGraph, schedule: Schedule,
                             f_guess: int, beta: Fraction, merge_r):
    """All grid plans for one guess of the costliest edge ever bought.

    Plans are phrased in original terms: prepaid cheap edges join the day-0
    purchase, residuals of a merged-away vertex are those of its surviving
    representative, and the critical day is mapped back to the original
    schedule.  Raises Infeasible when the guess contracts a unit into the
    root, meaning every cut for it would need a costlier edge.
    """
    pre = preprocess_cost_scaling(g, schedule, MINCUT, f_guess, merge_r)
    pg, ps = pre.graph, pre.schedule
    root = pg.representative(_require_root(g))
    units = units_of(g)
    reps = {}
    for v in units:
        rv = pg.representative(v)
        if rv == root:
            raise Infeasible(f"vertex {v} is only separable by costlier edges")
        reps[v] = rv
    rep_set = sorted(set(reps.values()))
    base_cuts = {r: min_cut(pg, root, [r])[0] for r in rep_set}
    lb = max(base_cuts.values())
    ub_cost, ub_set = min_cut(pg, root, rep_set)
    out = []
    if ub_cost == 0:
        plan = free_plan(units, sorted(pre.prepaid.ids | ub_set.ids),
                         pre.kept_days[argmin_stage(ps)])
        return [replace(plan, preprocess_f=f_guess)]
    for guess in guess_grid(lb, ub_cost):
        tau = threshold_tau(guess, ps, beta)
        net_reps = frozenset(r for r in rep_set
                             if base_cuts[r] > 2 * ps.horizon * tau)
        day0_cost, day0 = min_cut(pg, root, net_reps)
        rest = delete_or_contract(pg, day0.ids, "delete")
        rep_res = {r: min_cut(rest, root, [r]) for r in rep_set}
        residuals = {v: rep_res[reps[v]][0] for v in units}
        actions = {v: tuple(sorted(rep_res[reps[v]][1].ids)) for v in units}
        out.append(ThriftyPlan(
            guess=Fraction(guess), beta=Fraction(beta), tau=tau,
            critical_day=pre.kept_days[argmin_stage(ps)],
            net=frozenset(v for v in units if reps[v] in net_reps),
            day0_purchase=tuple(sorted(pre.prepaid.ids | day0.ids)),
            day0_cost=pre.prepaid.cost + day0_cost,
            residuals=residuals, residual_actions=actions,
            conservative=True, preprocess_f=f_guess))
    return out


def solve(g: WeightedGraph, schedule: Schedule, beta: Fraction | None = None,
          preprocess: bool = False, merge_r=2) -> tuple[ThriftyPlan, CostReport]:
    """Best evaluated plan over the doubling guess grid.

    With preprocess=True the grid is additionally run once per guess of the
    costliest edge, after cost scaling; guesses that cannot stay feasible are
    skipped (the costliest edge of the graph always can).
    """
    root = _require_root(g)
    units = units_of(g)
    validate_schedule(schedule, len(units))
    if beta is None:
        beta = BETA
    if schedule.k[schedule.horizon] == 0:
        plan = trivial_plan(units)
        return plan, evaluate_thrifty(plan, schedule, units)
    ub_cost, ub_set = min_cut(g, root, units)
    if ub_cost == 0:
        plan = free_plan(units, sorted(ub_set.ids), argmin_stage(schedule))
        return plan, evaluate_thrifty(plan, schedule, units)
    candidates = []
    if preprocess:
        seen_costs = set()
        for e in sorted(g.edges, key=lambda e: (e.cost, e.eid)):
            if e.cost in seen_costs:
                continue
            seen_costs.add(e.cost)
            try:
                candidates.extend(
                    _preprocessed_candidates(g, schedule, e.eid, beta, merge_r))
            except Infeasible:
                continue
    else:
        lb = max(min_cut(g, root, [v])[0] for v in units)
        for guess in guess_grid(lb, ub_cost):
            candidates.append(thrifty_plan(g, schedule, guess, beta))
    best: tuple[ThriftyPlan, CostReport] | None = None
    for plan in candidates:
        report = evaluate_thrifty(plan, schedule, units)
        if best is None or report.robcov < best[1].robcov:
            best = (plan, report)
    if best is None:
        raise Infeasible("no feasible plan under any cost guess")
    return best
