"""Thrifty solvers for multistage robust Steiner tree and Steiner forest.

Both act on day 0 and on the critical day j* = argmin lam[j]*k[j].  The tree
solver connects a maximal distance-packing net up front; each still-active
vertex later buys a shortest path to the net in the graph with day-0 edges
zeroed.  The forest solver builds a near-maximal net of pairs with witness
balls plus a day-0 edge set that brings every pair within a bounded zeroed
distance; active pairs later buy their own shortest connecting path.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import Disconnected, TrivialInstance
from .graphcore import (EdgeSet, Pair, PreprocessResult, UnionFind,
                        WeightedGraph, gw_steiner_forest, mst_steiner_tree,
                        path_edges, preprocess_cost_scaling, shortest_paths,
                        zero_edges)
from .model import (STEINERFOREST, STEINERTREE, CostReport, Schedule,
                    ThriftyPlan, argmin_stage, evaluate_thrifty, free_plan,
                    guess_grid, threshold_tau, trivial_plan,
                    validate_schedule)

BETA = Fraction(10)


def _pairs_of(g: WeightedGraph, pairs) -> tuple[Pair, ...]:
    if pairs is None:
        return g.pairs
    out = []
    for i, p in enumerate(pairs):
        if isinstance(p, Pair):
            out.append(p)
        else:
            out.append(Pair(int(p[0]), int(p[1]), int(p[2]) if len(p) > 2 else i + 1))
    return tuple(out)


def ball_packing_net(g: WeightedGraph, radius: Fraction) -> frozenset[int]:
    """Greedy maximal vertex set with pairwise distance strictly above radius.

    Vertices are scanned in increasing id; unreachable counts as infinitely
    far.  Every excluded vertex ends up within radius of some member, and the
    result is nonempty on any nonempty graph.
    """
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    chosen: list[int] = []
    for v in range(g.n):
        dv, _ = shortest_paths(g, [v])
        if all(u not in dv or dv[u] > radius for u in chosen):
            chosen.append(v)
    return frozenset(chosen)


def thrifty_tree_plan(g: WeightedGraph, schedule: Schedule, guess: Fraction,
                      beta: Fraction | None = None) -> ThriftyPlan:
    """Two-day Steiner tree plan for one guess of the optimal value."""
    if schedule.k[schedule.horizon] <= 1:
        raise TrivialInstance(
            "a lone surviving vertex needs no connection; optimal value is 0")
    if beta is None:
        beta = BETA
    tau = threshold_tau(guess, schedule, beta)
    radius = 4 * schedule.horizon * tau
    net = ball_packing_net(g, radius)
    day0 = mst_steiner_tree(g, net)
    zeroed = zero_edges(g, day0.ids)
    dist, pred = shortest_paths(zeroed, net)
    residuals = {}
    actions = {}
    for v in range(g.n):
        if v not in dist:
            raise Disconnected(f"vertex {v} cannot reach the net")
        residuals[v] = dist[v]
        path = path_edges(pred, set(net), v)
        actions[v] = tuple(sorted(set(path) - day0.ids))
        assert dist[v] <= radius, "net maximality bounds every residual"
    return ThriftyPlan(guess=Fraction(guess), beta=Fraction(beta), tau=tau,
                       critical_day=argmin_stage(schedule), net=net,
                       day0_purchase=tuple(sorted(day0.ids)),
                       day0_cost=day0.cost, residuals=residuals,
                       residual_actions=actions, conservative=True)


@dataclass(frozen=True)
class SfnetResult:
    """Outcome of the near-maximal net construction for Steiner forest.

    sr is the set of pairs identified during the loop and split into sb/so/sg
    by how many of their endpoints became witnesses (0/1/2); sf_links are the
    (terminal, witness) attachments of endpoints that were close to an
    existing witness; e_alg is the day-0 edge set (an approximate forest on
    sr plus shortest paths realizing the links); the net is sg ∪ so.
    """

    gamma: Fraction
    net: frozenset[int]
    sr: frozenset[int]
    sg: frozenset[int]
    so: frozenset[int]
    sb: frozenset[int]
    sf_links: tuple[tuple[int, int], ...]
    witnesses: frozenset[int]
    e_alg: EdgeSet


def _quotient_dist(g: WeightedGraph, uf: UnionFind, s: int, t: int):
    """Distance from s to t in g with identified vertices merged; None if
    unreachable."""
    src, dst = uf.find(s), uf.find(t)
    if src == dst:
        return Fraction(0)
    dist = {src: Fraction(0)}
    heap = [(Fraction(0), src)]
    adj = g.adjacency()
    members: dict[int, list[int]] = {}
    for v in range(g.n):
        members.setdefault(uf.find(v), []).append(v)
    done = set()
    while heap:
        d, r = heapq.heappop(heap)
        if r in done:
            continue
        done.add(r)
        if r == dst:
            return d
        for v in members.get(r, ()):
            for e in adj[v]:
                w = e.v if e.u == v else e.u
                rw = uf.find(w)
                nd = d + e.cost
                if rw not in dist or nd < dist[rw]:
                    dist[rw] = nd
                    heapq.heappush(heap, (nd, rw))
    return None


def sfnet_build(g: WeightedGraph, pairs, gamma: Fraction) -> SfnetResult:
    """Build the near-maximal net: repeatedly take the smallest-id pair whose
    endpoint distance, with previously taken pairs and links identified,
    still exceeds 4*gamma; record its endpoints as witnesses unless they sit
    within 2*gamma of an existing witness, in which case they attach to it
    as a link."""
    gamma = Fraction(gamma)
    if gamma < 0:
        raise ValueError("gamma must be nonnegative")
    plist = _pairs_of(g, pairs)
    uf = UnionFind(g.n)
    sr: set[int] = set()
    sg: set[int] = set()
    so: set[int] = set()
    sb: set[int] = set()
    links: list[tuple[int, int]] = []
    witnesses: list[int] = []
    while True:
        pick = None
        for p in sorted(plist, key=lambda p: p.pid):
            if p.pid in sr:
                continue
            d = _quotient_dist(g, uf, p.s, p.t)
            if d is None or d > 4 * gamma:
                pick = p
                break
        if pick is None:
            break
        sr.add(pick.pid)
        uf.union(pick.s, pick.t)
        delta = 0
        for x in (pick.s, pick.t):
            dx, _ = shortest_paths(g, [x])
            near = [w for w in witnesses if w in dx and dx[w] < 2 * gamma]
            if near:
                w = min(near)
                links.append((x, w))
                uf.union(x, w)
            else:
                witnesses.append(x)
                delta += 1
        {0: sb, 1: so, 2: sg}[delta].add(pick.pid)
    ids = set(gw_steiner_forest(g, [p for p in plist if p.pid in sr]).ids)
    for x, w in links:
        dx, pred = shortest_paths(g, [x])
        ids.update(path_edges(pred, {x}, w))
    net = frozenset(sg | so)
    assert len(sb) <= len(net) and len(links) <= 2 * len(net)
    return SfnetResult(gamma=gamma, net=net, sr=frozenset(sr),
                       sg=frozenset(sg), so=frozenset(so), sb=frozenset(sb),
                       sf_links=tuple(links),
                       witnesses=frozenset(witnesses), e_alg=g.edge_set(ids))


def thrifty_forest_plan(g: WeightedGraph, pairs, schedule: Schedule,
                        guess: Fraction,
                        beta: Fraction | None = None) -> ThriftyPlan:
    """Two-day Steiner forest plan for one guess of the optimal value."""
    plist = _pairs_of(g, pairs)
    if beta is None:
        beta = BETA
    tau = threshold_tau(guess, schedule, beta)
    gamma = 2 * schedule.horizon * tau
    built = sfnet_build(g, plist, gamma)
    day0 = built.e_alg
    zeroed = zero_edges(g, day0.ids)
    residuals = {}
    actions = {}
    for p in plist:
        dist, pred = shortest_paths(zeroed, [p.s])
        if p.t not in dist:
            raise Disconnected(f"pair {p.pid} cannot be connected")
        residuals[p.pid] = dist[p.t]
        path = path_edges(pred, {p.s}, p.t)
        actions[p.pid] = tuple(sorted(set(path) - day0.ids))
        assert dist[p.t] <= 4 * gamma, "loop exit bounds every residual"
    return ThriftyPlan(guess=Fraction(guess), beta=Fraction(beta), tau=tau,
                       critical_day=argmin_stage(schedule), net=built.net,
                       day0_purchase=tuple(sorted(day0.ids)),
                       day0_cost=day0.cost, residuals=residuals,
                       residual_actions=actions, conservative=True)


def _reframe(inner: ThriftyPlan, pre: PreprocessResult) -> ThriftyPlan:
    """Restate a plan computed on a preprocessed instance in original terms:
    prepaid edges join day 0, action lists drop them, and the critical day is
    mapped back to original day numbering."""
    owned = pre.prepaid.ids
    return replace(
        inner,
        critical_day=pre.kept_days[inner.critical_day],
        day0_purchase=tuple(sorted(owned | set(inner.day0_purchase))),
        day0_cost=pre.prepaid.cost + inner.day0_cost,
        residual_actions={u: tuple(i for i in acts if i not in owned)
                          for u, acts in inner.residual_actions.items()},
        preprocess_f=pre.f_guess)


def _distinct_cost_edges(g: WeightedGraph):
    seen = set()
    for e in sorted(g.edges, key=lambda e: (e.cost, e.eid)):
        if e.cost not in seen:
            seen.add(e.cost)
            yield e.eid


def _tree_candidates(g: WeightedGraph, schedule: Schedule, beta):
    dists = {v: shortest_paths(g, [v])[0] for v in range(g.n)}
    lb = Fraction(0)
    for u in range(g.n):
        for v in range(u + 1, g.n):
            if v not in dists[u]:
                raise Disconnected(f"vertices {u} and {v} are not connected")
            lb = max(lb, dists[u][v])
    ub = mst_steiner_tree(g, range(g.n))
    if ub.cost == 0:
        return [free_plan(range(g.n), sorted(ub.ids), argmin_stage(schedule))]
    return [thrifty_tree_plan(g, schedule, guess, beta)
            for guess in guess_grid(lb, ub.cost)]


def solve_tree(g: WeightedGraph, schedule: Schedule,
               beta: Fraction | None = None,
               preprocess: bool = False,
               merge_r=2) -> tuple[ThriftyPlan, CostReport]:
    """Best evaluated tree plan over the doubling guess grid (and, with
    preprocess=True, over every guess of the costliest edge after scaling)."""
    validate_schedule(schedule, g.n)
    units = tuple(range(g.n))
    if beta is None:
        beta = BETA
    if schedule.k[schedule.horizon] <= 1:
        plan = trivial_plan(units)
        return plan, evaluate_thrifty(plan, schedule, units)
    candidates: list[ThriftyPlan] = []
    if preprocess:
        for eid in _distinct_cost_edges(g):
            pre = preprocess_cost_scaling(g, schedule, STEINERTREE, eid,
                                          merge_r)
            try:
                inner = _tree_candidates(pre.graph, pre.schedule, beta)
            except Disconnected:
                continue
            candidates.extend(_reframe(p, pre) for p in inner)
    else:
        candidates = _tree_candidates(g, schedule, beta)
    return _best(candidates, schedule, units)


def _forest_candidates(g: WeightedGraph, plist: Sequence[Pair],
                       schedule: Schedule, beta):
    lb = Fraction(0)
    for p in plist:
        dist, _ = shortest_paths(g, [p.s])
        if p.t not in dist:
            raise Disconnected(f"pair {p.pid} cannot be connected")
        lb = max(lb, dist[p.t])
    ub = gw_steiner_forest(g, plist)
    if ub.cost == 0:
        return [free_plan((p.pid for p in plist), sorted(ub.ids),
                          argmin_stage(schedule))]
    return [thrifty_forest_plan(g, plist, schedule, guess, beta)
            for guess in guess_grid(lb, ub.cost)]


def solve_forest(g: WeightedGraph, pairs, schedule: Schedule,
                 beta: Fraction | None = None,
                 preprocess: bool = False,
                 merge_r=2) -> tuple[ThriftyPlan, CostReport]:
    """Best evaluated forest plan over the doubling guess grid (and, with
    preprocess=True, over every guess of the costliest edge after scaling)."""
    plist = _pairs_of(g, pairs)
    units = tuple(p.pid for p in plist)
    validate_schedule(schedule, len(units))
    if beta is None:
        beta = BETA
    if schedule.k[schedule.horizon] == 0:
        plan = trivial_plan(units)
        return plan, evaluate_thrifty(plan, schedule, units)
    candidates: list[ThriftyPlan] = []
    if preprocess:
        for eid in _distinct_cost_edges(g):
            pre = preprocess_cost_scaling(g, schedule, STEINERFOREST, eid,
                                          merge_r)
            try:
                inner = _forest_candidates(pre.graph, plist, pre.schedule, beta)
            except Disconnected:
                continue
            candidates.extend(_reframe(p, pre) for p in inner)
    else:
        candidates = _forest_candidates(g, plist, schedule, beta)
    return _best(candidates, schedule, units)


def _best(candidates: Iterable[ThriftyPlan], schedule: Schedule,
          units) -> tuple[ThriftyPlan, CostReport]:
    best = None
    for plan in candidates:
        report = evaluate_thrifty(plan, schedule, units)
        if best is None or report.robcov < best[1].robcov:
            best = (plan, report)
    if best is None:
        raise Disconnected("no feasible plan under any cost guess")
    return best
