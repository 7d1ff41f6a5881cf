"""Ground truth for tiny instances.

Provides exact optima by brute force (covers, cuts, trees, forests), the
exact minimax value of the adaptive game by backward induction with
memoization, exhaustive worst-case evaluation and feasibility checking of
two-day plans, grid endpoints for the guessing loops, and an exact evaluator
specialized to partitioned single-survivor instances whose ground sets are
too large for the generic game solver.

Everything here is exponential by design and guarded by SizeLimits.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping

from .errors import BadParameters, Infeasible, TooLarge, TrivialInstance
from .graphcore import (UnionFind, WeightedGraph, gw_steiner_forest, min_cut,
                        mst_steiner_tree, shortest_paths)
from .model import (CARDINALITY, MINCUT, SETCOVER, STEINERFOREST, STEINERTREE,
                    SUBSET, ProblemInstance, Schedule, ThriftyPlan,
                    UncertaintySpec)
from .setcover import SetSystem, greedy_cover

_INF = float("inf")


@dataclass(frozen=True)
class SizeLimits:
    """Hard caps checked before any exponential enumeration starts."""

    max_units: int = 8
    max_actions: int = 12
    max_horizon: int = 3

    def check(self, n_units: int, n_actions: int, horizon: int) -> None:
        if n_units > self.max_units:
            raise TooLarge(f"{n_units} ground units exceed limit {self.max_units}")
        if n_actions > self.max_actions:
            raise TooLarge(f"{n_actions} actions exceed limit {self.max_actions}")
        if horizon > self.max_horizon:
            raise TooLarge(f"horizon {horizon} exceeds limit {self.max_horizon}")


def _limits(limits: SizeLimits | None) -> SizeLimits:
    return limits if limits is not None else SizeLimits()


# ---------------------------------------------------------------- exact optima

def exact_cover(system: SetSystem, targets: Iterable[int],
                limits: SizeLimits | None = None) -> Fraction:
    """Minimum cost of a subcollection covering the targets, by enumeration."""
    lim = _limits(limits)
    lim.check(0, len(system.sets), 0)
    want = frozenset(targets)
    best = _INF
    for mask in range(1 << len(system.sets)):
        cost = Fraction(0)
        covered: set[int] = set()
        for sid in range(len(system.sets)):
            if mask >> sid & 1:
                members, c = system.sets[sid]
                cost += c
                covered.update(members)
        if want <= covered and cost < best:
            best = cost
    if best is _INF:
        raise Infeasible("no subcollection covers the targets")
    return best


def _edge_subset_minimum(g: WeightedGraph, limits: SizeLimits | None,
                         ok) -> Fraction:
    lim = _limits(limits)
    lim.check(0, len(g.edges), 0)
    best = _INF
    edges = g.edges
    for mask in range(1 << len(edges)):
        chosen = [e for i, e in enumerate(edges) if mask >> i & 1]
        cost = sum((e.cost for e in chosen), Fraction(0))
        if cost < best and ok(chosen):
            best = cost
    if best is _INF:
        raise Infeasible("no edge subset is feasible")
    return best


def exact_steiner(g: WeightedGraph, terminals: Iterable[int],
                  limits: SizeLimits | None = None) -> Fraction:
    """Minimum cost edge subset connecting all terminals, by enumeration."""
    term = sorted(set(terminals))
    if len(term) <= 1:
        return Fraction(0)

    def ok(chosen) -> bool:
        uf = UnionFind(g.n)
        for e in chosen:
            uf.union(e.u, e.v)
        r = uf.find(term[0])
        return all(uf.find(t) == r for t in term[1:])

    return _edge_subset_minimum(g, limits, ok)


def exact_forest(g: WeightedGraph, pairs,
                 limits: SizeLimits | None = None) -> Fraction:
    """Minimum cost edge subset connecting every pair, by enumeration."""
    plist = [(p[0], p[1]) for p in pairs]
    if all(s == t for s, t in plist):
        return Fraction(0)

    def ok(chosen) -> bool:
        uf = UnionFind(g.n)
        for e in chosen:
            uf.union(e.u, e.v)
        return all(uf.find(s) == uf.find(t) for s, t in plist)

    return _edge_subset_minimum(g, limits, ok)


def exact_cut(g: WeightedGraph, root: int, terminals: Iterable[int],
              limits: SizeLimits | None = None) -> Fraction:
    """Minimum cost edge subset whose removal separates all terminals from
    the root, by enumeration."""
    term = sorted(set(terminals))
    if not term:
        return Fraction(0)

    def ok(chosen) -> bool:
        dropped = {e.eid for e in chosen}
        adj = [[] for _ in range(g.n)]
        for e in g.edges:
            if e.eid not in dropped:
                adj[e.u].append(e.v)
                adj[e.v].append(e.u)
        seen = {root}
        queue = [root]
        while queue:
            v = queue.pop()
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
        return not any(t in seen for t in term)

    return _edge_subset_minimum(g, limits, ok)


# ------------------------------------------------------------- the exact game

@dataclass(frozen=True)
class TraceNode:
    """One state of an optimal strategy: what it buys at (day, active), its
    optimal cost-to-go, and a subtree per adversary move."""

    day: int
    active: frozenset
    purchase: tuple
    value: Fraction
    children: tuple


class _Game:
    """Bitmask encoding of one instance for the backward-induction solver."""

    def __init__(self, instance: ProblemInstance, limits: SizeLimits,
                 build_masks: bool = True):
        self.inst = instance
        self.kind = instance.kind
        self.units = tuple(instance.units())
        self.uidx = {u: i for i, u in enumerate(self.units)}
        self.schedule = instance.schedule
        payload = instance.payload
        if self.kind == SETCOVER:
            self.action_ids = tuple(range(len(payload.sets)))
            self.costs = tuple(c for _, c in payload.sets)
            self.cover = tuple(
                sum(1 << self.uidx[e] for e in members if e in self.uidx)
                for members, _ in payload.sets)
        else:
            self.action_ids = tuple(e.eid for e in payload.edges)
            self.costs = tuple(e.cost for e in payload.edges)
        limits.check(len(self.units), len(self.action_ids),
                     self.schedule.horizon)
        self.masks = []
        if build_masks:
            n = len(self.action_ids)
            for mask in range(1 << n):
                cost = sum((self.costs[i] for i in range(n) if mask >> i & 1),
                           Fraction(0))
                self.masks.append((cost, mask))
            self.masks.sort(key=lambda cm: (cm[0], cm[1]))
        self.full_units = (1 << len(self.units)) - 1
        self.parts_mask = None
        if instance.uncertainty.kind == SUBSET:
            self.parts_mask = tuple(
                sum(1 << self.uidx[u] for u in part)
                for part in instance.uncertainty.parts)

    def unit_set(self, mask: int) -> frozenset:
        return frozenset(self.units[i] for i in range(len(self.units))
                         if mask >> i & 1)

    def action_set(self, mask: int) -> tuple:
        return tuple(self.action_ids[i] for i in range(len(self.action_ids))
                     if mask >> i & 1)

    def covered_mask(self, owned: int) -> int:
        cov = 0
        for i in range(len(self.action_ids)):
            if owned >> i & 1:
                cov |= self.cover[i]
        return cov

    def feasible(self, owned: int, active: int) -> bool:
        if self.kind == SETCOVER:
            return active & ~self.covered_mask(owned) == 0
        g: WeightedGraph = self.inst.payload
        owned_ids = {self.action_ids[i] for i in range(len(self.action_ids))
                     if owned >> i & 1}
        if self.kind == MINCUT:
            adj = [[] for _ in range(g.n)]
            for e in g.edges:
                if e.eid not in owned_ids:
                    adj[e.u].append(e.v)
                    adj[e.v].append(e.u)
            seen = {g.root}
            queue = [g.root]
            while queue:
                v = queue.pop()
                for w in adj[v]:
                    if w not in seen:
                        seen.add(w)
                        queue.append(w)
            return not any(v in seen for v in self.unit_set(active))
        uf = UnionFind(g.n)
        by_id = {e.eid: e for e in g.edges}
        for eid in owned_ids:
            e = by_id[eid]
            uf.union(e.u, e.v)
        if self.kind == STEINERTREE:
            verts = sorted(self.unit_set(active))
            return all(uf.find(v) == uf.find(verts[0]) for v in verts)
        pid_map = {p.pid: p for p in g.pairs}
        return all(uf.find(pid_map[pid].s) == uf.find(pid_map[pid].t)
                   for pid in self.unit_set(active))

    def moves(self, next_day: int, active: int, full: bool) -> list[int]:
        """Adversary's reachable next active-unit masks."""
        bits = [i for i in range(len(self.units)) if active >> i & 1]
        k = self.schedule.k[next_day]
        if self.parts_mask is not None:
            part = self.parts_mask[next_day - 1]
            inside = [i for i in bits if part >> i & 1]
            outside_mask = active & ~part
            out = set()
            keep_sizes = (range(min(k, len(inside)) + 1) if full
                          else [min(k, len(inside))])
            for size in keep_sizes:
                for keep in combinations(inside, size):
                    kept = sum(1 << i for i in keep)
                    if full:
                        rest = [i for i in bits if not part >> i & 1]
                        for rsize in range(len(rest) + 1):
                            for rk in combinations(rest, rsize):
                                out.add(kept | sum(1 << i for i in rk))
                    else:
                        out.add(kept | outside_mask)
            return sorted(out)
        n_total = len(self.units)
        hi = min(k, len(bits))
        lo = max(0, k - (n_total - len(bits))) if full else hi
        out = set()
        for size in range(lo, hi + 1):
            for keep in combinations(bits, size):
                out.add(sum(1 << i for i in keep))
        return sorted(out)

    def useful(self, mask: int, owned: int, active: int) -> bool:
        """Set-cover prune: every bought set must add new active coverage."""
        if self.kind != SETCOVER:
            return True
        covered = self.covered_mask(owned)
        for i in range(len(self.action_ids)):
            if mask >> i & 1 and self.cover[i] & active & ~covered == 0:
                return False
        return True

    def memo_key(self, day: int, active: int, owned: int):
        if self.kind == SETCOVER:
            return day, active, self.covered_mask(owned) & active
        return day, active, owned


def minimax_opt(instance: ProblemInstance, limits: SizeLimits | None = None,
                full_adversary: bool = False,
                inactive_days: Iterable[int] = ()
                ) -> tuple[Fraction, TraceNode]:
    """Exact optimal adaptive value by backward induction, with one optimal
    strategy as a trace tree (children cover every adversary move).

    inactive_days forbids any purchase on the listed days; full_adversary
    enumerates every reachable next active set instead of only the
    maximal-cardinality ones (the values agree — kept for spot checks).
    """
    game = _Game(instance, _limits(limits))
    sched = game.schedule
    T = sched.horizon
    forbidden = frozenset(inactive_days)
    memo: dict = {}
    empty_only = [(Fraction(0), 0)]

    def value(day: int, active: int, owned: int):
        key = game.memo_key(day, active, owned)
        got = memo.get(key)
        if got is not None:
            return got[0]
        best, best_mask = _INF, 0
        choices = empty_only if day in forbidden else game.masks
        for cost, mask in choices:
            if mask & owned:
                continue
            if not game.useful(mask, owned, active):
                continue
            spend = sched.lam[day] * cost
            if spend >= best:
                break
            if day == T:
                if game.feasible(owned | mask, active):
                    best, best_mask = spend, mask
                    break
            else:
                worst = Fraction(0)
                for move in game.moves(day + 1, active, full_adversary):
                    worst = max(worst, value(day + 1, move, owned | mask))
                    if spend + worst >= best:
                        break
                if spend + worst < best:
                    best, best_mask = spend + worst, mask
        memo[key] = (best, best_mask)
        return best

    def trace(day: int, active: int, owned: int) -> TraceNode:
        val, mask = memo[game.memo_key(day, active, owned)]
        kids = ()
        if day < T:
            kids = tuple(
                (game.unit_set(move), trace(day + 1, move, owned | mask))
                for move in game.moves(day + 1, active, full_adversary))
        return TraceNode(day=day, active=game.unit_set(active),
                         purchase=game.action_set(mask), value=val,
                         children=kids)

    opt = value(0, game.full_units, 0)
    if opt is _INF or opt == _INF:
        raise Infeasible("no strategy is feasible for every scenario")
    return opt, trace(0, game.full_units, 0)


# -------------------------------------------------- plan evaluation & checking

def _reachable_actives(instance: ProblemInstance, upto_day: int) -> set:
    """All active sets the adversary can realize by the given day."""
    game = _Game(instance, SizeLimits(max_units=10 ** 9, max_actions=10 ** 9,
                                      max_horizon=10 ** 9), build_masks=False)
    frontier = {game.full_units}
    for day in range(1, upto_day + 1):
        nxt = set()
        for active in frontier:
            nxt.update(game.moves(day, active, True))
        frontier = nxt
    return {game.unit_set(m) for m in frontier}


def exhaustive_robcov(instance: ProblemInstance, plan: ThriftyPlan,
                      limits: SizeLimits | None = None) -> Fraction:
    """Exact worst case of executing a two-day plan: maximize over reachable
    critical-day active sets, charging each bought action once."""
    lim = _limits(limits)
    n_actions = (len(instance.payload.sets) if instance.kind == SETCOVER
                 else len(instance.payload.edges))
    lim.check(len(instance.units()), n_actions, instance.schedule.horizon)
    if instance.kind == SETCOVER:
        price = {sid: c for sid, (_, c) in enumerate(instance.payload.sets)}
    else:
        price = {e.eid: e.cost for e in instance.payload.edges}
    j = plan.critical_day
    worst = Fraction(0)
    for active in _reachable_actives(instance, j):
        ids = set()
        for u in active:
            ids.update(plan.residual_actions[u])
        cost = sum((price[i] for i in ids), Fraction(0))
        worst = max(worst, cost)
    return plan.day0_cost + instance.schedule.lam[j] * worst


def check_plan_feasible(instance: ProblemInstance, plan: ThriftyPlan,
                        limits: SizeLimits | None = None) -> bool:
    """Whether the plan's purchases cover every scenario sequence: for each
    reachable critical-day active set, day-0 plus the triggered residual
    actions must already cover it (coverage is monotone, so later shrinking
    cannot break it)."""
    lim = _limits(limits)
    game = _Game(instance, lim)
    day0 = set(plan.day0_purchase)
    aidx = {aid: i for i, aid in enumerate(game.action_ids)}
    for active in _reachable_actives(instance, plan.critical_day):
        ids = set(day0)
        for u in active:
            ids.update(plan.residual_actions[u])
        owned = sum(1 << aidx[i] for i in ids)
        amask = sum(1 << game.uidx[u] for u in active)
        if not game.feasible(owned, amask):
            return False
    return True


def opt_bounds(instance: ProblemInstance) -> tuple[Fraction, Fraction]:
    """Grid endpoints: a proven lower bound on the adaptive optimum and the
    cost of a feasible day-0-only solution."""
    sched = instance.schedule
    if sched.k[sched.horizon] == 0:
        raise TrivialInstance("k_T = 0: nothing is ever required")
    kind = instance.kind
    if kind == SETCOVER:
        system: SetSystem = instance.payload
        units = instance.units()
        lb = max(system.minset_cost[e] for e in units)
        _, ub = greedy_cover(system, units)
        return lb, ub
    g: WeightedGraph = instance.payload
    if kind == MINCUT:
        units = instance.units()
        lb = max(min_cut(g, g.root, [v])[0] for v in units)
        ub, _ = min_cut(g, g.root, units)
        return lb, ub
    if kind == STEINERTREE:
        if sched.k[sched.horizon] <= 1:
            raise TrivialInstance(
                "k_T <= 1: a lone vertex needs no connection")
        lb = Fraction(0)
        for u in range(g.n):
            dist, _ = shortest_paths(g, [u])
            for v in range(u + 1, g.n):
                if v not in dist:
                    raise Infeasible(f"vertices {u} and {v} are not connected")
                lb = max(lb, dist[v])
        return lb, mst_steiner_tree(g, range(g.n)).cost
    if kind == STEINERFOREST:
        lb = Fraction(0)
        for p in g.pairs:
            dist, _ = shortest_paths(g, [p.s])
            if p.t not in dist:
                raise Infeasible(f"pair {p.pid} cannot be connected")
            lb = max(lb, dist[p.t])
        return lb, gw_steiner_forest(g, g.pairs).cost
    raise ValueError(f"unknown problem kind {kind!r}")


# ------------------------------------- partitioned single-survivor instances

def _partwise_check(system: SetSystem, schedule: Schedule,
                    parts) -> tuple[Mapping, Mapping]:
    """Validate the structure the specialized evaluator relies on: singleton
    sets only, one per element, parts partitioning the universe, uniform cost
    inside each part, and k_i = 1 on every revelation day."""
    by_elem: dict[int, Fraction] = {}
    for members, cost in system.sets:
        if len(members) != 1:
            raise BadParameters("specialized evaluator needs singleton sets")
        (e,) = members
        if e in by_elem:
            raise BadParameters(f"element {e} has multiple covering sets")
        by_elem[e] = cost
    seen: set[int] = set()
    part_cost: dict[int, Fraction] = {}
    part_size: dict[int, int] = {}
    for i, part in enumerate(parts, start=1):
        if not part or part & seen:
            raise BadParameters("parts must be disjoint and nonempty")
        seen |= part
        costs = {by_elem[e] for e in part}
        if len(costs) != 1:
            raise BadParameters(f"part {i} has mixed element costs")
        part_cost[i] = costs.pop()
        part_size[i] = len(part)
    if seen != set(system.elements()):
        raise BadParameters("parts must partition the universe")
    if len(parts) != schedule.horizon:
        raise BadParameters("need exactly one part per day 1..T")
    for i in range(1, schedule.horizon + 1):
        if schedule.k[i] != 1:
            raise BadParameters("specialized evaluator needs k_i = 1")
    return part_cost, part_size


def partwise_minimax(system: SetSystem, schedule: Schedule, parts,
                     inactive_days: Iterable[int] = ()) -> Fraction:
    """Exact adaptive optimum for partitioned single-survivor set cover.

    Day i's adversary keeps at most one element of part i.  Within a part all
    elements cost the same, so states collapse to which past survivors are
    still uncovered and which future parts were bought whole; buying a strict
    subset of a part in advance is wasted (the adversary survives an unowned
    element), so advance purchases are whole-part-or-nothing.  This matches
    the generic game solver wherever both are feasible to run.
    """
    part_cost, part_size = _partwise_check(system, schedule, parts)
    T = schedule.horizon
    forbidden = frozenset(inactive_days)
    prepay = {i: part_cost[i] * part_size[i] for i in part_cost}
    memo: dict = {}

    def strategy_turn(day: int, pending: frozenset, prepaid: frozenset
                      ) -> Fraction:
        """Best cost from the strategy's purchase on `day` onward."""
        key = (day, pending, prepaid)
        got = memo.get(key)
        if got is not None:
            return got
        lam = schedule.lam[day]
        if day == T:
            # last chance: cover everything still pending
            if day in forbidden:
                best = Fraction(0) if not pending else _INF
            else:
                best = lam * sum((part_cost[i] for i in pending), Fraction(0))
        else:
            best = None
            future = [m for m in range(day + 1, T + 1) if m not in prepaid]
            pend = sorted(pending)
            for ncov in range(len(pend) + 1):
                for cov in combinations(pend, ncov):
                    for npre in range(len(future) + 1):
                        for pre in combinations(future, npre):
                            if (cov or pre) and day in forbidden:
                                continue
                            spend = lam * (
                                sum((part_cost[i] for i in cov), Fraction(0))
                                + sum((prepay[m] for m in pre), Fraction(0)))
                            if best is not None and spend >= best:
                                continue
                            total = spend + adversary_turn(
                                day + 1, pending - frozenset(cov),
                                prepaid | frozenset(pre))
                            if best is None or total < best:
                                best = total
        memo[key] = best
        return best

    def adversary_turn(day: int, pending: frozenset, prepaid: frozenset
                       ) -> Fraction:
        """Day `day` reveals part `day`'s survivor (or none), then the
        strategy moves."""
        outcomes = [strategy_turn(day, pending, prepaid)]
        if day not in prepaid:
            outcomes.append(strategy_turn(day, pending | {day}, prepaid))
        return max(outcomes)

    result = strategy_turn(0, frozenset(), frozenset())
    if result == _INF:
        raise Infeasible("no strategy is feasible with these inactive days")
    return result


def scripted_worst_case(instance: ProblemInstance) -> Fraction:
    """Exhaustive worst case of the follow-along strategy that covers each
    day's revealed survivor immediately and buys nothing else."""
    if instance.uncertainty.kind != SUBSET:
        raise BadParameters("the follow-along strategy needs part structure")
    part_cost, _ = _partwise_check(instance.payload, instance.schedule,
                                   instance.uncertainty.parts)
    sched = instance.schedule

    def worst(day: int) -> Fraction:
        if day > sched.horizon:
            return Fraction(0)
        skip = worst(day + 1)
        reveal = sched.lam[day] * part_cost[day] + worst(day + 1)
        return max(skip, reveal)

    return worst(1)
