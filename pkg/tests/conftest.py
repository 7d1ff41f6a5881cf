"""Session-wide instance batches shared by the unit and acceptance tests."""

import pytest

from krobust import mincut, setcover, steiner
from krobust.fixtures import gen_random
from krobust.model import MINCUT, PROBLEM_KINDS, SETCOVER, STEINERTREE

BATCH = 100


def solve_instance(inst):
    """Dispatch to the matching thrifty solver; returns (plan, report)."""
    if inst.kind == SETCOVER:
        return setcover.solve(inst.payload, inst.schedule)
    if inst.kind == MINCUT:
        return mincut.solve(inst.payload, inst.schedule)
    if inst.kind == STEINERTREE:
        return steiner.solve_tree(inst.payload, inst.schedule)
    return steiner.solve_forest(inst.payload, inst.payload.pairs, inst.schedule)


def tiny_batch(kind, count=BATCH):
    """Seeded instances with n <= 6, actions <= 10, T <= 3."""
    out = []
    for seed in range(count):
        n = 3 + seed % 4
        actions = max(n - 1, 5 + seed % 6)
        horizon = 1 + seed % 3
        out.append(gen_random(kind, n, actions, horizon, seed))
    return out


@pytest.fixture(scope="session")
def tiny_batches():
    return {kind: tiny_batch(kind) for kind in PROBLEM_KINDS}


@pytest.fixture(scope="session")
def solved_batches(tiny_batches):
    return {kind: [(inst,) + solve_instance(inst) for inst in insts]
            for kind, insts in tiny_batches.items()}
