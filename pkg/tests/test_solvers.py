"""Tests for millrun.solvers: oracle, greedy, local search and their shared state."""

import logging
import time

import numpy as np
import pytest

from millrun.errors import SolverError
from millrun.plant import Machine, Order, PlantConfig
from millrun.schedule_model import Assignment, evaluate
from millrun.solvers import solve, solve_exhaustive, solve_greedy, solve_local_search
from millrun.solvers._partial import PartialSchedule, replay, resequence


def _one_machine(capacity_kg: float) -> PlantConfig:
    return PlantConfig(
        machines=[Machine(id=1, t=100.0, e=1.0, m=0.0, s=0.0)],
        hours_per_day=24.0,
        warehouse_capacity_kg=capacity_kg,
    )


TWO_OVERLAPPING = [Order(id=1, quantity=300.0, due_days=1.0), Order(id=2, quantity=300.0, due_days=1.0)]


def _random_instance(rng: np.random.Generator):
    n = int(rng.integers(3, 9))
    m = int(rng.integers(1, 4))
    machines = [
        Machine(id=j, t=float(rng.integers(50, 201)), e=1.0, m=0.0, s=float(rng.integers(0, 4)))
        for j in range(1, m + 1)
    ]
    plant = PlantConfig(
        machines=machines,
        hours_per_day=8.0,
        warehouse_capacity_kg=float(rng.integers(1_000, 4_001)),
    )
    orders = [
        Order(id=i, quantity=float(rng.integers(100, 1_501)), due_days=float(rng.integers(1, 6)))
        for i in range(1, n + 1)
    ]
    return orders, plant


# --------------------------------------------------------------------------- #
# Oracle
# --------------------------------------------------------------------------- #


def test_oracle_serves_one_of_two_overlapping_orders():
    res = solve_exhaustive(TWO_OVERLAPPING, _one_machine(500.0))
    assert res.Z == 300.0
    assert res.unserved == (1,)
    assert res.best_eval.feasible


def test_oracle_serves_both_with_room():
    res = solve_exhaustive(TWO_OVERLAPPING, _one_machine(600.0))
    assert res.Z == 600.0
    assert res.unserved == ()


def test_oracle_limit():
    orders = [Order(id=i, quantity=10.0, due_days=float(i)) for i in range(1, 16)]
    with pytest.raises(SolverError, match="exceeds limit"):
        solve_exhaustive(orders, _one_machine(1e6), limit=1_000)


@pytest.mark.parametrize("seed", range(20))
def test_oracle_z_grows_with_warehouse(seed):
    orders, plant = _random_instance(np.random.default_rng(seed))
    zs = [solve_exhaustive(orders, plant.with_capacity(a)).Z for a in (800.0, 1_500.0, 3_000.0, 1e9)]
    assert all(a <= b for a, b in zip(zs, zs[1:]))


# --------------------------------------------------------------------------- #
# Heuristics against the oracle
# --------------------------------------------------------------------------- #


def test_heuristics_against_oracle_suite():
    rng = np.random.default_rng(2013)
    exact = 0
    start = time.perf_counter()
    for _ in range(50):
        orders, plant = _random_instance(rng)
        oracle = solve_exhaustive(orders, plant)
        greedy = solve_greedy(orders, plant)
        local = solve_local_search(orders, plant, seed=0)
        assert greedy.Z <= oracle.Z + 1e-9  # noqa: PLR2004
        assert local.Z >= greedy.Z - 1e-9  # noqa: PLR2004
        assert local.Z <= oracle.Z + 1e-9  # noqa: PLR2004
        assert local.Z >= 0.95 * oracle.Z  # noqa: PLR2004
        exact += local.Z == pytest.approx(oracle.Z)
    assert exact >= 45  # noqa: PLR2004
    assert time.perf_counter() - start < 60  # noqa: PLR2004


def test_greedy_takes_earliest_finish():
    plant = PlantConfig(
        machines=[
            Machine(id=1, t=100.0, e=1.0, m=0.0, s=0.0),
            Machine(id=2, t=200.0, e=1.0, m=0.0, s=0.0),
        ],
        hours_per_day=24.0,
        warehouse_capacity_kg=1e9,
    )
    res = solve_greedy([Order(id=1, quantity=400.0, due_days=1.0)], plant)
    assert res.machine_of() == {1: 2}


def test_greedy_skips_orders_that_cannot_fit(caplog):
    late = Order(id=1, quantity=10_000.0, due_days=1.0)
    with caplog.at_level(logging.INFO, logger="millrun.solvers.greedy"):
        res = solve_greedy([late], _one_machine(1e9))
    assert res.unserved == (1,)
    assert res.Z == 0.0
    assert "unserved" in caplog.text


# --------------------------------------------------------------------------- #
# Local search
# --------------------------------------------------------------------------- #


def test_local_search_is_deterministic():
    orders, plant = _random_instance(np.random.default_rng(9))
    a = solve_local_search(orders, plant, seed=42, budget=2_000)
    b = solve_local_search(orders, plant, seed=42, budget=2_000)
    assert a.to_dict() == b.to_dict()


def test_local_search_argument_checks():
    with pytest.raises(SolverError, match="budget"):
        solve_local_search(TWO_OVERLAPPING, _one_machine(500.0), budget=0)
    with pytest.raises(SolverError, match="kicks"):
        solve_local_search(TWO_OVERLAPPING, _one_machine(500.0), kicks=-1)
    with pytest.raises(SolverError, match="unknown order"):
        solve_local_search(TWO_OVERLAPPING, _one_machine(500.0), warm_start={99: 1})
    with pytest.raises(SolverError, match="unknown machine"):
        solve_local_search(TWO_OVERLAPPING, _one_machine(500.0), warm_start={1: 7})


def test_infeasible_warm_start_falls_back(caplog):
    warm = {1: 1, 2: 1}
    with caplog.at_level(logging.WARNING, logger="millrun.solvers.local_search"):
        res = solve_local_search(TWO_OVERLAPPING, _one_machine(500.0), warm_start=warm)
    assert "warm start is infeasible" in caplog.text
    assert res.Z == 300.0


def test_feasible_warm_start_is_kept_when_better():
    orders, plant = _random_instance(np.random.default_rng(21))
    oracle = solve_exhaustive(orders, plant)
    res = solve_local_search(orders, plant, seed=1, budget=1, kicks=0, warm_start=oracle.machine_of())
    assert res.Z == pytest.approx(oracle.Z)


# --------------------------------------------------------------------------- #
# Dispatch and edge cases
# --------------------------------------------------------------------------- #


@pytest.mark.parametrize("method", ["oracle", "exhaustive", "greedy", "local", "local_search"])
def test_solve_dispatch_and_empty_month(method):
    res = solve(method, [], _one_machine(100.0))
    assert res.Z == 0.0
    assert res.unserved == ()
    assert res.to_dict()["orders"] == []


def test_solve_unknown_method():
    with pytest.raises(SolverError, match="unknown method"):
        solve("annealing", TWO_OVERLAPPING, _one_machine(500.0))


def test_result_maps_back_to_input_ids():
    orders = [
        Order(id=10, quantity=100.0, due_days=5.0),
        Order(id=20, quantity=100.0, due_days=2.0),
        Order(id=30, quantity=100.0, due_days=2.0),
    ]
    res = solve_greedy(orders, _one_machine(1e9))
    assert res.original_ids == (20, 30, 10)
    assert [o.id for o in res.orders] == [1, 2, 3]
    rows = res.to_dict()["orders"]
    assert [(r["order"], r["sequence"]) for r in rows] == [(20, 1), (30, 2), (10, 3)]
    assert res.machine_of() == {10: 1, 20: 1, 30: 1}
    assert evaluate(res.orders, _one_machine(1e9), res.best_x).to_dict() == res.best_eval.to_dict()


def test_result_is_feasible_in_solving_sequence():
    # id 2 is due first; running the orders in id sequence would make it late
    plant = PlantConfig(
        machines=[Machine(id=1, t=100.0, e=1.0, m=0.0, s=0.0)],
        hours_per_day=8.0,
        warehouse_capacity_kg=1e9,
    )
    orders = [Order(id=1, quantity=700.0, due_days=2.0), Order(id=2, quantity=700.0, due_days=1.0)]
    oracle = solve_exhaustive(orders, plant)
    assert oracle.Z == 1_400.0
    assert oracle.unserved == ()
    assert evaluate(oracle.orders, plant, oracle.best_x).feasible
    assert oracle.machine_of() == {1: 1, 2: 1}
    warm = solve_local_search(orders, plant, budget=1, kicks=0, warm_start=oracle.machine_of())
    assert warm.Z == 1_400.0
    assert evaluate(warm.orders, plant, warm.best_x).feasible


def test_resequence_rejects_duplicate_ids():
    with pytest.raises(SolverError, match="unique"):
        resequence([Order(id=1, quantity=1.0, due_days=1.0)] * 2)


# --------------------------------------------------------------------------- #
# Incremental state agrees with the full evaluator
# --------------------------------------------------------------------------- #


@pytest.mark.parametrize("seed", range(30))
def test_replay_matches_evaluate(seed):
    rng = np.random.default_rng(seed)
    orders, plant = _random_instance(rng)
    seq, _ = resequence(orders)
    for _ in range(20):
        choices = [None if rng.random() < 0.25 else int(rng.integers(0, plant.n_machines)) for _ in seq]
        full = evaluate(seq, plant, Assignment.from_choices(choices, plant.n_machines))
        assert replay(seq, plant, choices) == full.feasible


def test_push_pop_restores_state():
    orders, plant = _random_instance(np.random.default_rng(4))
    seq, _ = resequence(orders)
    state = PartialSchedule(seq, plant)
    state.push(None)
    snapshot = (list(state.clock), list(state.L), list(state.occ), list(state.choice))
    for j in range(plant.n_machines):
        if state.push(j):
            state.pop()
        assert (list(state.clock), list(state.L), list(state.occ), list(state.choice)) == snapshot
    assert state.depth == 1
