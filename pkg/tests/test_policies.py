import numpy as np
import pytest

from fuzzylb import (
    CostTable,
    FuzzyEngine,
    HeavyCountPartition,
    MigrationDecision,
    NodeStatus,
    fuzzy_transfer_policy,
    location_policy,
    plan_migrations,
    randomize_assign,
    round_robin_assign,
    selection_policy,
)

S, R, N = NodeStatus.SENDER, NodeStatus.RECEIVER, NodeStatus.NEUTRAL


def _cost(rows, heavy=0):
    return CostTable(costs=tuple(tuple(float(c) for c in row) for row in rows), heavy_count=heavy)


# --- transfer --------------------------------------------------------------


def test_transfer_policy_extremes():
    engine = FuzzyEngine()
    assert fuzzy_transfer_policy(0, 0, engine) is R
    assert fuzzy_transfer_policy(engine.breakpoints.w, 0, engine) is S


def test_transfer_policy_moderate_with_many_heavy_nodes():
    engine = FuzzyEngine(heavy_partition=HeavyCountPartition.default_for(5))
    assert fuzzy_transfer_policy(engine.breakpoints.s, 5, engine) is R


def test_transfer_policy_total_and_deterministic():
    engine = FuzzyEngine()
    for load in range(0, 30):
        for count in range(0, 6):
            first = fuzzy_transfer_policy(load, count, engine)
            assert first is fuzzy_transfer_policy(load, count, engine)
            assert first in (S, R, N)


# --- location --------------------------------------------------------------


def test_location_picks_cheapest_receiver():
    cost = _cost([[0, 1, 2], [1, 0, 1], [2, 1, 0]])
    assert location_policy(0, [S, R, R], cost) == 1


def test_location_breaks_ties_by_lowest_id():
    cost = _cost([[0, 1, 1], [1, 0, 1], [1, 1, 0]])
    assert location_policy(0, [S, R, R], cost) == 1


def test_location_respects_exclusions_and_absence():
    cost = _cost([[0, 1, 2], [1, 0, 1], [2, 1, 0]])
    assert location_policy(0, [S, R, R], cost, excluded={1}) == 2
    assert location_policy(0, [S, N, N], cost) is None
    # the sender itself never counts as a receiver
    assert location_policy(0, [R, N, N], cost) is None


def test_location_minimality_against_brute_force():
    rng = np.random.default_rng(17)
    for _ in range(50):
        n = int(rng.integers(2, 8))
        costs = rng.integers(1, 10, size=(n, n)).astype(float)
        statuses = [R if rng.random() < 0.5 else N for _ in range(n)]
        table = _cost(costs)
        choice = location_policy(0, statuses, table)
        eligible = [(costs[0][i], i) for i in range(1, n) if statuses[i] is R]
        assert choice == (min(eligible)[1] if eligible else None)


# --- selection -------------------------------------------------------------


def test_selection_takes_latest_queued():
    assert selection_policy([10, 11, 12]) == 12


def test_selection_skips_lone_executing_task():
    assert selection_policy([10]) is None
    assert selection_policy([]) is None


# --- migration planning ----------------------------------------------------


def test_single_sender_single_receiver():
    cost = _cost([[0, 1], [1, 0]])
    decisions = plan_migrations([S, R], cost, [[1, 2], [3]])
    assert decisions == [MigrationDecision(source=0, target=1, task=2)]


def test_sender_without_transferable_task_stays_put():
    cost = _cost([[0, 1], [1, 0]])
    assert plan_migrations([S, R], cost, [[1], []]) == []


def test_two_senders_one_receiver():
    cost = _cost([[0, 1, 1], [1, 0, 1], [1, 1, 0]])
    decisions = plan_migrations([S, S, R], cost, [[1, 2], [3, 4], []])
    assert decisions == [MigrationDecision(source=0, target=2, task=2)]


def test_empty_queue_sender_releases_receiver_to_next_sender():
    cost = _cost([[0, 1, 1], [1, 0, 1], [1, 1, 0]])
    decisions = plan_migrations([S, S, R], cost, [[1], [3, 4], []])
    assert decisions == [MigrationDecision(source=1, target=2, task=4)]


def test_plans_never_share_source_or_target_nor_move_heads():
    rng = np.random.default_rng(23)
    for _ in range(200):
        n = int(rng.integers(2, 7))
        statuses = [(S, R, N)[int(rng.integers(3))] for _ in range(n)]
        queues = [list(range(i * 10, i * 10 + int(rng.integers(0, 4)))) for i in range(n)]
        costs = rng.integers(1, 5, size=(n, n)).astype(float)
        decisions = plan_migrations(statuses, _cost(costs), queues)
        sources = [d.source for d in decisions]
        targets = [d.target for d in decisions]
        assert len(sources) == len(set(sources))
        assert len(targets) == len(set(targets))
        for d in decisions:
            assert statuses[d.source] is S
            assert statuses[d.target] is R
            assert d.task in queues[d.source]
            assert d.task != queues[d.source][0]


def test_migration_decision_rejects_self_loop():
    with pytest.raises(ValueError):
        MigrationDecision(source=1, target=1, task=5)


# --- static baselines ------------------------------------------------------


def test_round_robin_wraps():
    assert round_robin_assign(0, 3) == 0
    assert round_robin_assign(3, 3) == 0
    assert round_robin_assign(7, 5) == 2
    with pytest.raises(ValueError):
        round_robin_assign(1, 0)


def test_randomize_single_node():
    rng = np.random.default_rng(0)
    assert all(randomize_assign(rng, 1) == 0 for _ in range(100))


def test_randomize_deterministic_replay():
    first = [randomize_assign(np.random.default_rng(5), 4) for _ in range(1)]
    second = [randomize_assign(np.random.default_rng(5), 4) for _ in range(1)]
    assert first == second
    rng_a, rng_b = np.random.default_rng(6), np.random.default_rng(6)
    assert [randomize_assign(rng_a, 7) for _ in range(50)] == [
        randomize_assign(rng_b, 7) for _ in range(50)
    ]


def test_randomize_frequencies_within_three_sigma():
    rng = np.random.default_rng(1234)
    draws = 100_000
    counts = np.bincount([randomize_assign(rng, 5) for _ in range(draws)], minlength=5)
    sigma = (0.2 * 0.8 / draws) ** 0.5
    for count in counts:
        assert abs(count / draws - 0.2) < 3 * sigma
