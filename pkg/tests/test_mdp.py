import itertools
import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gg1lab.birthdeath import (
    expected_queue_length,
    mm1_queue_length,
    mm1_response_time,
    stationary_distribution,
    truncated_mm1_queue_length,
)
from gg1lab.mdp import (
    MdpInstance,
    build_instance,
    continuous_time_average,
    implied_response,
    policy_evaluation,
    solve_optimal,
)

# ---------------------------------------------------------------------------
# birth-death stationary law


def test_stationary_distribution_basics():
    pi = stationary_distribution(0.5, 1.0, 10)
    assert pi.sum() == pytest.approx(1.0)
    assert (pi >= 0).all()
    # detailed balance: lambda pi_x = mu pi_{x+1}
    np.testing.assert_allclose(0.5 * pi[:-1], 1.0 * pi[1:], rtol=1e-12)


def test_stationary_distribution_input_forms():
    a = stationary_distribution(0.3, 0.9, 6)
    b = stationary_distribution(0.3, np.full(6, 0.9))
    c = stationary_distribution(0.3, lambda x: 0.9, n_states=6)
    np.testing.assert_allclose(a, b)
    np.testing.assert_allclose(a, c)
    with pytest.raises(ValueError):
        stationary_distribution(-0.1, 1.0, 5)
    with pytest.raises(ValueError):
        stationary_distribution(0.5, 0.0, 5)
    with pytest.raises(ValueError):
        stationary_distribution(0.5, lambda x: 1.0)


def test_zero_arrivals_concentrate_at_empty():
    pi = stationary_distribution(0.0, 1.0, 5)
    np.testing.assert_allclose(pi, [1, 0, 0, 0, 0, 0])
    assert expected_queue_length(pi) == 0.0


def test_mm1_closed_forms():
    assert mm1_queue_length(0.5, 1.0) == pytest.approx(1.0)
    assert mm1_response_time(0.5, 1.0) == pytest.approx(2.0)
    # truncation hardly matters when the tail mass is tiny
    assert truncated_mm1_queue_length(0.5, 1.0, 200) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValueError):
        mm1_queue_length(1.0, 1.0)
    with pytest.raises(ValueError):
        mm1_response_time(2.0, 1.0)


# ---------------------------------------------------------------------------
# the decision process: structure


def test_transition_row_hand_example():
    # arrival 0.1, fastest rate 0.2 -> uniformisation rate 0.3; serving at
    # 0.15 from state 3 moves down w.p. 1/2, up w.p. 1/3, stays w.p. 1/6
    inst = build_instance(0.1, [0.15, 0.2], n_states=6)
    assert inst.uniformisation_rate == pytest.approx(0.3)
    policy = np.zeros(7, dtype=int)
    p = inst.transition_matrix(policy)
    assert p[3, 2] == pytest.approx(0.5)
    assert p[3, 4] == pytest.approx(1.0 / 3.0)
    assert p[3, 3] == pytest.approx(1.0 / 6.0)
    assert inst.stage_costs(policy)[3] == pytest.approx(10.0)
    # state 0 never serves; state N turns arrivals into a self-loop
    assert p[0, 0] == pytest.approx(1.0 - 1.0 / 3.0)
    assert p[0, 1] == pytest.approx(1.0 / 3.0)
    assert p[6, 5] == pytest.approx(0.5)
    assert p[6, 6] == pytest.approx(0.5)


@given(
    lam=st.floats(0.0, 2.0),
    n_actions=st.integers(1, 4),
    n=st.integers(2, 30),
)
@settings(max_examples=60, deadline=None)
def test_transition_rows_are_stochastic(lam, n_actions, n):
    grid = np.linspace(0.5, 2.5, n_actions + 1)[1:]
    import warnings as w
    with w.catch_warnings():
        w.simplefilter("ignore")
        inst = build_instance(lam, grid, n_states=n)
    rng = np.random.default_rng(0)
    policy = rng.integers(0, len(grid), n + 1)
    p = inst.transition_matrix(policy)
    assert (p >= 0).all()
    np.testing.assert_allclose(p.sum(axis=1), 1.0, rtol=1e-12)


def test_instance_validation():
    with pytest.raises(ValueError):
        build_instance(0.5, [], 5)
    with pytest.raises(ValueError):
        build_instance(0.5, [1.0, 0.9], 5)
    with pytest.raises(ValueError):
        build_instance(0.5, [0.0, 1.0], 5)
    with pytest.raises(ValueError):
        build_instance(-0.5, [1.0], 5)
    with pytest.raises(ValueError):
        build_instance(0.5, [1.0], 1)
    with pytest.warns(UserWarning):
        build_instance(1.5, [1.0], 5)


def test_policy_validation():
    inst = build_instance(0.5, [0.8, 1.2], n_states=4)
    with pytest.raises(ValueError):
        policy_evaluation(inst, np.zeros(3, dtype=int))
    with pytest.raises(ValueError):
        policy_evaluation(inst, np.full(5, 7))
    with pytest.raises(ValueError):
        policy_evaluation(inst, np.zeros(5, dtype=int), distinguished_state=9)


# ---------------------------------------------------------------------------
# evaluation against the birth-death oracle


def test_fixed_policy_matches_stationary_average():
    inst = build_instance(0.5, [1.0], n_states=200)
    policy = np.zeros(201, dtype=int)
    _, rho_bar = policy_evaluation(inst, policy)
    h_bar_t = continuous_time_average(inst, rho_bar)
    oracle = truncated_mm1_queue_length(0.5, 1.0, 200)
    assert h_bar_t == pytest.approx(oracle, abs=1e-10)
    assert h_bar_t == pytest.approx(1.0, abs=1e-6)


def test_two_rate_policy_matches_birth_death():
    # switch to the fast rate at queue length >= 3
    inst = build_instance(0.6, [0.8, 1.5], n_states=150)
    policy = np.array([0] * 3 + [1] * 148)
    _, rho_bar = policy_evaluation(inst, policy)
    h_bar_t = continuous_time_average(inst, rho_bar)
    pi = stationary_distribution(0.6, lambda x: 0.8 if x < 3 else 1.5, n_states=150)
    assert h_bar_t == pytest.approx(expected_queue_length(pi), abs=1e-9)


def test_zero_arrivals_degenerate():
    inst = build_instance(0.0, [1.0], n_states=2)
    values, rho_bar = policy_evaluation(inst, np.zeros(3, dtype=int))
    assert rho_bar == pytest.approx(0.0, abs=1e-14)
    np.testing.assert_allclose(values, [0.0, 1.0, 3.0], atol=1e-12)


def test_distinguished_state_only_shifts_values():
    inst = build_instance(0.5, [0.7, 1.3], n_states=40)
    policy = np.tile([0, 1], 21)[:41]
    v0, rho0 = policy_evaluation(inst, policy, distinguished_state=0)
    v5, rho5 = policy_evaluation(inst, policy, distinguished_state=5)
    assert rho0 == pytest.approx(rho5, abs=1e-12)
    np.testing.assert_allclose(v5, v0 - v0[5], atol=1e-9)
    assert v5[5] == 0.0


# ---------------------------------------------------------------------------
# optimisation


def solve_both(inst, tol=1e-10):
    pi_sol = solve_optimal(inst, method="policy-iteration", tol=tol)
    rvi_sol = solve_optimal(inst, method="relative-value-iteration", tol=tol)
    return pi_sol, rvi_sol


def test_methods_agree():
    inst = build_instance(0.5, [0.75, 1.0, 1.25], n_states=100,
                          penalty=(0.1, -8.0))
    a, b = solve_both(inst)
    np.testing.assert_array_equal(a.policy, b.policy)
    assert a.rho_bar == pytest.approx(b.rho_bar, rel=1e-9)
    np.testing.assert_allclose(a.relative_values, b.relative_values, atol=1e-6)
    assert a.method == "policy-iteration"
    assert b.method == "relative-value-iteration"
    assert a.residual <= 1e-8
    with pytest.raises(ValueError):
        solve_optimal(inst, method="newton")


def test_exhaustive_small_instance():
    """Brute force over every stationary deterministic policy."""
    inst = build_instance(0.6, [0.7, 1.0, 1.6], n_states=6, cost_weight=1.0,
                          penalty=(0.3, -2.0))
    best_rho = np.inf
    best_policy = None
    for assignment in itertools.product(range(3), repeat=7):
        _, rho = policy_evaluation(inst, np.array(assignment))
        if rho < best_rho:
            best_rho = rho
            best_policy = assignment
    sol = solve_optimal(inst)
    assert sol.rho_bar == pytest.approx(best_rho, rel=1e-12)
    np.testing.assert_array_equal(sol.policy, best_policy)


def test_no_penalty_prefers_fastest_service():
    inst = build_instance(0.5, [0.75, 1.0, 1.25], n_states=60)
    sol = solve_optimal(inst)
    assert (sol.policy[1:] == 2).all()


def test_wear_penalty_slows_the_empty_server():
    # wear grows with the committed rate, so an empty system idles slow
    inst = build_instance(0.1, [0.15, 0.2, 0.25, 0.3, 0.35, 0.4],
                          n_states=100, penalty=(0.1, -8.0))
    sol = solve_optimal(inst)
    assert sol.policy[0] == 0
    # and the busy states run faster than the empty one
    assert sol.policy[60] > sol.policy[0]


def test_penalty_decreasing_in_rate_prefers_fastest():
    inst = build_instance(0.5, [0.75, 1.0, 1.25], n_states=60, penalty=(5.0, 1.0))
    sol = solve_optimal(inst)
    assert (sol.policy == 2).all()


def test_cost_weight_scales_average_not_policy():
    base = build_instance(0.5, [0.7, 1.0, 1.3], n_states=80)
    scaled = build_instance(0.5, [0.7, 1.0, 1.3], n_states=80, cost_weight=3.7)
    a = solve_optimal(base)
    b = solve_optimal(scaled)
    np.testing.assert_array_equal(a.policy, b.policy)
    assert b.rho_bar == pytest.approx(3.7 * a.rho_bar, rel=1e-12)


def test_truncation_is_converged():
    r200 = solve_optimal(build_instance(0.5, [0.8, 1.0, 1.2], n_states=200))
    r400 = solve_optimal(build_instance(0.5, [0.8, 1.0, 1.2], n_states=400))
    h200 = continuous_time_average(build_instance(0.5, [0.8, 1.0, 1.2], 200), r200.rho_bar)
    h400 = continuous_time_average(build_instance(0.5, [0.8, 1.0, 1.2], 400), r400.rho_bar)
    assert abs(h400 - h200) < 1e-6


def test_implied_response_single_rate():
    inst = build_instance(0.5, [1.0], n_states=200)
    sol = solve_optimal(inst)
    # with one action this is plain M/M/1: mean response 2
    assert implied_response(sol, inst) == pytest.approx(2.0, abs=1e-6)


def test_implied_response_strips_penalty():
    with_pen = build_instance(0.5, [0.8, 1.0, 1.2], n_states=120, penalty=(2.0, -1.0))
    sol = solve_optimal(with_pen)
    direct = implied_response(sol, with_pen)
    _, rho_holding = policy_evaluation(with_pen.without_penalty(), sol.policy)
    expected = continuous_time_average(with_pen, rho_holding) / 0.5
    assert direct == pytest.approx(expected, rel=1e-12)
    with pytest.raises(ValueError):
        implied_response(sol, build_instance(0.0, [1.0], n_states=2))


def test_serialization_round_trips():
    inst = build_instance(0.5, [0.8, 1.2], n_states=30, cost_weight=2.0,
                          penalty=(0.3, -1.5))
    again = MdpInstance.from_dict(inst.to_dict())
    assert again.to_dict() == inst.to_dict()
    sol = solve_optimal(inst)
    data = json.loads(sol.to_json())
    assert data["method"] == "policy-iteration"
    assert len(data["policy"]) == 31
    assert data["rho_bar"] == pytest.approx(sol.rho_bar)
