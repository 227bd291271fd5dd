"""Average-cost control of the service rate in an M/M/1 queue.

The continuous-time chain is uniformised at the fastest total event
rate, turning rate control into a discrete-time MDP on queue lengths
{0..N}.  Holding cost accrues per customer per unit time; an optional
wear penalty k0 * exp(-k1 * mu) per unit time charges for running the
server at rate mu, including while idle.  The average-cost Bellman
equation is solved in the standard relative-value form

    J(x) = cost(x, a) - rho_bar + sum_y P(y | x, a) J(y),  J(x_tilde) = 0,

by policy iteration or relative value iteration.  rho_bar is cost per
uniformised stage; multiplying by the uniformisation constant recovers
cost per unit time.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass

import numpy as np

DEFAULT_TOL = 1e-10
MAX_ITERATIONS = 200_000


@dataclass(frozen=True)
class MdpInstance:
    """Uniformised service-rate-control MDP on states {0..N}."""

    arrival_rate: float
    action_grid: np.ndarray
    n_states: int
    cost_weight: float = 1.0
    penalty: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        grid = np.asarray(self.action_grid, dtype=float)
        if grid.size == 0:
            raise ValueError("action grid must be nonempty")
        if np.any(np.diff(grid) <= 0):
            raise ValueError("action grid must be strictly increasing")
        if np.any(grid <= 0):
            raise ValueError("service rates must be positive")
        object.__setattr__(self, "action_grid", grid)
        if self.arrival_rate < 0:
            raise ValueError(f"arrival rate must be nonnegative, got {self.arrival_rate}")
        if self.n_states < 2:
            raise ValueError(f"need at least 3 states (N >= 2), got N={self.n_states}")
        if self.cost_weight < 0:
            raise ValueError("cost weight must be nonnegative")
        if self.arrival_rate >= grid[-1]:
            warnings.warn(
                f"arrival rate {self.arrival_rate} is not below the fastest service "
                f"rate {grid[-1]}; no stable policy exists",
                stacklevel=3,
            )

    @property
    def uniformisation_rate(self) -> float:
        return self.arrival_rate + float(self.action_grid[-1])

    @property
    def n_actions(self) -> int:
        return len(self.action_grid)

    @property
    def states(self) -> np.ndarray:
        return np.arange(self.n_states + 1)

    def transition_matrix(self, policy: np.ndarray) -> np.ndarray:
        """Row-stochastic matrix of the chain under a policy (action
        index per state).  State 0 has no service transition; the
        arrival at state N folds into the diagonal."""
        lam = self.arrival_rate
        big = self.uniformisation_rate
        n = self.n_states
        mu = self.action_grid[np.asarray(policy)]
        p = np.zeros((n + 1, n + 1))
        rows = np.arange(n + 1)
        p[rows[:-1], rows[:-1] + 1] = lam / big
        p[rows[1:], rows[1:] - 1] = mu[1:] / big
        # the diagonal absorbs the slack; rounding in lam/big + mu/big can
        # push the sum a hair past one, so clamp at exact zero
        p[rows, rows] = np.maximum(1.0 - p.sum(axis=1), 0.0)
        return p

    def stage_costs(self, policy: np.ndarray) -> np.ndarray:
        """Cost per uniformised stage under a policy: holding plus the
        optional wear penalty, both divided by the uniformisation rate."""
        k0, k1 = self.penalty
        mu = self.action_grid[np.asarray(policy)]
        per_time = self.cost_weight * self.states + k0 * np.exp(-k1 * mu)
        return per_time / self.uniformisation_rate

    def without_penalty(self) -> "MdpInstance":
        return MdpInstance(
            self.arrival_rate, self.action_grid, self.n_states, self.cost_weight, (0.0, 0.0)
        )

    def to_dict(self) -> dict:
        return {
            "arrival_rate": self.arrival_rate,
            "action_grid": self.action_grid.tolist(),
            "n_states": self.n_states,
            "cost_weight": self.cost_weight,
            "penalty": list(self.penalty),
            "uniformisation_rate": self.uniformisation_rate,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "MdpInstance":
        return cls(
            arrival_rate=data["arrival_rate"],
            action_grid=np.asarray(data["action_grid"], dtype=float),
            n_states=int(data["n_states"]),
            cost_weight=data.get("cost_weight", 1.0),
            penalty=tuple(data.get("penalty", (0.0, 0.0))),
        )


def build_instance(arrival_rate, mu_grid, n_states, cost_weight=1.0, penalty=None) -> MdpInstance:
    return MdpInstance(
        arrival_rate=arrival_rate,
        action_grid=np.asarray(mu_grid, dtype=float),
        n_states=int(n_states),
        cost_weight=cost_weight,
        penalty=(0.0, 0.0) if penalty is None else (float(penalty[0]), float(penalty[1])),
    )


@dataclass
class MdpSolution:
    policy: np.ndarray
    relative_values: np.ndarray
    rho_bar: float
    iterations: int
    residual: float
    method: str
    distinguished_state: int = 0

    def to_dict(self) -> dict:
        return {
            "policy": np.asarray(self.policy).tolist(),
            "relative_values": np.asarray(self.relative_values).tolist(),
            "rho_bar": self.rho_bar,
            "iterations": self.iterations,
            "residual": self.residual,
            "method": self.method,
            "distinguished_state": self.distinguished_state,
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, **kwargs)


def continuous_time_average(instance: MdpInstance, rho_bar: float) -> float:
    """Convert cost per uniformised stage back to cost per unit time."""
    return rho_bar * instance.uniformisation_rate


def policy_evaluation(
    instance: MdpInstance, policy, distinguished_state: int = 0
) -> tuple[np.ndarray, float]:
    """Relative values and average stage cost of a fixed policy.

    Solves (I - P) J + rho_bar * 1 = cost with J pinned to zero at the
    distinguished state, by replacing that column of (I - P) with ones
    so rho_bar takes its slot in the unknown vector.
    """
    policy = np.asarray(policy)
    if policy.shape != (instance.n_states + 1,):
        raise ValueError(f"policy must assign an action to each of the {instance.n_states + 1} states")
    if np.any(policy < 0) or np.any(policy >= instance.n_actions):
        raise ValueError("policy contains out-of-range action indices")
    x0 = int(distinguished_state)
    if not 0 <= x0 <= instance.n_states:
        raise ValueError(f"distinguished state {x0} outside state space")
    p = instance.transition_matrix(policy)
    cost = instance.stage_costs(policy)
    m = np.eye(len(cost)) - p
    m[:, x0] = 1.0
    try:
        y = np.linalg.solve(m, cost)
    except np.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError(
            f"policy evaluation system is singular (policy={policy.tolist()}): {exc}"
        ) from exc
    rho_bar = float(y[x0])
    values = y.copy()
    values[x0] = 0.0
    return values, rho_bar


def _greedy(instance: MdpInstance, values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """One-step lookahead: per state, the action minimising stage cost
    plus expected next value, and that minimal q-value."""
    lam = instance.arrival_rate
    big = instance.uniformisation_rate
    k0, k1 = instance.penalty
    n = instance.n_states
    states = instance.states
    up = np.minimum(states + 1, n)
    down = np.maximum(states - 1, 0)
    # q[x, a]: service applies only at x >= 1; at x = N the arrival stays put.
    mu = instance.action_grid[None, :]
    serv = np.where(states[:, None] >= 1, mu, 0.0)
    p_up = np.full(n + 1, lam / big)
    p_down = serv / big
    p_stay = 1.0 - p_up[:, None] - p_down
    q = (
        (instance.cost_weight * states[:, None] + k0 * np.exp(-k1 * mu)) / big
        + p_up[:, None] * values[up][:, None]
        + p_down * values[down][:, None]
        + p_stay * values[:, None]
    )
    best = np.argmin(q, axis=1)
    return best, q[np.arange(n + 1), best]


def solve_optimal(
    instance: MdpInstance,
    method: str = "policy-iteration",
    tol: float = DEFAULT_TOL,
    distinguished_state: int = 0,
) -> MdpSolution:
    """Minimise the long-run average cost over stationary policies.

    policy-iteration alternates exact evaluation with greedy
    improvement and is the reference solver; relative-value-iteration
    reaches the same fixed point by successive approximation.
    """
    if method == "policy-iteration":
        return _policy_iteration(instance, tol, distinguished_state)
    if method == "relative-value-iteration":
        return _relative_value_iteration(instance, tol, distinguished_state)
    raise ValueError(f"unknown method {method!r}")


def _bellman_residual(instance, values, rho_bar) -> float:
    _, q = _greedy(instance, values)
    return float(np.max(np.abs(q - rho_bar - values)))


def _policy_iteration(instance, tol, x0) -> MdpSolution:
    policy = np.full(instance.n_states + 1, instance.n_actions - 1)
    values, rho_bar = policy_evaluation(instance, policy, x0)
    for it in range(1, 1000):
        improved, _ = _greedy(instance, values)
        new_values, new_rho = policy_evaluation(instance, improved, x0)
        if np.array_equal(improved, policy) or abs(new_rho - rho_bar) <= tol * max(1.0, abs(rho_bar)):
            values, rho_bar, policy = new_values, new_rho, improved
            break
        values, rho_bar, policy = new_values, new_rho, improved
    else:
        raise RuntimeError("policy iteration failed to converge within 1000 sweeps")
    return MdpSolution(
        policy=policy,
        relative_values=values,
        rho_bar=rho_bar,
        iterations=it,
        residual=_bellman_residual(instance, values, rho_bar),
        method="policy-iteration",
        distinguished_state=x0,
    )


def _relative_value_iteration(instance, tol, x0) -> MdpSolution:
    values = np.zeros(instance.n_states + 1)
    rho_bar = 0.0
    for it in range(1, MAX_ITERATIONS + 1):
        policy, q = _greedy(instance, values)
        rho_bar = float(q[x0])
        new_values = q - rho_bar
        gap = float(np.max(np.abs(new_values - values)))
        values = new_values
        if gap <= tol:
            break
    else:
        raise RuntimeError(
            f"relative value iteration failed to reach tol={tol} in {MAX_ITERATIONS} sweeps"
        )
    return MdpSolution(
        policy=policy,
        relative_values=values,
        rho_bar=rho_bar,
        iterations=it,
        residual=_bellman_residual(instance, values, rho_bar),
        method="relative-value-iteration",
        distinguished_state=x0,
    )


def implied_response(solution: MdpSolution, instance: MdpInstance) -> float:
    """Per-customer response implied by the solved policy's holding cost.

    The wear penalty is not part of holding cost, so the policy is
    re-evaluated with the penalty stripped before applying the
    rate conversion H_bar_t / lambda.
    """
    if instance.arrival_rate <= 0:
        raise ValueError("implied response needs a positive arrival rate")
    holding_only = instance.without_penalty()
    _, rho_holding = policy_evaluation(
        holding_only, solution.policy, solution.distinguished_state
    )
    h_bar_t = continuous_time_average(holding_only, rho_holding)
    return h_bar_t / instance.arrival_rate
