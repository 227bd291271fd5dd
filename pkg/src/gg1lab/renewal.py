"""Renewal-cycle decomposition and regenerative estimators.

A renewal point is an arrival into an empty system.  A cycle runs from
one renewal point to the next: a busy period followed by the idle
period that ends it.  A cycle counts as complete only when its
terminating renewal point is observed inside the window; partial
leading and trailing fragments are kept for inspection but excluded
from every estimator, since the estimators treat cycles as i.i.d.

Estimators are ratio-of-sums (total reward over total length), the
consistent form for a reward/length ratio, and therefore pool across
seeds by plain concatenation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .simulator import CustomerLedger, PendingDepartureError, Trajectory


@dataclass(frozen=True)
class RenewalCycles:
    """Complete cycles of a single trajectory, plus any partial fragments.

    Arrays are aligned per cycle: busy on [busy_start, busy_end), idle
    on [busy_end, cycle_end).  Fragments are (start, end) spans of
    window time not covered by a complete cycle.
    """

    busy_start: np.ndarray
    busy_end: np.ndarray
    cycle_end: np.ndarray
    leading_fragment: tuple[float, float] | None = None
    trailing_fragment: tuple[float, float] | None = None
    complete_only: bool = True

    def __post_init__(self):
        for name in ("busy_start", "busy_end", "cycle_end"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        if not (len(self.busy_start) == len(self.busy_end) == len(self.cycle_end)):
            raise ValueError("cycle arrays must be aligned")
        if np.any(self.busy_end < self.busy_start) or np.any(self.cycle_end < self.busy_end):
            raise ValueError("cycle boundaries out of order")

    def __len__(self) -> int:
        return len(self.busy_start)

    @property
    def busy_lengths(self) -> np.ndarray:
        return self.busy_end - self.busy_start

    @property
    def idle_lengths(self) -> np.ndarray:
        return self.cycle_end - self.busy_end

    @property
    def cycle_lengths(self) -> np.ndarray:
        return self.cycle_end - self.busy_start

    def to_csv(self, path, rewards=None, counts=None) -> None:
        n = len(self)
        rewards = np.zeros(n) if rewards is None else np.asarray(rewards, dtype=float)
        counts = np.zeros(n, dtype=int) if counts is None else np.asarray(counts)
        with open(path, "w", newline="") as fh:
            fh.write("cycle_index,busy_len,idle_len,reward,count\n")
            for i in range(n):
                fh.write(
                    f"{i},{float(self.busy_lengths[i])!r},{float(self.idle_lengths[i])!r},"
                    f"{float(rewards[i])!r},{int(counts[i])}\n"
                )


def detect_cycles(path: Trajectory) -> RenewalCycles:
    """Split a trajectory into renewal cycles.

    Renewal points are the event times where the queue length steps
    from 0 to 1.  The stretch before the first renewal point (which may
    be a partial busy period, pure idle, or the whole window) becomes
    the leading fragment; the stretch after the last one becomes the
    trailing fragment unless a further renewal closes it.
    """
    times = path.times
    counts = path.counts
    prev = np.concatenate(([path.initial_count], counts[:-1]))
    renewal = times[(counts == 1) & (prev == 0)]
    if len(renewal) < 2:
        lead = (path.initial_time, path.final_time) if len(renewal) == 0 else (path.initial_time, renewal[0])
        trail = None if len(renewal) == 0 else (renewal[0], path.final_time)
        return RenewalCycles(
            np.empty(0), np.empty(0), np.empty(0),
            leading_fragment=None if lead[0] == lead[1] else lead,
            trailing_fragment=trail,
        )
    starts = renewal[:-1]
    ends = renewal[1:]
    # Busy period of each cycle ends at the first return to an empty
    # system after its opening renewal point.
    empty_times = times[counts == 0]
    busy_end = empty_times[np.searchsorted(empty_times, starts, side="left")]
    lead = (path.initial_time, renewal[0])
    return RenewalCycles(
        starts, busy_end, ends,
        leading_fragment=None if lead[0] == lead[1] else lead,
        trailing_fragment=(renewal[-1], path.final_time),
    )


@dataclass
class CycleRewards:
    """Per-cycle reward tallies over one trajectory.

    holding: cost accumulated by the queue-length integral within the
    cycle; response: summed sojourn cost of the customers arriving in
    the cycle (each such sojourn lies inside its cycle, because cycles
    begin and end with an empty system); count: number of arrivals.
    """

    holding: np.ndarray
    response: np.ndarray
    count: np.ndarray
    cost_weight: float = 1.0


def cycle_rewards(
    cycles: RenewalCycles,
    path: Trajectory,
    ledger: CustomerLedger,
    cost_weight: float = 1.0,
) -> CycleRewards:
    """Tally holding cost, response cost, and arrival count per cycle.

    Holding comes from the trajectory, response from the ledger, so the
    two stay independent routes to the same quantity.
    """
    n = len(cycles)
    if n == 0:
        return CycleRewards(np.empty(0), np.empty(0), np.empty(0, dtype=int), cost_weight)
    bounds, levels = path.segments()
    cum = np.concatenate(([0.0], np.cumsum(levels * np.diff(bounds))))

    def integral_at(t: np.ndarray) -> np.ndarray:
        i = np.searchsorted(bounds, t, side="right") - 1
        i = np.clip(i, 0, len(levels) - 1)
        return cum[i] + levels[i] * (t - bounds[i])

    holding = cost_weight * (integral_at(cycles.cycle_end) - integral_at(cycles.busy_start))

    arr = ledger.arrival_time
    dep = ledger.departure_time
    unresolved = np.isnan(dep)
    if unresolved.any() and arr[unresolved].min() < cycles.cycle_end[-1]:
        # cannot happen for cycles detected on this path: anyone arriving
        # inside a complete cycle also departs inside it
        raise PendingDepartureError(
            "cycle rewards need resolved departures inside the cycles"
        )
    lo = np.searchsorted(arr, cycles.busy_start, side="left")
    hi = np.searchsorted(arr, cycles.cycle_end, side="left")
    sojourn_cum = np.concatenate(([0.0], np.cumsum(dep - arr)))
    response = cost_weight * (sojourn_cum[hi] - sojourn_cum[lo])
    return CycleRewards(holding, response, hi - lo, cost_weight)


def renewal_time_average(cycles: RenewalCycles, reward_per_cycle) -> float:
    """Total reward over total cycle length (reward per unit time)."""
    rewards = np.asarray(reward_per_cycle, dtype=float)
    if len(cycles) == 0:
        raise ValueError("time average needs at least one complete cycle")
    if len(rewards) != len(cycles):
        raise ValueError(f"{len(rewards)} rewards for {len(cycles)} cycles")
    return math.fsum(rewards.tolist()) / math.fsum(cycles.cycle_lengths.tolist())


def renewal_count_average(cycles: RenewalCycles, reward_per_cycle, count_per_cycle) -> float:
    """Total reward over total customer count (reward per customer)."""
    rewards = np.asarray(reward_per_cycle, dtype=float)
    counts = np.asarray(count_per_cycle)
    if len(cycles) == 0:
        raise ValueError("count average needs at least one complete cycle")
    if not (len(rewards) == len(counts) == len(cycles)):
        raise ValueError("rewards and counts must align with cycles")
    total_count = int(counts.sum())
    if total_count <= 0:
        raise ValueError("count average needs a positive total count")
    return math.fsum(rewards.tolist()) / total_count


def utilization(cycles: RenewalCycles) -> float:
    """Fraction of cycle time the server is busy."""
    if len(cycles) == 0:
        raise ValueError("utilization needs at least one complete cycle")
    return math.fsum(cycles.busy_lengths.tolist()) / math.fsum(cycles.cycle_lengths.tolist())


def pooled_time_average(batches) -> float:
    """Ratio-of-sums over several (cycles, rewards) batches, e.g. one
    batch per seed.  Equals the estimator applied to the pooled cycles."""
    num = 0.0
    den = 0.0
    used = 0
    for cycles, rewards in batches:
        rewards = np.asarray(rewards, dtype=float)
        if len(rewards) != len(cycles):
            raise ValueError("rewards must align with cycles in every batch")
        num += math.fsum(rewards.tolist())
        den += math.fsum(cycles.cycle_lengths.tolist())
        used += len(cycles)
    if used == 0:
        raise ValueError("time average needs at least one complete cycle")
    return num / den


class UnobservedFinalEstimate(NamedTuple):
    verbatim: float
    guarded: float


def expected_unobserved_final(
    rho: float, mean_service: float, cv2_service: float, n_bar: float
) -> UnobservedFinalEstimate:
    """Steady-state estimate of the response time still owed to customers
    present when observation stops.

    The residual of the in-progress service contributes
    rho * mean * (cv2 + 1) / 2 and the waiting customers contribute a
    full service each, (n_bar - 1) * mean.  The verbatim form applies
    that literally; in light traffic n_bar can drop below 1 and drive
    it negative, so the guarded form clamps the second term at zero.
    Both are returned.
    """
    if min(rho, mean_service, n_bar) < 0 or cv2_service < 0:
        raise ValueError("inputs must be nonnegative")
    residual = rho * mean_service * (cv2_service + 1.0) / 2.0
    return UnobservedFinalEstimate(
        verbatim=residual + (n_bar - 1.0) * mean_service,
        guarded=residual + max(n_bar - 1.0, 0.0) * mean_service,
    )
