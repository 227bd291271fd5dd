"""Event-driven single-server queue simulation.

One server, unbounded buffer, work-conserving and non-preemptive.
Service durations are drawn when service starts, so the queue-length
path over time is identical across service disciplines on a shared
seed; only the customer-to-departure assignment changes.

The observation window is [warmup, warmup + horizon].  The system
starts empty at time zero; customers present when the window opens are
flagged ``pre_window``.  Customers still in the system when the window
closes are by default resolved by continuing the simulation (those
later events never extend the recorded path).
"""

from __future__ import annotations

import math
from array import array
from collections import deque
from dataclasses import dataclass

import numpy as np

from .distributions import DistributionSpec

DISCIPLINES = ("fcfs", "lcfs", "random-order")

_SAMPLE_BLOCK = 16384

# server-slot sentinels: no one in service / an unledgered drain arrival
_IDLE = -1
_DRAIN = -2


class EventCapExceeded(RuntimeError):
    """Raised when a run would exceed its event budget.

    Carries partial progress so callers can report how far the run got.
    """

    def __init__(self, message: str, *, events: int, time_reached: float, queue_length: int):
        super().__init__(message)
        self.events = events
        self.time_reached = time_reached
        self.queue_length = queue_length


class PendingDepartureError(RuntimeError):
    """A computation needed departure times that were never resolved."""


def _normalise_discipline(name: str) -> int:
    key = name.strip().lower()
    if key == "fcfs":
        return 0
    if key == "lcfs":
        return 1
    if key in ("random-order", "random"):
        return 2
    raise ValueError(f"unknown discipline {name!r}; expected one of {DISCIPLINES}")


@dataclass(frozen=True)
class CustomerRecord:
    """Per-customer view of one ledger row."""

    id: int
    arrival_time: float
    service_start: float
    service_duration: float
    departure_time: float
    pre_window: bool


@dataclass
class CustomerLedger:
    """Columnar per-customer ledger for every arrival up to the window end.

    Times are nan where the corresponding event never happened (service
    never started, or departure unresolved).  Rows are in arrival order
    and include warmup-era customers; ``in_window_mask`` selects the
    population the window functionals are defined over.
    """

    arrival_time: np.ndarray
    service_start: np.ndarray
    service_duration: np.ndarray
    departure_time: np.ndarray
    pre_window: np.ndarray
    window: tuple[float, float]

    def __len__(self) -> int:
        return len(self.arrival_time)

    def record(self, i: int) -> CustomerRecord:
        return CustomerRecord(
            id=i,
            arrival_time=float(self.arrival_time[i]),
            service_start=float(self.service_start[i]),
            service_duration=float(self.service_duration[i]),
            departure_time=float(self.departure_time[i]),
            pre_window=bool(self.pre_window[i]),
        )

    def in_window_mask(self, up_to: float | None = None) -> np.ndarray:
        """Customers counted by the window: present at the open, or arriving
        inside [open, up_to]."""
        t_initial, t_final = self.window
        if up_to is None:
            up_to = t_final
        arrivals = (self.arrival_time >= t_initial) & (self.arrival_time <= up_to)
        return self.pre_window | arrivals

    def pending_mask(self, at: float | None = None) -> np.ndarray:
        """In-window customers whose departure falls after ``at`` (or is unresolved)."""
        if at is None:
            at = self.window[1]
        unresolved = np.isnan(self.departure_time)
        return self.in_window_mask() & (unresolved | (self.departure_time > at))

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write("id,t_A,svc_start,t_mu,t_D,pre_window\n")
            for i in range(len(self)):
                fh.write(
                    f"{i},{float(self.arrival_time[i])!r},{float(self.service_start[i])!r},"
                    f"{float(self.service_duration[i])!r},{float(self.departure_time[i])!r},"
                    f"{int(self.pre_window[i])}\n"
                )


@dataclass
class Trajectory:
    """Piecewise-constant queue-length path over the observation window.

    ``initial_count`` is the queue length just before ``initial_time``;
    events carry the post-event level and lie in [initial_time,
    final_time] with strictly increasing timestamps (simultaneous
    arrival/departure pairs are coalesced into their net effect).
    """

    initial_time: float
    final_time: float
    initial_count: int
    times: np.ndarray
    counts: np.ndarray
    seed: int

    def __post_init__(self) -> None:
        self.times = np.asarray(self.times, dtype=float)
        self.counts = np.asarray(self.counts, dtype=np.int64)

    @property
    def window_length(self) -> float:
        return self.final_time - self.initial_time

    def segments(self, up_to: float | None = None) -> tuple[np.ndarray, np.ndarray]:
        """(boundaries, levels): levels[i] holds on [boundaries[i], boundaries[i+1])."""
        if up_to is None:
            up_to = self.final_time
        if not (self.initial_time <= up_to <= self.final_time):
            raise ValueError(
                f"up_to={up_to} outside window [{self.initial_time}, {self.final_time}]"
            )
        cut = int(np.searchsorted(self.times, up_to, side="right"))
        bounds = np.concatenate(([self.initial_time], self.times[:cut], [up_to]))
        levels = np.concatenate(([self.initial_count], self.counts[:cut]))
        return bounds, levels

    def queue_length_at(self, t: float) -> int:
        if not (self.initial_time <= t <= self.final_time):
            raise ValueError(f"t={t} outside window")
        i = int(np.searchsorted(self.times, t, side="right"))
        return int(self.counts[i - 1]) if i else self.initial_count

    def busy_time(self, up_to: float | None = None) -> float:
        bounds, levels = self.segments(up_to)
        widths = np.diff(bounds)
        return float(np.sum(widths[levels > 0]))

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write("tau,n\n")
            fh.write(f"{float(self.initial_time)!r},{int(self.initial_count)}\n")
            for t, n in zip(self.times, self.counts):
                fh.write(f"{float(t)!r},{int(n)}\n")


def simulate(
    arrival: DistributionSpec,
    service: DistributionSpec,
    discipline: str = "fcfs",
    warmup: float = 0.0,
    horizon: float = 1000.0,
    seed: int = 0,
    *,
    resolve_pending: bool = True,
    event_cap: int = 100_000_000,
) -> tuple[Trajectory, CustomerLedger]:
    """Simulate the queue and return its path and per-customer ledger.

    Args:
        arrival: inter-arrival duration distribution.
        service: service duration distribution (drawn at service start).
        discipline: "fcfs", "lcfs" or "random-order".
        warmup: window opens at this time; the system starts empty at 0.
        horizon: window length; the window is [warmup, warmup + horizon].
        seed: master seed; arrival, service and discipline draws come
            from independent substreams spawned from it.
        resolve_pending: continue past the window end until every
            customer that arrived inside it has departed.
        event_cap: hard bound on processed events.

    Ties between an arrival and a departure at the same instant are
    broken arrival-first.
    """
    if warmup < 0:
        raise ValueError(f"warmup must be >= 0, got {warmup}")
    if horizon <= 0:
        raise ValueError(f"horizon must be > 0, got {horizon}")
    mode = _normalise_discipline(discipline)
    t_initial = float(warmup)
    t_final = t_initial + float(horizon)

    arr_ss, svc_ss, disc_ss = np.random.SeedSequence(seed).spawn(3)
    arr_rng = np.random.default_rng(arr_ss)
    svc_rng = np.random.default_rng(svc_ss)
    disc_rng = np.random.default_rng(disc_ss)

    arr_buf = arrival.sample(arr_rng, _SAMPLE_BLOCK).tolist()
    arr_i = 1
    svc_buf = service.sample(svc_rng, _SAMPLE_BLOCK).tolist()
    svc_i = 0
    pick_buf: list[float] = []
    pick_i = 0

    # ledger columns (compact typed arrays; appends dominate the hot loop)
    col_arr = array("d")
    col_start = array("d")
    col_dur = array("d")
    col_dep = array("d")

    ev_times = array("d")
    ev_counts = array("q")

    queue: deque[int] | list[int] = deque() if mode == 0 else []
    nan = math.nan
    inf = math.inf
    t_arr = arr_buf[0]
    t_dep = inf
    serving = _IDLE
    n = 0
    initial_count = 0
    pending = 0  # undeparted customers with arrival_time <= t_final
    events = 0

    while True:
        if t_arr <= t_dep:
            t = t_arr
            is_arrival = True
        else:
            t = t_dep
            is_arrival = False
        if t > t_final and (pending == 0 or not resolve_pending):
            break
        events += 1
        if events > event_cap:
            raise EventCapExceeded(
                f"event cap {event_cap} exceeded at t={t:.6g} (queue length {n})",
                events=events - 1,
                time_reached=t,
                queue_length=n,
            )

        if is_arrival:
            if t <= t_final:
                cid = len(col_arr)
                col_arr.append(t)
                col_start.append(nan)
                col_dur.append(nan)
                col_dep.append(nan)
                pending += 1
            else:
                # arrivals during the post-window drain only contend for the
                # server; they are dropped from the ledger, so keep no row
                cid = _DRAIN
            if serving == _IDLE:
                if svc_i == _SAMPLE_BLOCK:
                    svc_buf = service.sample(svc_rng, _SAMPLE_BLOCK).tolist()
                    svc_i = 0
                dur = svc_buf[svc_i]
                svc_i += 1
                if cid >= 0:
                    col_start[cid] = t
                    col_dur[cid] = dur
                t_dep = t + dur
                serving = cid
            else:
                queue.append(cid)
            n += 1
            if arr_i == _SAMPLE_BLOCK:
                arr_buf = arrival.sample(arr_rng, _SAMPLE_BLOCK).tolist()
                arr_i = 0
            t_arr = t + arr_buf[arr_i]
            arr_i += 1
        else:
            if serving >= 0:
                col_dep[serving] = t
                pending -= 1
            n -= 1
            if queue:
                if mode == 0:
                    nxt = queue.popleft()
                elif mode == 1:
                    nxt = queue.pop()
                else:
                    if pick_i == len(pick_buf):
                        pick_buf = disc_rng.random(_SAMPLE_BLOCK).tolist()
                        pick_i = 0
                    k = int(pick_buf[pick_i] * len(queue))
                    pick_i += 1
                    if k >= len(queue):
                        k = len(queue) - 1
                    nxt = queue[k]
                    queue[k] = queue[-1]
                    queue.pop()
                if svc_i == _SAMPLE_BLOCK:
                    svc_buf = service.sample(svc_rng, _SAMPLE_BLOCK).tolist()
                    svc_i = 0
                dur = svc_buf[svc_i]
                svc_i += 1
                if nxt >= 0:
                    col_start[nxt] = t
                    col_dur[nxt] = dur
                t_dep = t + dur
                serving = nxt
            else:
                serving = _IDLE
                t_dep = inf

        if t < t_initial:
            initial_count = n
        elif t <= t_final:
            ev_times.append(t)
            ev_counts.append(n)

    times, counts = _canonical_path(ev_times, ev_counts, initial_count)
    trajectory = Trajectory(
        initial_time=t_initial,
        final_time=t_final,
        initial_count=initial_count,
        times=times,
        counts=counts,
        seed=seed,
    )

    arr_a = np.asarray(col_arr, dtype=float)
    keep = int(np.searchsorted(arr_a, t_final, side="right"))
    arr_a = arr_a[:keep]
    start_a = np.asarray(col_start[:keep], dtype=float)
    dur_a = np.asarray(col_dur[:keep], dtype=float)
    dep_a = np.asarray(col_dep[:keep], dtype=float)
    pre = (arr_a < t_initial) & (np.isnan(dep_a) | (dep_a >= t_initial))
    ledger = CustomerLedger(
        arrival_time=arr_a,
        service_start=start_a,
        service_duration=dur_a,
        departure_time=dep_a,
        pre_window=pre,
        window=(t_initial, t_final),
    )
    return trajectory, ledger


def _canonical_path(ev_times, ev_counts, initial_count: int) -> tuple[np.ndarray, np.ndarray]:
    """Keep the last event of each timestamp, then drop no-op levels."""
    times = np.asarray(ev_times, dtype=float)
    counts = np.asarray(ev_counts, dtype=np.int64)
    if times.size:
        keep = np.ones(times.size, dtype=bool)
        keep[:-1] = times[1:] != times[:-1]
        times = times[keep]
        counts = counts[keep]
        prev = np.concatenate(([initial_count], counts[:-1]))
        changed = counts != prev
        times = times[changed]
        counts = counts[changed]
    return times, counts


def _lindley(arrival_times, service_durations) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(arrival_times, dtype=float)
    s = np.asarray(service_durations, dtype=float)
    if a.shape != s.shape or a.ndim != 1:
        raise ValueError("arrival_times and service_durations must be 1-d and equal length")
    if a.size and a[0] < 0:
        raise ValueError("arrival_times must be nonnegative")
    if np.any(np.diff(a) < 0):
        raise ValueError("arrival_times must be nondecreasing")
    delays = np.empty_like(a)
    departures = np.empty_like(a)
    dep_prev = -math.inf
    for j, (aj, sj) in enumerate(zip(a.tolist(), s.tolist())):
        start = dep_prev if dep_prev > aj else aj
        delays[j] = start - aj
        dep_prev = start + sj
        departures[j] = dep_prev
    return delays, departures


def lindley_fcfs(arrival_times, service_durations) -> np.ndarray:
    """Queueing delays under first-come-first-served via the standard
    recursion: each delay is the previous departure's overhang past the
    current arrival, floored at zero.

    Departure times reconstruct as arrival + delay + service; that sum
    can differ from ``fcfs_departure_times`` by one ulp where the
    overhang subtraction rounds, so exact comparisons should use the
    departure form.
    """
    delays, _ = _lindley(arrival_times, service_durations)
    return delays


def fcfs_departure_times(arrival_times, service_durations) -> np.ndarray:
    """Departure times implied by the delay recursion, computed with the
    same float operations the event engine performs (service start is
    the max of the previous departure and the arrival; departure adds
    the duration once).  Bitwise comparable against engine output on
    shared sampled durations.
    """
    _, departures = _lindley(arrival_times, service_durations)
    return departures
