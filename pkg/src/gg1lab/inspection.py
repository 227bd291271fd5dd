"""Inspection of in-progress services: the length-biased view.

Inspecting the server at a random epoch lands inside long services more
often than short ones, so the service interval seen on inspection is
biased: its mean exceeds the plain service mean by
beta = Var / mean, and the age and residual of the interrupted service
share the density sf(t) / mean.  Epochs come from a Poisson stream
independent of the queue so the sampling itself adds no further bias.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .distributions import DistributionSpec
from .simulator import CustomerLedger, PendingDepartureError, Trajectory


class InspectionSample(NamedTuple):
    inspect_time: float
    busy: bool
    age: float
    residual: float
    total: float


@dataclass(frozen=True)
class InspectionSamples:
    """Columnar inspection results; age/residual/total are nan at idle epochs."""

    inspect_time: np.ndarray
    busy: np.ndarray
    age: np.ndarray
    residual: np.ndarray
    total: np.ndarray

    def __len__(self) -> int:
        return len(self.inspect_time)

    def record(self, i: int) -> InspectionSample:
        return InspectionSample(
            float(self.inspect_time[i]), bool(self.busy[i]),
            float(self.age[i]), float(self.residual[i]), float(self.total[i]),
        )

    @property
    def busy_fraction(self) -> float:
        return float(np.mean(self.busy)) if len(self) else 0.0

    @property
    def ages(self) -> np.ndarray:
        return self.age[self.busy]

    @property
    def residuals(self) -> np.ndarray:
        return self.residual[self.busy]

    @property
    def totals(self) -> np.ndarray:
        return self.total[self.busy]

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write("epoch,busy,age,residual,total\n")
            for i in range(len(self)):
                fh.write(
                    f"{float(self.inspect_time[i])!r},{int(self.busy[i])},"
                    f"{float(self.age[i])!r},{float(self.residual[i])!r},"
                    f"{float(self.total[i])!r}\n"
                )


def poisson_epochs(window: tuple[float, float], rate: float, rng) -> np.ndarray:
    """Sorted epochs of a Poisson stream over the window, independent of
    the queue being inspected."""
    if rate <= 0:
        raise ValueError(f"epoch rate must be > 0, got {rate}")
    t0, t1 = window
    if t1 <= t0:
        raise ValueError(f"window {window} has nonpositive length")
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    n = int(rng.poisson(rate * (t1 - t0)))
    return np.sort(rng.uniform(t0, t1, n))


def sample_inspections(ledger: CustomerLedger, path: Trajectory, epochs) -> InspectionSamples:
    """Inspect the server at each epoch and record the in-progress service.

    At a busy epoch the sample carries the age (time since service
    start), the residual (time to completion), and the total length of
    the interrupted service; idle epochs carry nan for all three.
    """
    epochs = np.asarray(epochs, dtype=float)
    if epochs.size and (epochs.min() < path.initial_time or epochs.max() > path.final_time):
        raise ValueError(
            f"epochs must lie within the window [{path.initial_time}, {path.final_time}]"
        )
    started = ~np.isnan(ledger.service_start)
    starts = ledger.service_start[started]
    deps = ledger.departure_time[started]
    order = np.argsort(starts, kind="stable")
    starts = starts[order]
    deps = deps[order]

    idx = np.searchsorted(starts, epochs, side="right") - 1
    valid = idx >= 0
    safe = np.maximum(idx, 0)
    dep_at = deps[safe]
    if np.any(valid & np.isnan(dep_at) & (epochs >= starts[safe])):
        raise PendingDepartureError(
            "an inspection epoch falls inside a service with unresolved departure; "
            "rerun the simulation with resolve_pending=True"
        )
    busy = valid & (epochs < dep_at)
    age = np.where(busy, epochs - starts[safe], np.nan)
    residual = np.where(busy, dep_at - epochs, np.nan)
    total = np.where(busy, dep_at - starts[safe], np.nan)
    return InspectionSamples(epochs, busy, age, residual, total)


def first_epoch_per_cycle(epochs, cycles) -> np.ndarray:
    """Thin an epoch stream to at most one epoch per renewal cycle (the
    first falling in each), for estimates that need cycle-independent
    observations."""
    epochs = np.asarray(epochs, dtype=float)
    lo = np.searchsorted(epochs, cycles.busy_start, side="left")
    hi = np.searchsorted(epochs, cycles.cycle_end, side="left")
    return epochs[lo[lo < hi]]


def expected_age(spec: DistributionSpec) -> float:
    """Mean age of the interrupted service: second moment over twice the mean."""
    return spec.second_moment() / (2.0 * spec.mean())


def expected_residual(spec: DistributionSpec) -> float:
    """Mean residual life; equals the mean age by symmetry of the
    stationary in-progress interval."""
    return expected_age(spec)


def expected_total(spec: DistributionSpec) -> float:
    """Mean length of the interrupted service (length-biased mean)."""
    return spec.second_moment() / spec.mean()


def bias(spec: DistributionSpec) -> float:
    """Excess of the inspected service mean over the plain mean:
    variance over mean, zero only for the deterministic kind."""
    return spec.variance() / spec.mean()


def analytic_pdfs(spec: DistributionSpec, t) -> dict[str, np.ndarray]:
    """Densities of the inspected quantities at the points t.

    f_age and f_residual share the form sf(t) / mean and exist for every
    kind; f_observed_total is t * pdf(t) / mean and needs a density, so
    it is omitted from the result for the deterministic kind.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("densities are defined for t >= 0 only")
    m = spec.mean()
    f_age = np.asarray(spec.sf(t), dtype=float) / m
    out = {"f_age": f_age, "f_residual": f_age.copy()}
    if spec.has_density:
        out["f_observed_total"] = t * np.asarray(spec.pdf(t), dtype=float) / m
    return out


def age_cdf(spec: DistributionSpec, t) -> np.ndarray:
    """Distribution function of the age (and residual): the integral of
    sf over [0, t] scaled by the mean, available in closed form as the
    truncated mean."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("age cdf is defined for t >= 0 only")
    return spec.truncated_mean(t) / spec.mean()


def total_cdf(spec: DistributionSpec, t) -> np.ndarray:
    """Distribution function of the inspected (length-biased) service
    length: E[X; X <= t] / E[X], recovered from the truncated mean."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("total cdf is defined for t >= 0 only")
    return (spec.truncated_mean(t) - t * spec.sf(t)) / spec.mean()


def pdf_curve_csv(spec: DistributionSpec, t, path) -> None:
    """Write (t, f_age, f_residual[, f_observed_total]) rows for plotting."""
    t = np.asarray(t, dtype=float)
    curves = analytic_pdfs(spec, t)
    names = sorted(curves)
    with open(path, "w", newline="") as fh:
        fh.write("t," + ",".join(names) + "\n")
        for i, ti in enumerate(t):
            vals = ",".join(repr(float(curves[n][i])) for n in names)
            fh.write(f"{float(ti)!r},{vals}\n")


def empirical_bias(samples: InspectionSamples, spec: DistributionSpec) -> float:
    """mean(inspected totals) - mean(service): the sampled counterpart of bias()."""
    totals = samples.totals
    if totals.size == 0:
        raise ValueError("no busy epochs; cannot estimate bias")
    return float(math.fsum(totals.tolist()) / totals.size - spec.mean())
