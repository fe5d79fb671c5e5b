"""Closed-form resource and reuse bounds for homogenizers, and the fidelity-gap bound."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import qcore
from .collision import HomogenizerConfig, Task, TaskKind, error_metric, recurrence_series


class BoundError(ValueError):
    """Arguments outside the domain of a bound."""


class InfeasibleBound(BoundError):
    """The requested reuse cannot meet the error budget at any reservoir size."""


class UnboundedReuse(BoundError):
    """Zero coupling leaves the reservoir untouched, so reuse is unlimited."""


_TIE = 1e-12


def _ceil(x: float) -> int:
    k = round(x)
    if abs(x - k) <= _TIE * max(1.0, abs(x)):
        return int(k)
    return int(math.ceil(x))


def _floor(x: float) -> int:
    k = round(x)
    if abs(x - k) <= _TIE * max(1.0, abs(x)):
        return int(k)
    return int(math.floor(x))


@dataclass(frozen=True)
class BoundQuery:
    delta: float
    d: float
    n: int = 1
    Delta: float | None = None
    eta: float | None = None

    def __post_init__(self) -> None:
        _check_delta_d(self.delta, self.d)
        if self.Delta is not None and not 0.0 < self.Delta < self.d:
            raise BoundError("Delta must lie in (0, d)")
        if self.n < 1:
            raise BoundError("n must be at least 1")


def _check_delta_d(delta: float, d: float) -> None:
    if not 0.0 < d <= 2.0:
        raise BoundError(f"d = {d!r} outside (0, 2]")
    if not 0.0 < delta < d:
        raise BoundError(f"need 0 < delta < d, got delta={delta!r}, d={d!r}")


def min_reservoir_size(delta: float, d: float) -> int:
    """Smallest N with ``d (1 - delta/d)**N <= delta`` at coupling ``s**2 = delta/d``."""
    _check_delta_d(delta, d)
    r = delta / d
    return max(_ceil(math.log(r) / math.log1p(-r)), 1)


def coupling_for(delta: float, d: float) -> float:
    """Coupling eta with ``sin(eta)**2 = delta/d``."""
    _check_delta_d(delta, d)
    return math.asin(math.sqrt(delta / d))


def max_reuses(delta: float, d: float, eta: float) -> int:
    """Largest n with ``cos(eta)**(2n) >= 1 - delta/d``."""
    _check_delta_d(delta, d)
    if not 0.0 <= eta < math.pi / 2:
        raise BoundError(f"eta = {eta!r} outside [0, pi/2)")
    lc = math.log(math.cos(eta))
    if lc == 0.0:
        raise UnboundedReuse("cos(eta) = 1: every reuse count satisfies the constraint")
    return _floor(math.log1p(-delta / d) / (2.0 * lc))


def reused_distance(d: float, n: int, eta: float) -> float:
    """Worst-case Bloch distance ``c**(2n) d`` seen by the next system after n uses."""
    return math.cos(eta) ** (2 * n) * d


def reuse_reservoir_bound(Delta: float, d: float, n: int, eta: float) -> int:
    """Smallest reservoir size for n reuses within total error budget ``Delta``."""
    if not 0.0 < Delta < d:
        raise BoundError(f"need 0 < Delta < d, got Delta={Delta!r}, d={d!r}")
    if n < 1:
        raise BoundError("n must be at least 1")
    x = (d - Delta) / (d * math.cos(eta) ** (2 * (n - 1)))
    if x >= 1.0:
        raise InfeasibleBound(
            f"c^(2(n-1)) = {math.cos(eta) ** (2 * (n - 1))!r} <= (d - Delta)/d = {(d - Delta) / d!r}"
        )
    return max(_ceil(math.log1p(-x) / math.log(x)), 1)


def convergence_distances(delta: float, d: float, N: int) -> tuple[float, float]:
    """Recurrence run at ``s**2 = delta/d``: (system distance after N, first-reservoir distance).

    Initial Bloch vectors sit at ``+d/2`` and ``-d/2`` on a common axis.
    """
    _check_delta_d(delta, d)
    task = Task.custom((0.0, 0.0, d / 2), (0.0, 0.0, -d / 2))
    series = recurrence_series(HomogenizerConfig(coupling_for(delta, d), N, 1, task))
    target = -d / 2
    return abs(series.beta[1, N] - target), abs(series.alpha[1, 1] - target)


def cswap_fidelity_gap(alpha: float) -> float:
    """Closed-form worst-case bound on ``(F_inc - F_coh) / F_inc`` as a function of alpha."""
    if not 0.0 <= alpha <= 1.0:
        raise BoundError(f"alpha = {alpha!r} outside [0, 1]")
    r = math.sqrt(max(1.0 - alpha * alpha, 0.0))
    a = math.sqrt(3.0 - alpha * alpha)
    b = math.sqrt(3.0 - alpha * alpha - alpha / 2.0)
    return r * (a - b) / (3.0 + r * a)


def cswap_gap_maximum(tol: float = 1e-6) -> tuple[float, float]:
    """(argmax alpha, max value) of ``cswap_fidelity_gap`` on [0, 1]."""
    return qcore.golden_maximize(cswap_fidelity_gap, 0.0, 1.0, tol=tol)


def cswap_step_bloch(system: Sequence[float], reservoir: Sequence[float], eta: float) -> np.ndarray:
    """System Bloch vector after one CSWAP with control ``cos(eta)|0> + sin(eta)|1>``."""
    c2 = math.cos(eta) ** 2
    return c2 * np.asarray(system, float) + (1.0 - c2) * np.asarray(reservoir, float)


def pswap_step_bloch(system: Sequence[float], reservoir: Sequence[float], eta: float) -> np.ndarray:
    """System Bloch vector after one PSWAP, including the cross-product term."""
    b = np.asarray(system, float)
    a = np.asarray(reservoir, float)
    c, s = math.cos(eta), math.sin(eta)
    return c * c * b + s * s * a + c * s * np.cross(b, a)


def _simulate_pair(system: Sequence[float], reservoir: Sequence[float], eta: float, kind: str) -> qcore.DensityMatrix:
    rho = qcore.density_from_bloch(system).tensor(qcore.density_from_bloch(reservoir))
    if kind == "PSWAP":
        rho = qcore.apply_gate(rho, qcore.standard_gate("PSWAP", [eta]), [0, 1])
        return qcore.partial_trace(rho, [0])
    ctrl = qcore.StateVector([math.cos(eta), math.sin(eta)]).to_density()
    rho = ctrl.tensor(rho)
    rho = qcore.apply_gate(rho, qcore.standard_gate("CSWAP"), [0, 1, 2])
    return qcore.partial_trace(rho, [1])


def measured_fidelity_gap(system: Sequence[float], reservoir: Sequence[float], eta: float) -> tuple[float, float, float]:
    """Exact 2-qubit (plus control) simulation: returns (F_inc, F_coh, |F_inc - F_coh| / F_inc)."""
    xi = qcore.density_from_bloch(reservoir)
    f_inc = qcore.fidelity_qubit(_simulate_pair(system, reservoir, eta, "CSWAP"), xi)
    f_coh = qcore.fidelity_qubit(_simulate_pair(system, reservoir, eta, "PSWAP"), xi)
    return f_inc, f_coh, abs(f_inc - f_coh) / f_inc


@dataclass(frozen=True)
class ResourcePoint:
    n: int
    N: int
    saturated: bool


def _task_target(task: Task) -> float:
    return task.axis_sizes()[1]


def resources_curve(
    target_error: float,
    eta: float,
    task: Task | str,
    n_range: Sequence[int],
    N_cap: int = 5000,
) -> list[ResourcePoint]:
    """Smallest N such that all of the first n system qubits end within ``target_error``.

    Uses the recurrence engine; a point reports ``saturated`` when even
    ``N_cap`` reservoir qubits are not enough.
    """
    task = Task.parse(task)
    n_values = sorted(int(v) for v in n_range)
    if not n_values or n_values[0] < 1:
        raise BoundError("n_range must contain integers >= 1")
    if not 0.0 < target_error < 1.0:
        raise BoundError("target_error must lie in (0, 1)")
    series = recurrence_series(HomogenizerConfig(eta, N_cap, n_values[-1], task))
    target = _task_target(task)
    errs = np.array([
        [error_metric(series.beta[i, j], target) for j in range(1, N_cap + 1)]
        for i in range(1, n_values[-1] + 1)
    ])
    worst = np.maximum.accumulate(errs, axis=0)
    out = []
    for n in n_values:
        row = worst[n - 1]
        lo, hi = 1, N_cap
        if row[hi - 1] > target_error:
            out.append(ResourcePoint(n, N_cap, True))
            continue
        while lo < hi:
            mid = (lo + hi) // 2
            if row[mid - 1] <= target_error:
                hi = mid
            else:
                lo = mid + 1
        out.append(ResourcePoint(n, lo, False))
    return out


def single_pass_size(target_error: float, eta: float, task: Task | str) -> int:
    """Smallest N for one system qubit, from the closed single-pass decay ``beta_N = c^(2N) beta_0 + (1 - c^(2N)) alpha``."""
    task = Task.parse(task)
    b0, a0 = task.axis_sizes()
    c2 = math.cos(eta) ** 2
    N = 1
    while True:
        beta = c2**N * b0 + (1.0 - c2**N) * a0
        if error_metric(beta, a0) <= target_error:
            return N
        N += 1
