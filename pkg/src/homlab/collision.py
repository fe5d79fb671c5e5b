"""Quantum homogenizer engines and their irreversibility metrics.

Two engines share one configuration type:

* ``recurrence_series`` iterates the weak-coupling Bloch-size recurrences,
  neglecting system/reservoir correlations.
* ``exact_homogenize`` evolves the full density matrix of the reservoir plus
  the active system qubit (and a control qubit for CSWAP), keeping every
  correlation that can influence later reduced states.

Bloch "sizes" are signed components along a shared axis (z).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import qcore
from .qcore import DensityMatrix, QuantumStateError

MAX_EXACT_QUBITS = 12


class SwapKind(str, enum.Enum):
    PSWAP = "PSWAP"
    CSWAP = "CSWAP"


class Engine(str, enum.Enum):
    EXACT = "exact"
    RECURRENCE = "recurrence"


class TaskKind(str, enum.Enum):
    PURE_TO_MIXED = "pure_to_mixed"
    MIXED_TO_PURE = "mixed_to_pure"
    CUSTOM = "custom"


class LimitClass(str, enum.Enum):
    TENDS_TO_ZERO = "TendsToZero"
    DIVERGES = "Diverges"
    PLATEAUS = "Plateaus"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class Task:
    kind: TaskKind
    system: tuple[float, float, float]
    reservoir: tuple[float, float, float]

    @classmethod
    def pure_to_mixed(cls) -> "Task":
        return cls(TaskKind.PURE_TO_MIXED, (0.0, 0.0, 1.0), (0.0, 0.0, 0.0))

    @classmethod
    def mixed_to_pure(cls) -> "Task":
        return cls(TaskKind.MIXED_TO_PURE, (0.0, 0.0, 0.0), (0.0, 0.0, 1.0))

    @classmethod
    def custom(cls, system: Sequence[float], reservoir: Sequence[float]) -> "Task":
        s = qcore.BlochVector.from_array(system)
        r = qcore.BlochVector.from_array(reservoir)
        return cls(TaskKind.CUSTOM, (s.x, s.y, s.z), (r.x, r.y, r.z))

    @classmethod
    def parse(cls, name: str | "Task") -> "Task":
        if isinstance(name, Task):
            return name
        key = str(name).lower().replace("-", "_")
        if key in ("pure_to_mixed", "ptm"):
            return cls.pure_to_mixed()
        if key in ("mixed_to_pure", "mtp"):
            return cls.mixed_to_pure()
        raise QuantumStateError(f"unknown task {name!r}")

    def axis_sizes(self) -> tuple[float, float]:
        """Signed sizes along a shared axis; raises if the vectors are not parallel."""
        s = np.array(self.system)
        r = np.array(self.reservoir)
        if np.linalg.norm(np.cross(s, r)) > qcore.ATOL:
            raise QuantumStateError("recurrence engine needs parallel Bloch vectors")
        ref = r if np.linalg.norm(r) > np.linalg.norm(s) else s
        if np.linalg.norm(ref) == 0.0:
            return 0.0, 0.0
        u = ref / np.linalg.norm(ref)
        return float(s @ u), float(r @ u)


@dataclass(frozen=True)
class HomogenizerConfig:
    eta: float
    N: int
    n: int
    task: Task = field(default_factory=Task.pure_to_mixed)
    swap_kind: SwapKind = SwapKind.PSWAP
    engine: Engine = Engine.RECURRENCE

    def __post_init__(self) -> None:
        object.__setattr__(self, "task", Task.parse(self.task))
        object.__setattr__(self, "swap_kind", SwapKind(self.swap_kind))
        object.__setattr__(self, "engine", Engine(self.engine))
        if not 0.0 < self.eta <= math.pi / 2:
            raise QuantumStateError(f"eta = {self.eta!r} outside (0, pi/2]")
        if int(self.N) < 1 or int(self.n) < 1:
            raise QuantumStateError("N and n must be at least 1")
        if self.engine is Engine.EXACT and self.register_qubits > MAX_EXACT_QUBITS:
            raise QuantumStateError(
                f"exact engine needs {self.register_qubits} qubits, budget is {MAX_EXACT_QUBITS}"
            )

    @property
    def register_qubits(self) -> int:
        return self.N + 1 + (1 if self.swap_kind is SwapKind.CSWAP else 0)


@dataclass(frozen=True)
class BlochSeries:
    """Bloch sizes on the (iteration, reservoir position) grid.

    ``alpha[I, j]`` is reservoir qubit j after I iterations (j >= 1).
    ``beta[I, j]`` is system qubit I after j interactions (I >= 1).
    Unused cells (``alpha[:, 0]`` and ``beta[0, :]``) hold NaN.
    """

    eta: float
    alpha: np.ndarray
    beta: np.ndarray
    task: Task

    @property
    def n(self) -> int:
        return self.alpha.shape[0] - 1

    @property
    def N(self) -> int:
        return self.alpha.shape[1] - 1

    def final_system(self, n: int | None = None, N: int | None = None) -> float:
        return float(self.beta[self.n if n is None else n, self.N if N is None else N])

    def reservoir_after(self, n: int | None = None, N: int | None = None) -> np.ndarray:
        return self.alpha[self.n if n is None else n, 1 : (self.N if N is None else N) + 1]


def recurrence_series(cfg: HomogenizerConfig) -> BlochSeries:
    if cfg.engine is not Engine.RECURRENCE:
        raise QuantumStateError("recurrence_series needs engine=recurrence")
    b0, a0 = cfg.task.axis_sizes()
    c2 = math.cos(cfg.eta) ** 2
    s2 = math.sin(cfg.eta) ** 2
    alpha = np.full((cfg.n + 1, cfg.N + 1), np.nan)
    beta = np.full((cfg.n + 1, cfg.N + 1), np.nan)
    alpha[0, 1:] = a0
    beta[1:, 0] = b0
    for i in range(1, cfg.n + 1):
        for j in range(1, cfg.N + 1):
            alpha[i, j] = s2 * beta[i, j - 1] + c2 * alpha[i - 1, j]
            beta[i, j] = c2 * beta[i, j - 1] + s2 * alpha[i - 1, j]
    return BlochSeries(cfg.eta, alpha, beta, cfg.task)


@dataclass(frozen=True)
class ExactResult:
    """Reduced states from the exact engine.

    ``system_bloch[I, j]`` is system qubit I after j interactions and
    ``reservoir_bloch[I, j]`` is reservoir qubit j after I iterations, both
    as 3-vectors with NaN padding in unused cells. ``reservoir_state`` is the
    joint reservoir after the last iteration. ``entropy_checks`` holds
    (before, after) register entropies for every unitary step.
    """

    eta: float
    task: Task
    swap_kind: SwapKind
    system_bloch: np.ndarray
    reservoir_bloch: np.ndarray
    reservoir_state: DensityMatrix
    entropy_checks: list[tuple[float, float]]

    @property
    def beta(self) -> np.ndarray:
        return self.system_bloch[..., 2]

    @property
    def alpha(self) -> np.ndarray:
        return self.reservoir_bloch[..., 2]

    @property
    def n(self) -> int:
        return self.system_bloch.shape[0] - 1

    @property
    def N(self) -> int:
        return self.system_bloch.shape[1] - 1

    def final_system(self, n: int | None = None, N: int | None = None) -> float:
        return float(self.beta[self.n if n is None else n, self.N if N is None else N])

    def reservoir_after(self, n: int | None = None, N: int | None = None) -> np.ndarray:
        return self.alpha[self.n if n is None else n, 1 : (self.N if N is None else N) + 1]


def _unitary_step(rho: np.ndarray, u: np.ndarray, targets: list[int], n: int) -> np.ndarray:
    t = rho.reshape((2,) * (2 * n))
    t = qcore._apply_left(t, u, targets)
    t = qcore._apply_left(t, u.conj(), [q + n for q in targets])
    return t.reshape(1 << n, 1 << n)


def _trace_last(rho: np.ndarray) -> np.ndarray:
    d = rho.shape[0] // 2
    return np.einsum("ajbj->ab", rho.reshape(d, 2, d, 2))


def _trace_first(rho: np.ndarray) -> np.ndarray:
    d = rho.shape[0] // 2
    return np.einsum("jajb->ab", rho.reshape(2, d, 2, d))


def _qubit_bloch(rho: np.ndarray, q: int, n: int) -> np.ndarray:
    t = np.moveaxis(rho.reshape((2,) * (2 * n)), [q, q + n], [0, n])
    d = 1 << (n - 1)
    red = np.einsum("ajbj->ab", t.reshape(2, d, 2, d))
    return np.array([np.trace(red @ p).real for p in qcore.PAULIS])


def _entropy(rho: np.ndarray) -> float:
    ev = np.clip(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)), 0.0, None)
    return qcore.entropy_from_eigenvalues(ev)


def exact_homogenize(cfg: HomogenizerConfig, track_entropy: bool = True) -> ExactResult:
    """Full unitary simulation; spent system qubits are traced out after their pass.

    Later system qubits never meet earlier ones, so discarding a finished
    system qubit leaves every subsequent reduced state unchanged.
    """
    if cfg.register_qubits > MAX_EXACT_QUBITS:
        raise QuantumStateError(
            f"exact engine needs {cfg.register_qubits} qubits, budget is {MAX_EXACT_QUBITS}"
        )
    sys0 = qcore.density_from_bloch(cfg.task.system).mat
    res0 = qcore.density_from_bloch(cfg.task.reservoir).mat
    reservoir = np.ones((1, 1), dtype=complex)
    for _ in range(cfg.N):
        reservoir = np.kron(reservoir, res0)

    system_bloch = np.full((cfg.n + 1, cfg.N + 1, 3), np.nan)
    reservoir_bloch = np.full((cfg.n + 1, cfg.N + 1, 3), np.nan)
    reservoir_bloch[0, 1:] = np.array(cfg.task.reservoir)
    checks: list[tuple[float, float]] = []

    nq = cfg.N + 1
    pswap = qcore.standard_gate("PSWAP", [cfg.eta]).mat
    cswap = qcore.standard_gate("CSWAP").mat
    ctrl_amp = np.array([math.cos(cfg.eta), math.sin(cfg.eta)], dtype=complex)
    ctrl = np.outer(ctrl_amp, ctrl_amp.conj())

    for i in range(1, cfg.n + 1):
        joint = np.kron(sys0, reservoir)
        system_bloch[i, 0] = np.array(cfg.task.system)
        for j in range(1, cfg.N + 1):
            if cfg.swap_kind is SwapKind.PSWAP:
                before = _entropy(joint) if track_entropy else 0.0
                joint = _unitary_step(joint, pswap, [0, j], nq)
                if track_entropy:
                    checks.append((before, _entropy(joint)))
            else:
                ext = np.kron(joint, ctrl)
                before = _entropy(ext) if track_entropy else 0.0
                ext = _unitary_step(ext, cswap, [nq, 0, j], nq + 1)
                if track_entropy:
                    checks.append((before, _entropy(ext)))
                joint = _trace_last(ext)
            system_bloch[i, j] = _qubit_bloch(joint, 0, nq)
        reservoir = _trace_first(joint)
        for j in range(1, cfg.N + 1):
            reservoir_bloch[i, j] = _qubit_bloch(reservoir, j - 1, cfg.N)

    reservoir = 0.5 * (reservoir + reservoir.conj().T)
    return ExactResult(
        cfg.eta, cfg.task, cfg.swap_kind, system_bloch, reservoir_bloch,
        DensityMatrix(reservoir), checks,
    )


def homogenize(cfg: HomogenizerConfig) -> BlochSeries | ExactResult:
    if cfg.engine is Engine.EXACT:
        return exact_homogenize(cfg)
    return recurrence_series(cfg)


def _target_size(task: Task) -> float:
    return task.axis_sizes()[1]


def error_metric(final_system: float | Sequence[float], target: float | Sequence[float]) -> float:
    """One minus the qubit fidelity between the final system and the target reservoir state."""
    return 1.0 - qcore.fidelity_bloch(final_system, target)


def error_from_series(series: BlochSeries | ExactResult, n: int | None = None, N: int | None = None) -> float:
    return error_metric(series.final_system(n, N), _target_size(series.task))


def robustness_metric(reservoir_sizes: Sequence[float], original: float) -> float:
    """Product of per-qubit fidelities with the original reservoir state, summed in log space."""
    logs = 0.0
    for a in np.asarray(reservoir_sizes, dtype=float):
        f = qcore.fidelity_bloch(a, original)
        if f <= 0.0:
            return 0.0
        logs += math.log(f)
    return math.exp(logs)


def robustness_from_series(series: BlochSeries | ExactResult, n: int | None = None, N: int | None = None) -> float:
    return robustness_metric(series.reservoir_after(n, N), _target_size(series.task))


def error_closed_form(task: Task, beta: float) -> float:
    if task.kind is TaskKind.PURE_TO_MIXED:
        return 0.5 * (1.0 - math.sqrt(max(1.0 - beta * beta, 0.0)))
    if task.kind is TaskKind.MIXED_TO_PURE:
        return 0.5 * (1.0 - beta)
    raise QuantumStateError("closed form exists only for the two standard tasks")


def robustness_closed_form(task: Task, alphas: Sequence[float]) -> float:
    a = np.asarray(alphas, dtype=float)
    if task.kind is TaskKind.PURE_TO_MIXED:
        return float(np.exp(np.sum(np.log(0.5 * (1.0 + np.sqrt(np.clip(1.0 - a * a, 0.0, None)))))))
    if task.kind is TaskKind.MIXED_TO_PURE:
        return float(np.exp(np.sum(np.log(0.5 * (1.0 + a)))))
    raise QuantumStateError("closed form exists only for the two standard tasks")


@dataclass(frozen=True)
class DeteriorationSurface:
    """``eps[n-1, N-1]``, ``delta[n-1, N-1]`` and ``R = eps / delta``."""

    eta: float
    task: Task
    eps: np.ndarray
    delta: np.ndarray
    R: np.ndarray
    classification: LimitClass
    slope: float

    def diagonal(self) -> tuple[np.ndarray, np.ndarray]:
        k = min(self.R.shape)
        ks = np.arange(1, k + 1)
        return ks, np.array([self.R[i - 1, i - 1] for i in ks])


PLATEAU_SLOPE = 0.05
PLATEAU_SPREAD = 0.1


def classify_limit(ks: Sequence[float], values: Sequence[float]) -> tuple[LimitClass, float]:
    """Classify the large-k trend from a log-log fit over the upper half of the points."""
    ks = np.asarray(ks, dtype=float)
    values = np.asarray(values, dtype=float)
    half = ks.size // 2
    ks, values = ks[half:], values[half:]
    if ks.size < 2 or not np.all(np.isfinite(values)) or np.any(values <= 0.0):
        return LimitClass.INCONCLUSIVE, float("nan")
    slope = float(np.polyfit(np.log(ks), np.log(values), 1)[0])
    if slope < -PLATEAU_SLOPE:
        return LimitClass.TENDS_TO_ZERO, slope
    if slope > PLATEAU_SLOPE:
        return LimitClass.DIVERGES, slope
    tail = values[values.size // 2 :]
    if tail.max() / tail.min() - 1.0 <= PLATEAU_SPREAD:
        return LimitClass.PLATEAUS, slope
    return LimitClass.INCONCLUSIVE, slope


def deterioration_surface(
    eta: float,
    task: Task | str,
    n_max: int,
    N_max: int,
    diagonal_from: int = 1,
) -> DeteriorationSurface:
    """Error, robustness and their ratio on the grid 1..n_max by 1..N_max (recurrence engine)."""
    if eta == 0.0:
        raise QuantumStateError("eta = 0 performs no homogenization")
    task = Task.parse(task)
    series = recurrence_series(HomogenizerConfig(eta, N_max, n_max, task))
    target = _target_size(task)
    eps = np.empty((n_max, N_max))
    delta = np.empty((n_max, N_max))
    for i in range(1, n_max + 1):
        logf = np.cumsum([math.log(qcore.fidelity_bloch(a, target)) for a in series.alpha[i, 1:]])
        delta[i - 1] = np.exp(logf)
        for j in range(1, N_max + 1):
            eps[i - 1, j - 1] = error_metric(series.beta[i, j], target)
    R = eps / delta
    k = min(n_max, N_max)
    ks = np.arange(diagonal_from, k + 1)
    cls, slope = classify_limit(ks, [R[i - 1, i - 1] for i in ks])
    return DeteriorationSurface(eta, task, eps, delta, R, cls, slope)


def qubit_entropy_from_size(r: float) -> float:
    return qcore.binary_entropy(0.5 * (1.0 + min(abs(float(r)), 1.0)))


def total_entropy(series: BlochSeries | ExactResult, n: int | None = None, N: int | None = None) -> float:
    """Sum of single-qubit entropies (bits) of all used reservoir and system qubits."""
    n = series.n if n is None else n
    N = series.N if N is None else N
    if isinstance(series, ExactResult):
        res = [np.linalg.norm(v) for v in series.reservoir_bloch[n, 1 : N + 1]]
        sys = [np.linalg.norm(series.system_bloch[i, N]) for i in range(1, n + 1)]
    else:
        res = list(series.alpha[n, 1 : N + 1])
        sys = [series.beta[i, N] for i in range(1, n + 1)]
    return float(sum(qubit_entropy_from_size(r) for r in res) + sum(qubit_entropy_from_size(r) for r in sys))


NMR_LABELS = ("A", "B", "C", "D")
# Chain positions 0..3; PSWAPs act on the middle pair only.
NMR_SEQUENCE = (
    ("PSWAP", (1, 2)),
    ("SWAP", (0, 1)),
    ("PSWAP", (1, 2)),
    ("SWAP", (2, 3)),
    ("SWAP", (0, 1)),
    ("PSWAP", (1, 2)),
    ("SWAP", (0, 1)),
    ("PSWAP", (1, 2)),
)


@dataclass(frozen=True)
class NmrResult:
    eta: float
    f: dict[str, float]
    f_closed: dict[str, float]
    entropy: dict[str, float]

    def max_deviation(self) -> float:
        return max(abs(self.f[k] - self.f_closed[k]) for k in NMR_LABELS)


def nmr_closed_forms(eta: float) -> dict[str, float]:
    c2 = math.cos(eta) ** 2
    f_b = c2 * c2
    f_a = 4 * c2 - 9 * c2**2 + 8 * c2**3 - 2 * c2**4
    return {"A": f_a, "B": f_b, "C": 1.0 - f_b, "D": 1.0 - f_a}


def nmr_circuit(eta: float) -> NmrResult:
    """Four-qubit chain: A, B start in |0>, C, D maximally mixed.

    Each system qubit meets each reservoir qubit once through the middle
    PSWAP; full SWAPs move qubits along the chain and labels travel with them.
    """
    if not 0.0 <= eta <= math.pi / 2:
        raise QuantumStateError(f"eta = {eta!r} outside [0, pi/2]")
    pure = np.diag([1.0, 0.0]).astype(complex)
    mixed = np.eye(2, dtype=complex) / 2
    rho = np.kron(np.kron(pure, pure), np.kron(mixed, mixed))
    where = list(NMR_LABELS)
    gates = {"PSWAP": qcore.standard_gate("PSWAP", [eta]).mat, "SWAP": qcore.standard_gate("SWAP").mat}
    for kind, (p, q) in NMR_SEQUENCE:
        rho = _unitary_step(rho, gates[kind], [p, q], 4)
        if kind == "SWAP":
            where[p], where[q] = where[q], where[p]
    dm = DensityMatrix(0.5 * (rho + rho.conj().T))
    f = {}
    for pos, label in enumerate(where):
        red = qcore.partial_trace(dm, [pos])
        f[label] = float(np.trace(red.mat @ qcore.SZ).real)
    entropy = {k: qubit_entropy_from_size(v) for k, v in f.items()}
    return NmrResult(eta, f, nmr_closed_forms(eta), entropy)
