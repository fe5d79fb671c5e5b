"""Hardy-state analytics and a small catalog of paradox circuits with post-selection.

Basis convention: for the two-qubit Hardy family the first ket slot is
qubit 1, ``v -> |0>`` and ``u -> |1>``, so the state reads
``a|00> + b|10> + c|01>``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from . import qcore
from .qcore import Gate, QuantumStateError, StateVector

Op = tuple[Gate, tuple[int, ...]]


@dataclass(frozen=True)
class HardyState:
    a: complex
    b: complex
    c: complex

    def __post_init__(self) -> None:
        norm = abs(self.a) ** 2 + abs(self.b) ** 2 + abs(self.c) ** 2
        if abs(norm - 1.0) > 1e-12:
            raise QuantumStateError(f"|a|^2 + |b|^2 + |c|^2 = {norm!r}, expected 1")

    @classmethod
    def symmetric(cls, a: float) -> "HardyState":
        """Real family with ``b = c = sqrt((1 - a^2)/2)``."""
        if not 0.0 <= a <= 1.0:
            raise QuantumStateError(f"a = {a!r} outside [0, 1]")
        bc = math.sqrt(max(1.0 - a * a, 0.0) / 2.0)
        return cls(a, bc, bc)

    def vector(self) -> StateVector:
        amps = np.zeros(4, dtype=complex)
        amps[0b00] = self.a
        amps[0b10] = self.b
        amps[0b01] = self.c
        return StateVector(amps)


@dataclass(frozen=True)
class ParadoxMetrics:
    p_hardy: float
    p_paradox: float
    I1: float
    I2: float
    I12: float
    s_tot: float
    degenerate: bool = False


def _incompatibility(x: float, y: float) -> float:
    top = max(x, y)
    if top <= 0.0:
        return 0.0
    return 2.0 * math.log((x + y) / top)


def hardy_metrics(h: HardyState) -> ParadoxMetrics:
    a2, b2, c2 = abs(h.a) ** 2, abs(h.b) ** 2, abs(h.c) ** 2
    disc = max(0.25 - b2 * c2, 0.0)
    lam = 0.5 + math.sqrt(disc)
    s_one = qcore.entropy_from_eigenvalues([lam, 1.0 - lam])
    i1 = _incompatibility(a2, b2)
    i2 = _incompatibility(a2, c2)
    degenerate = abs(h.a * h.b * h.c) < 1e-15
    if degenerate:
        p_hardy = p_paradox = 0.0
    else:
        p_hardy = b2 * c2 * (1.0 - b2 - c2) / ((1.0 - b2) * (1.0 - c2))
        p_paradox = a2 * b2 * c2
    return ParadoxMetrics(p_hardy, p_paradox, i1, i2, i1 * i2, 2.0 * s_one, degenerate)


def hardy_projection_probability(h: HardyState) -> float:
    """``|<w1_perp w2_perp | psi>|^2`` with the rotated local bases built explicitly."""
    n1 = math.sqrt(abs(h.a) ** 2 + abs(h.b) ** 2)
    n2 = math.sqrt(abs(h.a) ** 2 + abs(h.c) ** 2)
    if n1 == 0.0 or n2 == 0.0:
        return 0.0
    w1_perp = np.array([np.conj(h.b), -np.conj(h.a)]) / n1
    w2_perp = np.array([np.conj(h.c), -np.conj(h.a)]) / n2
    bra = np.kron(w1_perp, w2_perp)
    return float(abs(np.vdot(bra, h.vector().amps)) ** 2)


@dataclass(frozen=True)
class HardyScan:
    columns: tuple[str, ...]
    rows: np.ndarray
    argmax: dict[str, tuple[float, float]]


HARDY_COLUMNS = ("a", "S_tot", "P_paradox", "P_Hardy", "I1", "I12")


def _scan_row(a: float) -> tuple[float, ...]:
    m = hardy_metrics(HardyState.symmetric(a))
    return (a, m.s_tot, m.p_paradox, m.p_hardy, m.I1, m.I12)


def scan_hardy(grid: int = 1000, tol: float = 1e-9) -> HardyScan:
    """Tabulate the symmetric family over ``a`` in [0, 1] and refine the maxima.

    ``argmax`` maps each quantity to ``(a at the maximum, maximum value)``.
    """
    if grid < 100:
        raise QuantumStateError("grid must have at least 100 points")
    rows = np.array([_scan_row(a) for a in np.linspace(0.0, 1.0, grid)])
    argmax = {}
    for col in ("P_paradox", "P_Hardy", "I1"):
        k = HARDY_COLUMNS.index(col)
        argmax[col] = qcore.golden_maximize(lambda a, k=k: _scan_row(a)[k], 0.0, 1.0, tol=tol, grid=grid)
    return HardyScan(HARDY_COLUMNS, rows, argmax)


@dataclass(frozen=True)
class CircuitOutcome:
    """Measurement statistics keyed by outcome label.

    ``bits`` maps each label to its measured bitstring; ``state`` is the
    pre-measurement state after any basis-change gates.
    """

    distribution: dict[str, float]
    state: StateVector
    bits: dict[str, str] = field(default_factory=dict)
    forbidden: str | None = None
    postselected: dict[str, float] | None = None
    success_probability: float | None = None

    def probability(self, pred: Callable[[str], bool]) -> float:
        return float(sum(p for k, p in self.distribution.items() if pred(k)))

    def conditional(self, event: Callable[[str], bool], given: Callable[[str], bool]) -> float:
        pg = self.probability(given)
        if pg <= 1e-15:
            raise QuantumStateError("conditioning event has zero probability")
        return self.probability(lambda k: event(k) and given(k)) / pg


def run_ops(state: qcore.State, ops: Iterable[Op]) -> qcore.State:
    for g, targets in ops:
        state = qcore.apply_gate(state, g, targets)
    return state


def bitstring_distribution(state: qcore.State, qubits: Sequence[int] | None = None) -> dict[str, float]:
    """Computational-basis marginal on ``qubits`` (default all), keyed by bitstrings."""
    n = state.n
    qubits = list(range(n)) if qubits is None else list(qubits)
    probs = state.probabilities()
    out: dict[str, float] = {}
    for idx, p in enumerate(probs):
        full = format(idx, f"0{n}b")
        key = "".join(full[q] for q in qubits)
        out[key] = out.get(key, 0.0) + float(p)
    return dict(sorted(out.items()))


def _real_rotation(alpha: float, beta: float) -> Gate:
    return qcore.standard_gate("custom", matrix=np.array([[alpha, -beta], [beta, alpha]]))


def penrose_ops(alpha: float, beta: float) -> tuple[list[Op], list[Op]]:
    """(preparation, final basis change) on qubits A=0, B=1."""
    if abs(alpha * alpha + beta * beta - 1.0) > 1e-12:
        raise QuantumStateError("alpha^2 + beta^2 must equal 1")
    h = qcore.standard_gate("H")
    prep = [(_real_rotation(alpha, beta), (0,)), (qcore.standard_gate("CH"), (0, 1))]
    return prep, [(h, (0,)), (h, (1,))]


def penrose_circuit(alpha: float, beta: float) -> CircuitOutcome:
    prep, meas = penrose_ops(alpha, beta)
    pre = run_ops(StateVector.basis("00"), prep)
    final = run_ops(pre, meas)
    dist = bitstring_distribution(final)
    forbidden = "11" if abs(alpha - math.sqrt(1 / 3)) < 1e-12 else None
    return CircuitOutcome(dist, pre, {k: k for k in dist}, forbidden)


def penrose_overlap(alpha: float, beta: float) -> complex:
    """``<--|psi>`` for the pre-measurement state of the Penrose circuit."""
    prep, _ = penrose_ops(alpha, beta)
    pre = run_ops(StateVector.basis("00"), prep)
    minus = np.array([1.0, -1.0]) / math.sqrt(2)
    return complex(np.vdot(np.kron(minus, minus), pre.amps))


BELL_LABELS = {"00": "phi+", "10": "phi-", "01": "psi+", "11": "psi-"}
FR_ORIGINAL = "original"
FR_OBSERVER = "with_external_observer"


def fr_ops(variant: str = FR_ORIGINAL) -> tuple[list[Op], int]:
    """Gate list and qubit count; wires are coin, Fbar, S, F (and E last if present)."""
    if variant not in (FR_ORIGINAL, FR_OBSERVER):
        raise QuantumStateError(f"unknown FR variant {variant!r}")
    coin, fbar, s, f = 0, 1, 2, 3
    g = qcore.standard_gate
    ops: list[Op] = [(_real_rotation(math.sqrt(1 / 3), math.sqrt(2 / 3)), (coin,))]
    n = 4
    if variant == FR_OBSERVER:
        n = 5
        ops.append((g("CNOT"), (coin, 4)))
    ops += [
        (g("CNOT"), (coin, fbar)),
        (g("CH"), (fbar, s)),
        (g("CNOT"), (s, f)),
        # Bell-basis readout: CNOT then H on the first qubit of each pair.
        (g("CNOT"), (coin, fbar)),
        (g("H"), (coin,)),
        (g("CNOT"), (s, f)),
        (g("H"), (s,)),
    ]
    return ops, n


def fr_circuit(variant: str = FR_ORIGINAL) -> CircuitOutcome:
    ops, n = fr_ops(variant)
    final = run_ops(StateVector.basis("0" * n), ops)
    qubits = [0, 1, 2, 3] + ([4] if n == 5 else [])
    raw = bitstring_distribution(final, qubits)
    dist: dict[str, float] = {}
    bits: dict[str, str] = {}
    for key, p in raw.items():
        label = BELL_LABELS[key[0:2]] + BELL_LABELS[key[2:4]]
        if n == 5:
            label = f"E={key[4]}," + label
        dist[label] = dist.get(label, 0.0) + p
        bits[label] = key
    return CircuitOutcome(dict(sorted(dist.items())), final, bits)


PIGEON_PAIRS = ((1, 2), (1, 3), (2, 3))


def pigeonhole_ops(pair: tuple[int, int] = (1, 2), insert_check: bool = False) -> tuple[list[Op], int]:
    """Three |+> qubits (wires 0-2, labelled 1-3) with an optional parity ancilla on wire 3."""
    if tuple(pair) not in PIGEON_PAIRS:
        raise QuantumStateError(f"pair must be one of {PIGEON_PAIRS}")
    g = qcore.standard_gate
    ops: list[Op] = [(g("H"), (q,)) for q in range(3)]
    n = 3
    if insert_check:
        n = 4
        p, q = pair[0] - 1, pair[1] - 1
        ops += [(g("CNOT"), (p, 3)), (g("CNOT"), (q, 3))]
    # Rx(pi/2) maps |+i> to |0>, so a z readout of 0 is a +i outcome.
    ops += [(g("Rx", [math.pi / 2]), (q,)) for q in range(3)]
    return ops, n


def pigeonhole_circuit(pair: tuple[int, int] = (1, 2), insert_check: bool = False) -> CircuitOutcome:
    """Outcome keys are y-readout bits of the three qubits (0 = +i) then, if present, the ancilla (0 = same)."""
    ops, n = pigeonhole_ops(pair, insert_check)
    final = run_ops(StateVector.basis("0" * n), ops)
    dist = bitstring_distribution(final)
    all_plus = lambda k: k[:3] == "000"
    outcome = CircuitOutcome(dist, final, {k: k for k in dist})
    p_success = outcome.probability(all_plus)
    post = None
    if p_success > 1e-15:
        post = {k: p / p_success for k, p in dist.items() if all_plus(k)}
    return CircuitOutcome(dist, final, {k: k for k in dist}, None, post, p_success)
