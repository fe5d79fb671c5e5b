"""Heisenberg-picture descriptors for small qubit networks.

Each qubit carries a triple of evolving observables ``(q_x, q_y, q_z)``,
stored as dense ``2**n`` matrices, while the Heisenberg state stays fixed at
``|0...0><0...0|``. A gate written as a polynomial in the current
descriptors of its targets (its Pauli expansion, see ``functional_gate``)
equals ``V^dag G V`` with ``V`` the accumulated circuit unitary. ``evolve``
applies that conjugation through ``V`` so rounding does not compound.
Descriptors of untouched qubits are never modified.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import qcore
from .qcore import DensityMatrix, Gate, QuantumStateError

AXES = "xyz"
MAX_QUBITS = 10

Word = Sequence[tuple[int, str]]


class NoSharpestObservable(QuantumStateError):
    """The qubit is maximally mixed, so every Boolean observable is equally unsharp."""


class ZeroProbabilityCondition(QuantumStateError):
    """The conditioning projector has vanishing expectation."""


def _axis(i: str | int) -> int:
    if isinstance(i, str):
        return AXES.index(i.lower())
    return int(i)


@dataclass(frozen=True)
class DescriptorNetwork:
    """``q[a, i]`` is component ``i`` (x, y, z) of qubit ``a`` at time ``t``."""

    q: np.ndarray
    t: int = 0
    frame: np.ndarray | None = None

    @property
    def n(self) -> int:
        return self.q.shape[0]

    @property
    def dim(self) -> int:
        return self.q.shape[-1]

    @property
    def rho0(self) -> np.ndarray:
        r = np.zeros((self.dim, self.dim), dtype=complex)
        r[0, 0] = 1.0
        return r

    def component(self, a: int, i: str | int) -> np.ndarray:
        return self.q[a, _axis(i)]


def init_network(n: int) -> DescriptorNetwork:
    if not 1 <= n <= MAX_QUBITS:
        raise QuantumStateError(f"n = {n} outside 1..{MAX_QUBITS}")
    q = np.empty((n, 3, 1 << n, 1 << n), dtype=complex)
    for a in range(n):
        for i, p in enumerate(qcore.PAULIS):
            q[a, i] = qcore.embed(p, [a], n)
    q.setflags(write=False)
    frame = np.eye(1 << n, dtype=complex)
    frame.setflags(write=False)
    return DescriptorNetwork(q, 0, frame)


_LOCAL = (qcore.I2, qcore.SX, qcore.SY, qcore.SZ)


def _pauli_expansion(mat: np.ndarray) -> list[tuple[complex, tuple[int, ...]]]:
    k = qcore._n_from_dim(mat.shape[0])
    terms = []
    for idx in itertools.product(range(4), repeat=k):
        p = _LOCAL[idx[0]]
        for j in idx[1:]:
            p = np.kron(p, _LOCAL[j])
        coeff = np.trace(p @ mat) / (1 << k)
        if abs(coeff) > 1e-15:
            terms.append((complex(coeff), idx))
    return terms


def functional_gate(net: DescriptorNetwork, g: Gate, targets: Sequence[int]) -> np.ndarray:
    """The gate written in terms of the current descriptors of ``targets``."""
    targets = qcore._check_targets(targets, net.n, g.arity)
    out = np.zeros((net.dim, net.dim), dtype=complex)
    for coeff, idx in _pauli_expansion(g.mat):
        term = np.eye(net.dim, dtype=complex)
        for a, j in zip(targets, idx):
            if j:
                term = term @ net.q[a, j - 1]
        out += coeff * term
    return out


def evolve(net: DescriptorNetwork, g: Gate, targets: Sequence[int]) -> DescriptorNetwork:
    """Conjugate the target descriptors by the functional gate; others are reused as-is."""
    targets = qcore._check_targets(targets, net.n, g.arity)
    if net.frame is None:
        u = functional_gate(net, g, targets)
        ud = u.conj().T
        q = net.q.copy()
        for a in targets:
            for i in range(3):
                q[a, i] = ud @ net.q[a, i] @ u
        q.setflags(write=False)
        return DescriptorNetwork(q, net.t + 1, None)
    # Same map as the functional gate, evaluated as (G V)^dag P (G V).
    frame = qcore.embed(g.mat, targets, net.n) @ net.frame
    fd = frame.conj().T
    q = net.q.copy()
    for a in targets:
        for i, p in enumerate(qcore.PAULIS):
            q[a, i] = fd @ qcore.embed(p, [a], net.n) @ frame
    q.setflags(write=False)
    frame.setflags(write=False)
    return DescriptorNetwork(q, net.t + 1, frame)


def run_circuit(net: DescriptorNetwork, ops: Iterable[tuple[Gate, Sequence[int]]]) -> DescriptorNetwork:
    for g, targets in ops:
        net = evolve(net, g, targets)
    return net


def word_operator(net: DescriptorNetwork, word: Word) -> np.ndarray:
    op = np.eye(net.dim, dtype=complex)
    for a, i in word:
        op = op @ net.component(a, i)
    return op


def _expect(net: DescriptorNetwork, op: np.ndarray) -> complex:
    return complex(op[0, 0])


def expectation(net: DescriptorNetwork, word: Word | np.ndarray) -> float:
    """``tr(rho0 W)`` for a product of components (or an explicit operator)."""
    op = word if isinstance(word, np.ndarray) else word_operator(net, word)
    v = _expect(net, op)
    if abs(v.imag) > 1e-10:
        raise QuantumStateError("word is not Hermitian; expectation is complex")
    return float(v.real)


def bloch(net: DescriptorNetwork, a: int) -> np.ndarray:
    return np.array([expectation(net, net.q[a, i]) for i in range(3)])


def algebra_residual(net: DescriptorNetwork) -> float:
    """Largest deviation from the per-qubit Pauli algebra and cross-qubit commutation."""
    eye = np.eye(net.dim)
    worst = 0.0
    eps = np.zeros((3, 3, 3))
    eps[0, 1, 2] = eps[1, 2, 0] = eps[2, 0, 1] = 1.0
    eps[0, 2, 1] = eps[2, 1, 0] = eps[1, 0, 2] = -1.0
    for a in range(net.n):
        for i in range(3):
            for j in range(3):
                want = eye * (i == j) + 1j * sum(eps[i, j, k] * net.q[a, k] for k in range(3))
                worst = max(worst, np.abs(net.q[a, i] @ net.q[a, j] - want).max())
        for b in range(a + 1, net.n):
            for i in range(3):
                for j in range(3):
                    comm = net.q[a, i] @ net.q[b, j] - net.q[b, j] @ net.q[a, i]
                    worst = max(worst, np.abs(comm).max())
    return float(worst)


@dataclass(frozen=True)
class SharpestObservable:
    op: np.ndarray
    gamma: float
    direction: np.ndarray

    @property
    def local_op(self) -> np.ndarray:
        return sum(d * p for d, p in zip(self.direction, qcore.PAULIS))


def variance(net: DescriptorNetwork, op: np.ndarray) -> float:
    return expectation(net, op @ op) - expectation(net, op) ** 2


def sharpest_observable(net: DescriptorNetwork, a: int) -> SharpestObservable:
    v = bloch(net, a)
    gamma = float(np.linalg.norm(v))
    if gamma <= 1e-12:
        raise NoSharpestObservable(f"qubit {a} is maximally mixed")
    direction = v / gamma
    op = sum(direction[i] * net.q[a, i] for i in range(3))
    return SharpestObservable(op, gamma, direction)


def density_from_sharpest(s: SharpestObservable) -> DensityMatrix:
    return DensityMatrix(0.5 * (qcore.I2 + s.gamma * s.local_op))


def reduced_density(net: DescriptorNetwork, a: int) -> DensityMatrix:
    return qcore.density_from_bloch(np.clip(bloch(net, a), -1.0, 1.0))


@dataclass(frozen=True)
class InfoReport:
    acc_per_qubit: tuple[float, ...]
    acc_network: float
    inacc: float


GLOBAL_RECONSTRUCTION_MAX = 6


def global_density(net: DescriptorNetwork) -> DensityMatrix:
    """Network state in the initial frame, rebuilt from all Pauli-word expectations.

    ``rho = 2**-n sum_W <W> W0`` where ``W`` runs over descriptor words and
    ``W0`` is the same word on the initial descriptors.
    """
    if net.n > GLOBAL_RECONSTRUCTION_MAX:
        raise QuantumStateError(f"global reconstruction limited to {GLOBAL_RECONSTRUCTION_MAX} qubits")
    base = init_network(net.n)
    rho = np.zeros((net.dim, net.dim), dtype=complex)
    for combo in itertools.product(range(4), repeat=net.n):
        word = [(a, AXES[c - 1]) for a, c in enumerate(combo) if c]
        rho += expectation(net, word) * word_operator(base, word)
    return DensityMatrix(rho / net.dim)


def info_report(net: DescriptorNetwork) -> InfoReport:
    """Locally accessible information ``1 - S`` per qubit (bits) and the inaccessible remainder.

    The network total is ``n - S(global)``; for ``n`` above the
    reconstruction limit the network is taken as pure, which holds for
    any circuit started from the Heisenberg state.
    """
    acc = []
    for a in range(net.n):
        gamma = min(float(np.linalg.norm(bloch(net, a))), 1.0)
        acc.append(1.0 - qcore.binary_entropy(0.5 * (1.0 + gamma)))
    total = float(net.n)
    if net.n <= GLOBAL_RECONSTRUCTION_MAX:
        total -= qcore.von_neumann_entropy(global_density(net))
    return InfoReport(tuple(acc), total, total - sum(acc))


def projector(net: DescriptorNetwork, word: Word | np.ndarray, sign: int = 1) -> np.ndarray:
    """``(1 + sign W) / 2`` for a Boolean word ``W``."""
    if sign not in (1, -1):
        raise QuantumStateError("projector sign must be +1 or -1")
    op = word if isinstance(word, np.ndarray) else word_operator(net, word)
    return 0.5 * (np.eye(net.dim) + sign * op)


def relative_descriptor_expectation(
    net: DescriptorNetwork,
    word: Word,
    condition: Word,
    sign: int = 1,
) -> float:
    """``<W Pi> / <Pi>`` with ``Pi`` the ``sign`` eigenprojector of the condition word."""
    pi = projector(net, condition, sign)
    p = expectation(net, pi)
    if p <= 1e-12:
        raise ZeroProbabilityCondition(f"condition probability {p!r} is zero")
    return expectation(net, word_operator(net, word) @ pi) / p


def schrodinger_expectation(ops: Iterable[tuple[Gate, Sequence[int]]], n: int, word: Word) -> float:
    """Independent check: evolve ``|0...0>`` and measure the Pauli word directly."""
    psi = qcore.StateVector.basis("0" * n)
    for g, targets in ops:
        psi = qcore.apply_gate(psi, g, targets)
    op = np.eye(1 << n, dtype=complex)
    for a, i in word:
        op = op @ qcore.embed(qcore.PAULIS[_axis(i)], [a], n)
    return float(np.vdot(psi.amps, op @ psi.amps).real)


def bell_ops() -> list[tuple[Gate, tuple[int, ...]]]:
    return [(qcore.standard_gate("H"), (0,)), (qcore.standard_gate("CNOT"), (0, 1))]


ANTI_CH = qcore.standard_gate(
    "custom",
    matrix=np.block([[qcore.standard_gate("H").mat, np.zeros((2, 2))], [np.zeros((2, 2)), np.eye(2)]]),
)


def hardy_ops(theta: int | None = None) -> list[tuple[Gate, tuple[int, ...]]]:
    """``UR(phi)`` on qubit a (cos phi = 1/3), optional ``Utheta`` on b, then H on b conditioned on ``q_az = +1``."""
    phi = math.acos(1.0 / 3.0)
    ops: list[tuple[Gate, tuple[int, ...]]] = [(qcore.standard_gate("UR", [phi]), (0,))]
    if theta is not None:
        ops.append((qcore.standard_gate("Utheta", [theta]), (1,)))
    ops.append((ANTI_CH, (0, 1)))
    return ops
