"""Dense state-vector and density-matrix primitives for small qubit registers.

Qubit 0 is the most significant bit of a basis-state index, so tensor
products are written left to right in the same order as circuit wires read
top to bottom.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

ATOL = 1e-10
CIRCUIT_ATOL = 1e-9

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SX, SY, SZ)

_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
_SWAP = np.eye(4, dtype=complex)[[0, 2, 1, 3]]


class QuantumStateError(ValueError):
    """Raised when an input violates a state, gate or index contract."""


def _n_from_dim(dim: int) -> int:
    n = int(dim).bit_length() - 1
    if n < 1 or 1 << n != dim:
        raise QuantumStateError(f"dimension {dim} is not 2**n with n >= 1")
    return n


@dataclass(frozen=True)
class StateVector:
    amps: np.ndarray

    def __post_init__(self) -> None:
        amps = np.asarray(self.amps, dtype=complex).reshape(-1)
        _n_from_dim(amps.size)
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > ATOL:
            raise QuantumStateError(f"state norm {norm!r} differs from 1")
        amps.setflags(write=False)
        object.__setattr__(self, "amps", amps)

    @property
    def n(self) -> int:
        return _n_from_dim(self.amps.size)

    @classmethod
    def basis(cls, bits: str | Sequence[int]) -> "StateVector":
        bits = [int(b) for b in bits]
        amps = np.zeros(1 << len(bits), dtype=complex)
        amps[int("".join(map(str, bits)), 2)] = 1.0
        return cls(amps)

    @classmethod
    def product(cls, *qubits: Sequence[complex]) -> "StateVector":
        amps = np.ones(1, dtype=complex)
        for q in qubits:
            amps = np.kron(amps, np.asarray(q, dtype=complex))
        return cls(amps / np.linalg.norm(amps))

    def to_density(self) -> "DensityMatrix":
        return DensityMatrix(np.outer(self.amps, self.amps.conj()))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amps) ** 2


@dataclass(frozen=True)
class DensityMatrix:
    mat: np.ndarray

    def __post_init__(self) -> None:
        mat = np.array(self.mat, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise QuantumStateError("density matrix must be square")
        _n_from_dim(mat.shape[0])
        if not np.allclose(mat, mat.conj().T, atol=ATOL, rtol=0):
            raise QuantumStateError("density matrix is not Hermitian")
        tr = np.trace(mat).real
        if abs(tr - 1.0) > ATOL:
            raise QuantumStateError(f"density matrix trace {tr!r} differs from 1")
        if np.linalg.eigvalsh(mat).min() < -ATOL:
            raise QuantumStateError("density matrix has a negative eigenvalue")
        mat.setflags(write=False)
        object.__setattr__(self, "mat", mat)

    @property
    def n(self) -> int:
        return _n_from_dim(self.mat.shape[0])

    @classmethod
    def maximally_mixed(cls, n: int = 1) -> "DensityMatrix":
        d = 1 << n
        return cls(np.eye(d, dtype=complex) / d)

    def tensor(self, other: "DensityMatrix") -> "DensityMatrix":
        return DensityMatrix(np.kron(self.mat, other.mat))

    def probabilities(self) -> np.ndarray:
        return np.clip(np.diag(self.mat).real, 0.0, None)


State = Union[StateVector, DensityMatrix]


@dataclass(frozen=True)
class BlochVector:
    x: float
    y: float
    z: float

    def __post_init__(self) -> None:
        if self.norm() > 1.0 + ATOL:
            raise QuantumStateError(f"Bloch vector norm {self.norm()!r} exceeds 1")

    @classmethod
    def from_array(cls, v: Sequence[float]) -> "BlochVector":
        x, y, z = (float(t) for t in v)
        return cls(x, y, z)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def norm(self) -> float:
        return float(np.sqrt(self.x**2 + self.y**2 + self.z**2))


@dataclass(frozen=True)
class Gate:
    label: str
    mat: np.ndarray
    params: tuple[float, ...] = field(default=())

    def __post_init__(self) -> None:
        mat = np.array(self.mat, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise QuantumStateError("gate matrix must be square")
        _n_from_dim(mat.shape[0])
        if not np.allclose(mat @ mat.conj().T, np.eye(mat.shape[0]), atol=ATOL, rtol=0):
            raise QuantumStateError(f"gate {self.label!r} is not unitary")
        mat.setflags(write=False)
        object.__setattr__(self, "mat", mat)
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))

    @property
    def arity(self) -> int:
        return _n_from_dim(self.mat.shape[0])

    def dagger(self) -> "Gate":
        return Gate(self.label + "^dag", self.mat.conj().T, self.params)


def _controlled(u: np.ndarray) -> np.ndarray:
    k = u.shape[0]
    out = np.eye(2 * k, dtype=complex)
    out[k:, k:] = u
    return out


def _nparams(kind: str, params: Sequence[float], count: int) -> list[float]:
    if len(params) != count:
        raise QuantumStateError(f"{kind} takes {count} parameter(s), got {len(params)}")
    return [float(p) for p in params]


def standard_gate(kind: str, params: Sequence[float] = (), matrix: np.ndarray | None = None) -> Gate:
    """Build a named gate.

    Kinds: ``I``, ``X``, ``Y``, ``Z``, ``H``, ``CNOT``, ``CH``, ``SWAP``,
    ``PSWAP`` (eta), ``CSWAP``, ``Rx`` (phi), ``UR`` (phi), ``Utheta``
    (theta = +1 or -1) and ``custom`` (any unitary passed via ``matrix``).

    ``PSWAP(eta) = cos(eta) 1 + i sin(eta) SWAP``. ``UR(phi) = cos(phi/2) 1 +
    i sin(phi/2) X``. ``Utheta`` is the identity for +1 and X for -1.
    """
    key = kind.upper()
    params = list(params)
    if key in ("I", "IDENTITY"):
        return Gate("I", I2)
    if key in ("X", "Y", "Z"):
        _nparams(kind, params, 0)
        return Gate(key, {"X": SX, "Y": SY, "Z": SZ}[key])
    if key == "H":
        return Gate("H", _H)
    if key == "CNOT":
        return Gate("CNOT", _controlled(SX))
    if key == "CH":
        return Gate("CH", _controlled(_H))
    if key == "SWAP":
        return Gate("SWAP", _SWAP)
    if key == "CSWAP":
        return Gate("CSWAP", _controlled(_SWAP))
    if key == "PSWAP":
        (eta,) = _nparams(kind, params, 1)
        return Gate("PSWAP", np.cos(eta) * np.eye(4) + 1j * np.sin(eta) * _SWAP, (eta,))
    if key == "RX":
        (phi,) = _nparams(kind, params, 1)
        return Gate("Rx", np.cos(phi / 2) * I2 - 1j * np.sin(phi / 2) * SX, (phi,))
    if key == "UR":
        (phi,) = _nparams(kind, params, 1)
        return Gate("UR", np.cos(phi / 2) * I2 + 1j * np.sin(phi / 2) * SX, (phi,))
    if key == "UTHETA":
        (theta,) = _nparams(kind, params, 1)
        if theta not in (1.0, -1.0):
            raise QuantumStateError("Utheta encodes theta = +1 or -1 only")
        return Gate("Utheta", I2 if theta == 1.0 else SX, (theta,))
    if key == "CUSTOM":
        if matrix is None:
            raise QuantumStateError("custom gate needs a matrix")
        return Gate("custom", matrix, tuple(params))
    raise QuantumStateError(f"unknown gate kind {kind!r}")


def _check_targets(targets: Sequence[int], n: int, arity: int) -> list[int]:
    targets = [int(t) for t in targets]
    if len(targets) != arity:
        raise QuantumStateError(f"gate acts on {arity} qubit(s), got {len(targets)} target(s)")
    if len(set(targets)) != len(targets):
        raise QuantumStateError(f"duplicate targets {targets}")
    for t in targets:
        if not 0 <= t < n:
            raise QuantumStateError(f"target {t} out of range for {n} qubit(s)")
    return targets


def _apply_left(tensor: np.ndarray, u: np.ndarray, axes: list[int]) -> np.ndarray:
    k = len(axes)
    ut = u.reshape((2,) * (2 * k))
    out = np.tensordot(ut, tensor, axes=(list(range(k, 2 * k)), axes))
    return np.moveaxis(out, list(range(k)), axes)


def apply_gate(state: State, g: Gate, targets: Sequence[int]) -> State:
    """Evolve ``state`` by ``g`` acting on ``targets`` (in gate-wire order)."""
    n = state.n
    targets = _check_targets(targets, n, g.arity)
    if isinstance(state, StateVector):
        psi = state.amps.reshape((2,) * n)
        out = _apply_left(psi, g.mat, targets)
        return StateVector(out.reshape(-1))
    rho = state.mat.reshape((2,) * (2 * n))
    rho = _apply_left(rho, g.mat, targets)
    rho = _apply_left(rho, g.mat.conj(), [t + n for t in targets])
    return DensityMatrix(rho.reshape(1 << n, 1 << n))


def embed(op: np.ndarray, targets: Sequence[int], n: int) -> np.ndarray:
    """Full 2**n matrix of ``op`` acting on ``targets`` and identity elsewhere."""
    k = _n_from_dim(op.shape[0])
    targets = _check_targets(targets, n, k)
    eye = np.eye(1 << n, dtype=complex).reshape((2,) * (2 * n))
    out = _apply_left(eye, np.asarray(op, dtype=complex), targets)
    return out.reshape(1 << n, 1 << n)


def partial_trace(rho: DensityMatrix, keep: Sequence[int]) -> DensityMatrix:
    """Reduced state on ``keep``; the kept qubits appear in the order given."""
    n = rho.n
    keep = [int(k) for k in keep]
    if not keep:
        raise QuantumStateError("keep set is empty")
    if len(set(keep)) != len(keep):
        raise QuantumStateError(f"duplicate qubits in keep set {keep}")
    for k in keep:
        if not 0 <= k < n:
            raise QuantumStateError(f"qubit {k} out of range for {n} qubit(s)")
    traced = [q for q in range(n) if q not in keep]
    t = rho.mat.reshape((2,) * (2 * n))
    perm = keep + traced + [q + n for q in keep] + [q + n for q in traced]
    t = t.transpose(perm)
    dk, dt = 1 << len(keep), 1 << len(traced)
    t = t.reshape(dk, dt, dk, dt)
    red = np.einsum("ajbj->ab", t)
    red = 0.5 * (red + red.conj().T)
    return DensityMatrix(red)


def bloch_vector(rho: DensityMatrix) -> BlochVector:
    if rho.n != 1:
        raise QuantumStateError("Bloch vector needs a single-qubit state")
    return BlochVector.from_array([np.trace(rho.mat @ p).real for p in PAULIS])


def density_from_bloch(b: BlochVector | Sequence[float]) -> DensityMatrix:
    if not isinstance(b, BlochVector):
        b = BlochVector.from_array(b)
    mat = 0.5 * (I2 + b.x * SX + b.y * SY + b.z * SZ)
    return DensityMatrix(mat)


def _require_qubit(*rhos: DensityMatrix) -> None:
    for r in rhos:
        if r.n != 1:
            raise QuantumStateError("expected a single-qubit density matrix")


def fidelity_qubit(p: DensityMatrix, q: DensityMatrix) -> float:
    """Squared-overlap fidelity ``tr(p q) + 2 sqrt(det p det q)`` of two qubits."""
    _require_qubit(p, q)
    dp = np.linalg.det(p.mat).real
    dq = np.linalg.det(q.mat).real
    if dp < -ATOL or dq < -ATOL:
        raise QuantumStateError("negative determinant: invalid qubit density")
    f = np.trace(p.mat @ q.mat).real + 2.0 * np.sqrt(max(dp, 0.0) * max(dq, 0.0))
    return float(min(max(f, 0.0), 1.0))


def fidelity_bloch(a: Sequence[float] | float, b: Sequence[float] | float) -> float:
    """Same fidelity evaluated directly on Bloch vectors (or signed sizes on a shared axis)."""
    a = np.atleast_1d(np.asarray(a, dtype=float))
    b = np.atleast_1d(np.asarray(b, dtype=float))
    ra = max(1.0 - float(a @ a), 0.0)
    rb = max(1.0 - float(b @ b), 0.0)
    return float(0.5 * (1.0 + float(a @ b) + np.sqrt(ra * rb)))


def trace_distance_qubit(p: DensityMatrix, q: DensityMatrix) -> float:
    """Euclidean distance between Bloch vectors, in [0, 2]."""
    _require_qubit(p, q)
    return float(np.linalg.norm(bloch_vector(p).as_array() - bloch_vector(q).as_array()))


def entropy_from_eigenvalues(evals: Sequence[float]) -> float:
    ev = np.asarray(evals, dtype=float)
    if ev.min(initial=0.0) < -ATOL:
        raise QuantumStateError("eigenvalue below -1e-10")
    ev = ev[ev > 0.0]
    return float(max(-np.sum(ev * np.log2(ev)), 0.0))


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """Entropy in bits; eigenvalues in [-1e-10, 0) are treated as zero."""
    return entropy_from_eigenvalues(np.linalg.eigvalsh(rho.mat))


def binary_entropy(p: float) -> float:
    return entropy_from_eigenvalues([p, 1.0 - p])


def coherence_preprocess_unitary(p: float, phase: float = 0.0) -> Gate:
    """Rotation taking ``sqrt(1-p)|0> + sqrt(p) e^{-i phase}|1>`` to ``|1>``.

    A non-zero phase is removed first by ``diag(1, e^{i phase})``.
    """
    if not 0.0 <= p <= 1.0:
        raise QuantumStateError(f"p = {p!r} outside [0, 1]")
    sp, sq = np.sqrt(p), np.sqrt(1.0 - p)
    u = np.array([[sp, -sq], [sq, sp]], dtype=complex)
    if phase:
        u = u @ np.diag([1.0, np.exp(1j * phase)])
    return Gate("Ucoh", u, (p, phase))


def coherent_input_state(p: float, phase: float = 0.0) -> StateVector:
    return StateVector([np.sqrt(1.0 - p), np.sqrt(p) * np.exp(-1j * phase)])


def states_equal_up_to_phase(a: StateVector, b: StateVector, atol: float = ATOL) -> bool:
    ov = np.vdot(a.amps, b.amps)
    return bool(abs(abs(ov) - 1.0) <= atol)


def golden_maximize(f, lo: float, hi: float, tol: float = 1e-6, grid: int = 201) -> tuple[float, float]:
    """Maximize a scalar function on [lo, hi] by golden-section search.

    A coarse grid locates the bracketing triple first, so the search starts
    inside the basin of the global maximum.
    """
    from scipy.optimize import minimize_scalar

    xs = np.linspace(lo, hi, grid)
    ys = np.array([f(x) for x in xs])
    k = int(np.argmax(ys))
    if k == 0 or k == grid - 1:
        return float(xs[k]), float(ys[k])
    res = minimize_scalar(lambda x: -f(x), bracket=(xs[k - 1], xs[k], xs[k + 1]), method="golden", tol=tol)
    x = float(min(max(res.x, lo), hi))
    return x, float(f(x))
