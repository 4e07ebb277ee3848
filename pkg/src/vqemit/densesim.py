"""Exact density-matrix engine.

Conventions used throughout the package:

* Qubits are indexed 0..n-1 and qubit 0 is the least-significant bit of
  every basis index, i.e. the rightmost character of a bitstring.
* A Pauli word is a string with one letter per qubit in ascending qubit
  order: word[q] acts on qubit q.
* Two-qubit gate matrices are written in the basis |t0 t1> where the
  first listed target supplies the most significant bit.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError

_SQ2 = 1.0 / np.sqrt(2.0)

PAULI_1Q = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

_FIXED_GATES = {
    "X": PAULI_1Q["X"],
    "Y": PAULI_1Q["Y"],
    "Z": PAULI_1Q["Z"],
    "H": np.array([[1, 1], [1, -1]], dtype=complex) * _SQ2,
    "S": np.array([[1, 0], [0, 1j]], dtype=complex),
    "SDG": np.array([[1, 0], [0, -1j]], dtype=complex),
    "CNOT": np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
    ),
    "SWAP": np.array(
        [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
    ),
    # Beam-splitter gate: diagonalizes the pairwise SWAP so that
    # swap-symmetrized observables become computational-basis diagonal.
    "B": np.array(
        [
            [1, 0, 0, 0],
            [0, _SQ2, -_SQ2, 0],
            [0, _SQ2, _SQ2, 0],
            [0, 0, 0, 1],
        ],
        dtype=complex,
    ),
}

_PARAMETRIC_GATES = {"RZ", "RY"}
GATE_NAMES = tuple(sorted(set(_FIXED_GATES) | _PARAMETRIC_GATES))
_GATE_ARITY = {name: m.shape[0].bit_length() - 1 for name, m in _FIXED_GATES.items()}
_GATE_ARITY.update({"RZ": 1, "RY": 1})


@dataclass(frozen=True)
class Gate:
    """A named gate instance bound to an ordered tuple of target qubits."""

    name: str
    targets: tuple[int, ...]
    angle: float | None = None

    def __post_init__(self):
        if self.name not in _GATE_ARITY:
            raise DataError(f"unknown gate {self.name!r}")
        if len(set(self.targets)) != len(self.targets):
            raise DataError(f"duplicate target indices in {self.name} {self.targets}")
        if len(self.targets) != _GATE_ARITY[self.name]:
            raise DataError(
                f"{self.name} expects {_GATE_ARITY[self.name]} targets, got {self.targets}"
            )
        if (self.name in _PARAMETRIC_GATES) != (self.angle is not None):
            raise DataError(f"gate {self.name} angle mismatch")


def gate_matrix(gate: Gate) -> np.ndarray:
    """Unitary matrix of a gate in the |t0 t1> basis of its targets."""
    if gate.name == "RZ":
        half = gate.angle / 2.0
        return np.array([[np.exp(-1j * half), 0], [0, np.exp(1j * half)]])
    if gate.name == "RY":
        c, s = np.cos(gate.angle / 2.0), np.sin(gate.angle / 2.0)
        return np.array([[c, -s], [s, c]], dtype=complex)
    return _FIXED_GATES[gate.name]


@dataclass(frozen=True)
class Circuit:
    """Ordered gate list over n_qubits, plus the qubits read out at the end."""

    n_qubits: int
    ops: tuple[Gate, ...]
    measured_qubits: tuple[int, ...]

    def __post_init__(self):
        for g in self.ops:
            if any(t < 0 or t >= self.n_qubits for t in g.targets):
                raise DataError(f"gate {g} targets outside 0..{self.n_qubits - 1}")
        if len(set(self.measured_qubits)) != len(self.measured_qubits):
            raise DataError("measured_qubits must be distinct")
        if any(q < 0 or q >= self.n_qubits for q in self.measured_qubits):
            raise DataError("measured qubit index out of range")


@dataclass(frozen=True)
class DensityMatrix:
    """2^n x 2^n density matrix; treat as immutable."""

    n_qubits: int
    data: np.ndarray = field(repr=False)

    def trace(self) -> float:
        return float(np.real(np.trace(self.data)))

    def purity(self) -> float:
        return float(np.real(np.trace(self.data @ self.data)))

    def validate(self, atol: float = 1e-10) -> None:
        """Check trace, Hermiticity and positivity; raises on violation."""
        d = self.data
        if d.shape != (2**self.n_qubits, 2**self.n_qubits):
            raise DataError("density matrix shape does not match n_qubits")
        if abs(np.trace(d) - 1.0) > atol:
            raise DataError(f"trace {np.trace(d)} deviates from 1")
        if np.max(np.abs(d - d.conj().T)) > atol:
            raise DataError("density matrix is not Hermitian")
        if np.min(np.linalg.eigvalsh((d + d.conj().T) / 2)) < -atol:
            raise DataError("density matrix has a negative eigenvalue")


@dataclass(frozen=True)
class ShotHistogram:
    """Measurement counts keyed by bitstring (leftmost char = highest qubit)."""

    counts: dict[str, int]
    shots: int

    def __post_init__(self):
        if sum(self.counts.values()) != self.shots:
            raise DataError("histogram counts do not sum to shots")
        lengths = {len(k) for k in self.counts}
        if len(lengths) > 1:
            raise DataError("histogram keys have unequal lengths")

    @property
    def n_bits(self) -> int:
        if not self.counts:
            raise DataError("empty histogram")
        return len(next(iter(self.counts)))

    def frequencies(self) -> np.ndarray:
        """Length-2^m frequency vector in basis-index order."""
        m = self.n_bits
        freq = np.zeros(2**m)
        for key, c in self.counts.items():
            freq[int(key, 2)] = c / self.shots
        return freq


def bitstring(index: int, n_bits: int) -> str:
    return format(index, f"0{n_bits}b")


def init_state(n_qubits: int) -> DensityMatrix:
    """|0...0><0...0| on n_qubits (1 <= n <= 8)."""
    if not 1 <= n_qubits <= 8:
        raise DataError(f"n_qubits={n_qubits} outside supported range 1..8")
    dim = 2**n_qubits
    data = np.zeros((dim, dim), dtype=complex)
    data[0, 0] = 1.0
    return DensityMatrix(n_qubits, data)


def _contract(data: np.ndarray, mat: np.ndarray, axes: list[int], n_axes: int) -> np.ndarray:
    """Contract `mat` (reshaped to out+in index pairs) onto the given axes."""
    k = len(axes)
    tensor = mat.reshape([2] * (2 * k))
    out = np.tensordot(tensor, data, axes=(list(range(k, 2 * k)), axes))
    return np.moveaxis(out, list(range(k)), axes)


def apply_unitary(rho: DensityMatrix, gate: Gate) -> DensityMatrix:
    """rho -> U rho U^dagger with U lifted to the full register."""
    n = rho.n_qubits
    if any(t >= n for t in gate.targets):
        raise DataError(f"gate {gate} targets outside register of {n} qubits")
    mat = gate_matrix(gate)
    # Axis n-1-q carries the row index of qubit q; column axes are offset by n.
    row_axes = [n - 1 - q for q in gate.targets]
    col_axes = [2 * n - 1 - q for q in gate.targets]
    t = rho.data.reshape([2] * (2 * n))
    t = _contract(t, mat, row_axes, 2 * n)
    t = _contract(t, mat.conj(), col_axes, 2 * n)
    return DensityMatrix(n, t.reshape(2**n, 2**n))


def apply_circuit_unitaries(rho: DensityMatrix, circuit: Circuit) -> DensityMatrix:
    """Apply every gate of the circuit with no noise."""
    for g in circuit.ops:
        rho = apply_unitary(rho, g)
    return rho


def probabilities(rho: DensityMatrix, qubits: tuple[int, ...] | list[int]) -> np.ndarray:
    """Outcome distribution over the listed qubits.

    The first listed qubit is the least-significant bit of the outcome
    index, matching the global bit-order convention.
    """
    n = rho.n_qubits
    qubits = tuple(qubits)
    if len(set(qubits)) != len(qubits):
        raise DataError("measured qubits must be distinct")
    if any(q < 0 or q >= n for q in qubits):
        raise DataError("measured qubit index out of range")
    diag = np.real(np.diagonal(rho.data)).reshape([2] * n)
    keep_axes = [n - 1 - q for q in qubits]
    drop = tuple(ax for ax in range(n) if ax not in keep_axes)
    marg = diag.sum(axis=drop) if drop else diag
    # marg axes are the kept axes in register order; reorder so the first
    # listed qubit becomes the last (least-significant) axis.
    remaining = [ax for ax in range(n) if ax not in drop]
    order = [remaining.index(n - 1 - q) for q in reversed(qubits)]
    probs = np.transpose(marg, axes=order).reshape(-1)
    return np.maximum(probs, 0.0)


def sample_shots(p: np.ndarray, shots: int, seed: int) -> ShotHistogram:
    """Seeded multinomial draw from a probability vector."""
    if shots <= 0:
        raise DataError("shots must be positive")
    p = np.asarray(p, dtype=float)
    total = p.sum()
    if abs(total - 1.0) > 1e-8:
        raise DataError(f"probability vector sums to {total}, not 1")
    p = p / total
    rng = np.random.default_rng(seed)
    draws = rng.multinomial(shots, p)
    n_bits = int(np.log2(len(p)))
    counts = {bitstring(i, n_bits): int(c) for i, c in enumerate(draws) if c > 0}
    return ShotHistogram(counts, shots)


def pauli_matrix(word: str) -> np.ndarray:
    """Dense matrix of a Pauli word (word[q] acts on qubit q)."""
    mat = PAULI_1Q[word[-1]]
    for letter in reversed(word[:-1]):
        mat = np.kron(mat, PAULI_1Q[letter])
    return mat


def pauli_expectation(rho: DensityMatrix, word: str) -> float:
    """Tr(P rho) for the Pauli word P; imaginary part must vanish."""
    if len(word) != rho.n_qubits:
        raise DataError(f"word {word!r} does not match {rho.n_qubits} qubits")
    val = np.trace(pauli_matrix(word) @ rho.data)
    if abs(val.imag) > 1e-10:
        raise DataError(f"expectation of {word!r} has imaginary part {val.imag}")
    return float(val.real)


def derive_seed(*parts) -> int:
    """Stable 64-bit seed from a tuple of ints/strings.

    Used to give every (bond length, angle, circuit) task its own stream so
    serial and parallel runs agree bit-for-bit.
    """
    digest = hashlib.sha256(repr(parts).encode()).digest()
    return int.from_bytes(digest[:8], "little")
