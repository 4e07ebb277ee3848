"""Builders for the three circuit families plus shared Pauli-exponential
and calibration-circuit fragments.

Register layouts (bitstring written left-to-right from the highest qubit):

* bare:      2 qubits, bitstring (q2 q1).
* encoded:   6 qubits (b1..b4 = 0..3, flag a1 = 4, rotation ancilla a2 = 5),
             bitstring (a2 a1 b4 b3 b2 b1).
* duplicate: 4 qubits, copy A on (0, 1), copy B on (2, 3), bitstring
             (q4 q3 q2 q1); B gates act on pairs (0, 2) and (1, 3).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .densesim import Circuit, Gate
from .errors import DataError


class MeasurementBasis(Enum):
    ZZ = "ZZ"
    XX = "XX"
    YY = "YY"


@dataclass(frozen=True)
class CodeSpec:
    """[[4,2,2]] error-detecting code data, in ascending-qubit Pauli words."""

    n_data: int = 4
    stabilizers: tuple[str, ...] = ("ZZZZ", "XXXX")
    logical_x1: str = "XXII"  # X2 X1
    logical_x2: str = "XIXI"  # X3 X1
    logical_z1: str = "ZIZI"  # Z3 Z1
    logical_z2: str = "ZZII"  # Z2 Z1

    def codewords(self) -> dict[str, np.ndarray]:
        """Logical basis states keyed by (z2 z1) bitstring."""
        vecs = {}
        pairs = {"00": (0b0000, 0b1111), "01": (0b0011, 0b1100),
                 "10": (0b0101, 0b1010), "11": (0b0110, 0b1001)}
        for label, (a, b) in pairs.items():
            v = np.zeros(16, dtype=complex)
            v[a] = v[b] = 1.0 / np.sqrt(2.0)
            vecs[label] = v
        return vecs


CODE = CodeSpec()


@dataclass(frozen=True)
class DuplicateLayout:
    """Two copies of a two-qubit subsystem, paired qubit-by-qubit."""

    n_subsystems: int = 2
    qubits_per_subsystem: int = 2
    pairs: tuple[tuple[int, int], ...] = ((0, 2), (1, 3))


DUPLICATE_LAYOUT = DuplicateLayout()

ANSATZ_WORD = "YX"  # exp(-i theta Y1 X2) applied to |00>


def _basis_change(letter: str, qubit: int, invert: bool) -> list[Gate]:
    """Single-qubit rotation taking the letter's eigenbasis to/from Z."""
    if letter == "Z":
        return []
    if letter == "X":
        return [Gate("H", (qubit,))]
    if letter == "Y":
        if invert:
            return [Gate("H", (qubit,)), Gate("S", (qubit,))]
        return [Gate("SDG", (qubit,)), Gate("H", (qubit,))]
    raise DataError(f"no basis change for letter {letter!r}")


def pauli_exponential(
    word: str, angle: float, ancilla: int | None = None
) -> tuple[Gate, ...]:
    """Gate sequence implementing exp(-i * angle * P) exactly.

    Standard basis-change / CNOT-ladder / Rz(2*angle) / unwind construction.
    With `ancilla` given, parities accumulate on that (|0>-initialized)
    qubit instead of the last active one; the ancilla returns to |0>.
    """
    active = [q for q, letter in enumerate(word) if letter != "I"]
    if not active:
        raise DataError("cannot exponentiate the identity string")
    if ancilla in active:
        raise DataError("ancilla must be outside the Pauli support")
    ops: list[Gate] = []
    for q in active:
        ops.extend(_basis_change(word[q], q, invert=False))
    if ancilla is None:
        chain = [Gate("CNOT", (a, b)) for a, b in zip(active, active[1:])]
        rotation_target = active[-1]
    else:
        chain = [Gate("CNOT", (q, ancilla)) for q in active]
        rotation_target = ancilla
    ops.extend(chain)
    ops.append(Gate("RZ", (rotation_target,), angle=2.0 * angle))
    ops.extend(reversed(chain))
    for q in reversed(active):
        ops.extend(_basis_change(word[q], q, invert=True))
    return tuple(ops)


def _basis_rotation_ops(basis: MeasurementBasis, offset: int) -> list[Gate]:
    if basis is MeasurementBasis.XX:
        return [Gate("H", (offset,)), Gate("H", (offset + 1,))]
    if basis is MeasurementBasis.YY:
        ops = []
        for q in (offset, offset + 1):
            ops += [Gate("SDG", (q,)), Gate("H", (q,))]
        return ops
    return []


def _ucc_ops_general(theta: float, offset: int = 0) -> list[Gate]:
    """UCC exponential through the general basis-change ladder."""

    def shift(gates):
        return [Gate(g.name, tuple(t + offset for t in g.targets), g.angle) for g in gates]

    return shift(pauli_exponential(ANSATZ_WORD, theta))


def _ucc_ops_compact(theta: float, offset: int = 0) -> list[Gate]:
    """Compiled UCC exponential: conjugating by CNOT(1->2) maps Y1 to Y1 X2,
    so exp(-i theta Y1 X2) = CNOT . RY(2 theta) . CNOT exactly."""
    return [
        Gate("CNOT", (offset, offset + 1)),
        Gate("RY", (offset,), angle=2.0 * theta),
        Gate("CNOT", (offset, offset + 1)),
    ]


def bare_ansatz(theta: float, basis: MeasurementBasis) -> Circuit:
    """Two-qubit trial-state circuit with basis rotation and full readout."""
    ops = _ucc_ops_general(theta) + _basis_rotation_ops(basis, 0)
    return Circuit(2, tuple(ops), (0, 1))


def encoded_ansatz(theta: float, basis: MeasurementBasis) -> Circuit:
    """[[4,2,2]]-encoded trial state on 4 data qubits plus two ancillas.

    Preparation entangles the GHZ-type |00>_L codeword along a CNOT chain
    and copies the chain endpoints onto flag a1 (zero on the codespace).
    The logical exp(-i theta Y_L1 X_L2) is the physical exponential of
    Z1 X2 Y3 (their operator product), laddered through ancilla a2.
    Transversal H realizes the XX basis; the YY basis prepends logical
    Sdg on both logical qubits as exp(+i pi/4 Z_L) phase rotations.
    """
    a1, a2 = 4, 5
    ops: list[Gate] = [
        Gate("H", (3,)),
        Gate("CNOT", (3, 2)),
        Gate("CNOT", (2, 1)),
        Gate("CNOT", (1, 0)),
        Gate("CNOT", (3, a1)),
        Gate("CNOT", (0, a1)),
    ]
    ops += pauli_exponential("ZXYIII", theta, ancilla=a2)
    if basis is MeasurementBasis.YY:
        ops += pauli_exponential("ZIZIII", -np.pi / 4)  # Sdg on logical 1
        ops += pauli_exponential("ZZIIII", -np.pi / 4)  # Sdg on logical 2
    if basis in (MeasurementBasis.XX, MeasurementBasis.YY):
        ops += [Gate("H", (q,)) for q in range(4)]
    return Circuit(6, tuple(ops), (0, 1, 2, 3, a1, a2))


def decomposed_b(pair: tuple[int, int]) -> list[Gate]:
    """B as CNOTs and Ry rotations (exact up to global phase).

    B = CX(a,b) . CRy(pi/2; ctrl=b, tgt=a) . CX(a,b), with the controlled
    rotation expanded into two CNOTs.
    """
    a, b = pair
    return [
        Gate("CNOT", (a, b)),
        Gate("CNOT", (b, a)),
        Gate("RY", (a,), angle=-np.pi / 4),
        Gate("CNOT", (b, a)),
        Gate("RY", (a,), angle=np.pi / 4),
        Gate("CNOT", (a, b)),
    ]


def duplicate_ansatz(
    theta: float, basis: MeasurementBasis, b_decomposed: bool = False
) -> Circuit:
    """Two copies of the rotated trial circuit joined by a layer of B gates.

    The copies use the compact compiled exponential (state-identical to the
    bare circuit); the duplicated register is compiled tightly so that the
    noise budget of the copies matches the paper's four-qubit layout.
    """
    ops: list[Gate] = []
    for offset in (0, 2):
        ops += _ucc_ops_compact(theta, offset) + _basis_rotation_ops(basis, offset)
    for pair in DUPLICATE_LAYOUT.pairs:
        if b_decomposed:
            ops += decomposed_b(pair)
        else:
            ops.append(Gate("B", pair))
    return Circuit(4, tuple(ops), (0, 1, 2, 3))


def calibration_circuits(n: int) -> list[Circuit]:
    """2^n circuits; circuit k flips every qubit where bit k is set."""
    if not 1 <= n <= 8:
        raise DataError(f"calibration size {n} outside 1..8")
    circuits = []
    for k in range(2**n):
        ops = tuple(Gate("X", (q,)) for q in range(n) if (k >> q) & 1)
        circuits.append(Circuit(n, ops, tuple(range(n))))
    return circuits
