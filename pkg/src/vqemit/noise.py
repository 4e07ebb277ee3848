"""Noise channels and noisy circuit execution.

Depolarizing noise is attached after every gate, on exactly the gate's
target qubits (p1 for one-qubit gates, p2 for two-qubit gates). Readout
confusion is applied to the exact outcome distribution rather than by
flipping sampled bits; identical in expectation, one less variance source.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .densesim import (
    Circuit,
    DensityMatrix,
    ShotHistogram,
    apply_unitary,
    init_state,
    probabilities,
    sample_shots,
)
from .errors import DataError


@dataclass(frozen=True)
class NoiseModel:
    """Depolarizing rates plus a symmetric-per-qubit readout confusion pair.

    p01 = Pr(read 1 | true 0), p10 = Pr(read 0 | true 1), applied to every
    measured qubit.
    """

    p1: float = 0.0
    p2: float = 0.0
    readout_p01: float = 0.0
    readout_p10: float = 0.0

    def __post_init__(self):
        for name in ("p1", "p2", "readout_p01", "readout_p10"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise DataError(f"noise parameter {name}={v} outside [0, 1]")

    @property
    def has_readout_error(self) -> bool:
        return self.readout_p01 > 0.0 or self.readout_p10 > 0.0


NOISELESS = NoiseModel()


@dataclass(frozen=True)
class ExecutionMode:
    """Exact probability vectors, or seeded multinomial sampling."""

    shots: int | None = None
    seed: int | None = None

    def __post_init__(self):
        if self.shots is not None and self.shots <= 0:
            raise DataError("shots must be positive when sampling")

    @property
    def is_exact(self) -> bool:
        return self.shots is None

    @classmethod
    def exact(cls) -> "ExecutionMode":
        return cls()

    @classmethod
    def sampled(cls, shots: int, seed: int) -> "ExecutionMode":
        return cls(shots=shots, seed=seed)


def _replace_with_mixed(tensor: np.ndarray, n: int, qubit: int) -> np.ndarray:
    """Replace one qubit's marginal with I/2, in [2]*2n tensor form."""
    ra, ca = n - 1 - qubit, 2 * n - 1 - qubit
    partial = np.trace(tensor, axis1=ra, axis2=ca)
    out = np.zeros_like(tensor)
    for b in (0, 1):
        idx = [slice(None)] * (2 * n)
        idx[ra] = b
        idx[ca] = b
        out[tuple(idx)] = 0.5 * partial
    return out


def depolarize(rho: DensityMatrix, targets: tuple[int, ...], p: float) -> DensityMatrix:
    """E(rho) = p * (I/2^k tensor Tr_targets rho) + (1-p) * rho."""
    if not 0.0 <= p <= 1.0:
        raise DataError(f"depolarizing probability {p} outside [0, 1]")
    if not 1 <= len(targets) <= 2:
        raise DataError("depolarize acts on one or two qubits")
    if p == 0.0:
        return rho
    n = rho.n_qubits
    mixed = rho.data.reshape([2] * (2 * n))
    # Replacing marginals qubit-by-qubit composes to the joint replacement.
    for q in targets:
        mixed = _replace_with_mixed(mixed, n, q)
    data = p * mixed.reshape(2**n, 2**n) + (1.0 - p) * rho.data
    return DensityMatrix(n, data)


def readout_matrix(n_qubits: int, p01: float, p10: float) -> np.ndarray:
    """Column-stochastic confusion matrix C = per-qubit [[1-p01, p10], [p01, 1-p10]]."""
    c1 = np.array([[1.0 - p01, p10], [p01, 1.0 - p10]])
    mat = c1
    for _ in range(n_qubits - 1):
        mat = np.kron(mat, c1)
    return mat


def apply_readout_error(p: np.ndarray, model: NoiseModel) -> np.ndarray:
    """p -> C p, applied one qubit at a time."""
    if not model.has_readout_error:
        return np.asarray(p, dtype=float)
    n = int(np.log2(len(p)))
    c1 = np.array([[1.0 - model.readout_p01, model.readout_p10],
                   [model.readout_p01, 1.0 - model.readout_p10]])
    t = np.asarray(p, dtype=float).reshape([2] * n)
    for axis in range(n):
        t = np.tensordot(c1, t, axes=([1], [axis]))
        t = np.moveaxis(t, 0, axis)
    return t.reshape(-1)


def final_state(
    circuit: Circuit,
    model: NoiseModel,
    noise_free_gates: frozenset[str] = frozenset(),
) -> DensityMatrix:
    """Run the circuit, attaching depolarizing noise after each gate."""
    rho = init_state(circuit.n_qubits)
    for gate in circuit.ops:
        rho = apply_unitary(rho, gate)
        if gate.name in noise_free_gates:
            continue
        p = model.p1 if len(gate.targets) == 1 else model.p2
        if p > 0.0:
            rho = depolarize(rho, gate.targets, p)
    return rho


def execute(
    circuit: Circuit,
    model: NoiseModel,
    mode: ExecutionMode,
    noise_free_gates: frozenset[str] = frozenset(),
) -> np.ndarray | ShotHistogram:
    """Noisy execution: gates + depolarizing, then readout confusion, then sampling."""
    rho = final_state(circuit, model, noise_free_gates)
    p = probabilities(rho, circuit.measured_qubits)
    p = apply_readout_error(p, model)
    if mode.is_exact:
        return p
    return sample_shots(p, mode.shots, mode.seed)
