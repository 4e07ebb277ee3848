import numpy as np
import pytest

from vqemit.chem import load_coefficients
from vqemit.densesim import GATE_NAMES, Circuit, Gate


@pytest.fixture(scope="session")
def table():
    return load_coefficients("bundled")


def random_circuit(rng: np.random.Generator, n_qubits: int, depth: int = 12) -> Circuit:
    """Random circuit over the full gate set (B included only for pairs)."""
    ops = []
    one_q = ["X", "Y", "Z", "H", "S", "SDG", "RZ", "RY"]
    two_q = ["CNOT", "SWAP", "B"]
    for _ in range(depth):
        if n_qubits >= 2 and rng.random() < 0.4:
            name = two_q[rng.integers(len(two_q))]
            a, b = rng.choice(n_qubits, size=2, replace=False)
            ops.append(Gate(name, (int(a), int(b))))
        else:
            name = one_q[rng.integers(len(one_q))]
            q = int(rng.integers(n_qubits))
            angle = float(rng.uniform(-np.pi, np.pi)) if name in ("RZ", "RY") else None
            ops.append(Gate(name, (q,), angle))
    return Circuit(n_qubits, tuple(ops), tuple(range(n_qubits)))


def random_pure_density(rng: np.random.Generator, n_qubits: int) -> np.ndarray:
    dim = 2**n_qubits
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    v /= np.linalg.norm(v)
    return np.outer(v, v.conj())


def random_mixed_density(rng: np.random.Generator, n_qubits: int) -> np.ndarray:
    """Partial depolarization of a random pure state."""
    dim = 2**n_qubits
    rho = random_pure_density(rng, n_qubits)
    lam = rng.uniform(0.05, 0.9)
    return (1.0 - lam) * rho + lam * np.eye(dim) / dim


def circuit_unitary(ops, n_qubits: int) -> np.ndarray:
    """Register-frame unitary of a gate list, built by column application."""
    from vqemit.densesim import gate_matrix

    dim = 2**n_qubits
    unitary = np.eye(dim, dtype=complex)
    for gate in ops:
        mat = gate_matrix(gate)
        k = len(gate.targets)
        tensor = unitary.reshape([2] * n_qubits + [dim])
        axes = [n_qubits - 1 - q for q in gate.targets]
        lifted = np.tensordot(mat.reshape([2] * (2 * k)), tensor,
                              axes=(list(range(k, 2 * k)), axes))
        tensor = np.moveaxis(lifted, list(range(k)), axes)
        unitary = tensor.reshape(dim, dim)
    return unitary
