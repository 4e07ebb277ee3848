"""The three mitigation estimators: iterative Bayesian readout unfolding,
[[4,2,2]] post-selection with logical decoding, and duplicate-circuit
(virtual distillation) ratio estimation.

Duplicate-circuit weights
-------------------------

After the B layer, the swap-symmetrized operators become diagonal in the
computational basis of each (copy A, copy B) qubit pair.  The per-pair
weight tables are recomputed from the B matrix at import time:

* ``PAIR_Z`` is the diagonal of B [(Z(x)I + I(x)Z)/2 . SWAP] B^T,        {00: +1, 11: -1, else 0}
* ``PAIR_SWAP`` is the diagonal of B . SWAP . B^T,                       {01: -1, else +1}

(the conjugation orientation matches measurement semantics: a weight
vector w measures the operator B^T diag(w) B).  Products of these across
pairs give unbiased single-qubit ratio estimators.  For two-qubit
observables no unbiased product weight exists (the symmetrized operator
keeps an off-diagonal remainder in the B basis); `duplicate_estimate`
uses the naive product as stated, and the scan pipeline instead uses the
two family-exact variants below, each of which is exact for the
noise-free trial-state family:

* unrotated Z1Z2: per-copy parity averaged over copies
  ((-1)^(b1+b2) evaluated on each copy's measured bits),
* rotated (XX/YY basis) terms: twice the naive pair product, whose
  spurious term Tr(Z1 sigma Z2 sigma) vanishes on the rotated family.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuits import DUPLICATE_LAYOUT
from .densesim import Gate, ShotHistogram, bitstring, gate_matrix, pauli_matrix
from .errors import (
    AllShotsDiscardedError,
    DataError,
    NumericalGuardError,
    UnstableDenominatorError,
)


def _pair_weight_tables() -> tuple[np.ndarray, np.ndarray]:
    b = gate_matrix(Gate("B", (0, 1))).real
    swap = gate_matrix(Gate("SWAP", (0, 1))).real
    z_avg = 0.5 * (pauli_matrix("ZI") + pauli_matrix("IZ")).real
    tables = []
    for op in (z_avg @ swap, swap):
        conj = b @ op @ b.T
        off = conj - np.diag(np.diag(conj))
        if np.max(np.abs(off)) > 1e-12:
            raise AssertionError("B conjugation did not diagonalize the operator")
        tables.append(np.diag(conj).copy())
    return tables[0], tables[1]


PAIR_Z, PAIR_SWAP = _pair_weight_tables()

# Outcome-index -> per-pair outcome index (2*bit(copy A) + bit(copy B)).
_PAIR_INDEX = np.array(
    [
        [2 * ((idx >> qa) & 1) + ((idx >> qb) & 1) for (qa, qb) in DUPLICATE_LAYOUT.pairs]
        for idx in range(16)
    ]
)


def _weight_vector(per_pair: list[np.ndarray]) -> np.ndarray:
    w = np.ones(16)
    for k, table in enumerate(per_pair):
        w *= table[_PAIR_INDEX[:, k]]
    return w


DUPLICATE_DENOMINATOR_WEIGHTS = _weight_vector([PAIR_SWAP, PAIR_SWAP])
_W_Z1 = _weight_vector([PAIR_Z, PAIR_SWAP])
_W_Z2 = _weight_vector([PAIR_SWAP, PAIR_Z])
_W_PAIR_PRODUCT = _weight_vector([PAIR_Z, PAIR_Z])
# Per-copy parity averaged over the two copies: bits (q0,q1) are copy A,
# (q2,q3) copy B.
_W_COPY_PARITY = np.array(
    [
        0.5 * ((-1.0) ** (((i >> 0) & 1) + ((i >> 1) & 1))
               + (-1.0) ** (((i >> 2) & 1) + ((i >> 3) & 1)))
        for i in range(16)
    ]
)


@dataclass(frozen=True)
class PostSelectionReport:
    kept_shots: int
    discarded_shots: int
    retention_ratio: float
    decoded: ShotHistogram


def estimate_response_matrix(histograms: list[ShotHistogram]) -> np.ndarray:
    """Column i = empirical outcome distribution when state i was prepared."""
    count = len(histograms)
    n = (count - 1).bit_length()
    if count < 2 or count != 2**n:
        raise DataError(f"need 2^n calibration histograms, got {count}")
    response = np.zeros((count, count))
    for i, h in enumerate(histograms):
        if h.n_bits != n:
            raise DataError("calibration histogram width does not match count")
        response[:, i] = h.frequencies()
    return response


def validate_response(response: np.ndarray) -> None:
    response = np.asarray(response)
    if response.ndim != 2 or response.shape[0] != response.shape[1]:
        raise DataError("response matrix must be square")
    if np.any(response < -1e-12) or np.any(response > 1.0 + 1e-12):
        raise DataError("response entries outside [0, 1]")
    sums = response.sum(axis=0)
    if np.max(np.abs(sums - 1.0)) > 1e-9:
        raise DataError("response columns must sum to 1")


def brem_unfold(
    measured: np.ndarray,
    response: np.ndarray,
    max_iters: int = 100,
    tol: float = 1e-6,
) -> np.ndarray:
    """Iterative Bayesian unfolding from a uniform prior truth spectrum.

    t_i <- sum_j [ R[j,i] t_i / sum_s R[j,s] t_s ] m_j, stopped at
    `max_iters` or when the L1 change drops below `tol`.
    """
    response = np.asarray(response, dtype=float)
    measured = np.asarray(measured, dtype=float)
    if response.shape[0] != len(measured):
        raise DataError("response matrix and measured spectrum disagree in size")
    if np.any(response.sum(axis=0) <= 0.0):
        raise DataError("response matrix has an all-zero column")
    total = measured.sum()
    if total <= 0.0:
        raise DataError("measured spectrum is empty")
    measured = measured / total

    return brem_unfold_batch(measured[:, None], response, max_iters, tol)[:, 0]


def brem_unfold_batch(
    measured: np.ndarray,
    response: np.ndarray,
    max_iters: int = 100,
    tol: float = 1e-6,
) -> np.ndarray:
    """Column-wise `brem_unfold` of a (dim, batch) matrix of spectra.

    Columns stop updating individually once their L1 change drops below
    `tol`, matching the single-spectrum semantics; the shared iterations
    run as matrix products.
    """
    measured = np.asarray(measured, dtype=float)
    response = np.asarray(response, dtype=float)
    if np.any(response.sum(axis=0) <= 0.0):
        raise DataError("response matrix has an all-zero column")
    totals = measured.sum(axis=0)
    if np.any(totals <= 0.0):
        raise DataError("measured spectrum is empty")
    measured = measured / totals

    dim, batch = response.shape[1], measured.shape[1]
    truth = np.full((dim, batch), 1.0 / dim)
    active = np.ones(batch, dtype=bool)
    for _ in range(max_iters):
        t_act = truth[:, active]
        m_act = measured[:, active]
        predicted = response @ t_act
        ratio = np.divide(
            m_act, predicted, out=np.zeros_like(m_act), where=predicted > 1e-300
        )
        updated = np.maximum(t_act * (response.T @ ratio), 0.0)
        sums = updated.sum(axis=0)
        if np.any(sums <= 0.0):
            raise NumericalGuardError("unfolding collapsed to the zero vector")
        updated /= sums
        deltas = np.abs(updated - t_act).sum(axis=0)
        truth[:, active] = updated
        still = deltas >= tol
        if not np.any(still):
            break
        active[np.nonzero(active)[0][~still]] = False
    return truth


def _split_key(key: str) -> tuple[int, int, int, int, int, int]:
    """6-bit key ordered (a2 a1 b4 b3 b2 b1) -> individual bits."""
    a2, a1, b4, b3, b2, b1 = (int(c) for c in key)
    return a2, a1, b4, b3, b2, b1


def decode_logical_key(key: str) -> str:
    """Logical (z2 z1) bitstring from a 6-bit physical key, no checks applied."""
    _, _, b4, b3, b2, b1 = _split_key(key)
    z1 = b3 ^ b1
    z2 = b2 ^ b1
    return f"{z2}{z1}"


def passes_checks(key: str) -> bool:
    a2, a1, b4, b3, b2, b1 = _split_key(key)
    return a1 == 0 and a2 == 0 and (b1 ^ b2 ^ b3 ^ b4) == 0


def qec_postselect(h: ShotHistogram) -> PostSelectionReport:
    """Discard flagged or parity-violating shots, decode the rest, renormalize."""
    if h.n_bits != 6:
        raise DataError("post-selection expects 6-bit keys (a2 a1 b4 b3 b2 b1)")
    decoded: dict[str, int] = {}
    kept = 0
    for key, count in h.counts.items():
        if not passes_checks(key):
            continue
        kept += count
        logical = decode_logical_key(key)
        decoded[logical] = decoded.get(logical, 0) + count
    if kept == 0:
        raise AllShotsDiscardedError("post-selection discarded every shot")
    return PostSelectionReport(
        kept_shots=kept,
        discarded_shots=h.shots - kept,
        retention_ratio=kept / h.shots,
        decoded=ShotHistogram(decoded, kept),
    )


_KEEP_MASK = np.array([passes_checks(bitstring(i, 6)) for i in range(64)])
_DECODE_INDEX = np.array([int(decode_logical_key(bitstring(i, 6)), 2) for i in range(64)])


def postselect_probs(p6: np.ndarray) -> tuple[np.ndarray, float]:
    """Exact-mode analog of `qec_postselect` on a 64-entry distribution."""
    if len(p6) != 64:
        raise DataError("expected a 64-entry distribution")
    out = np.bincount(
        _DECODE_INDEX[_KEEP_MASK], weights=np.asarray(p6)[_KEEP_MASK], minlength=4
    )
    kept = out.sum()
    if kept <= 0.0:
        raise AllShotsDiscardedError("post-selection removed all probability mass")
    return out / kept, float(kept)


def decode_probs_unchecked(p6: np.ndarray) -> np.ndarray:
    """Decode every outcome to logical bits with no discarding (raw curve)."""
    if len(p6) != 64:
        raise DataError("expected a 64-entry distribution")
    return np.bincount(_DECODE_INDEX, weights=np.asarray(p6), minlength=4)


_PARITY_SIGNS: dict[tuple[int, int], np.ndarray] = {}


def parity_signs(dim: int, qubits: tuple[int, ...] | set[int]) -> np.ndarray:
    mask = 0
    for q in qubits:
        mask |= 1 << q
    key = (dim, mask)
    if key not in _PARITY_SIGNS:
        _PARITY_SIGNS[key] = np.array(
            [(-1.0) ** bin(idx & mask).count("1") for idx in range(dim)]
        )
    return _PARITY_SIGNS[key]


def expectation_from_probs(p: np.ndarray, qubits: tuple[int, ...] | set[int]) -> float:
    """Parity expectation sum_b freq(b) * (-1)^(bits of b on `qubits`)."""
    return float(np.dot(p, parity_signs(len(p), qubits)))


def expectation_from_histogram(h: ShotHistogram, qubits: tuple[int, ...] | set[int]) -> float:
    if not h.counts:
        raise DataError("empty histogram")
    return expectation_from_probs(h.frequencies(), qubits)


def duplicate_weighted_means(freqs: np.ndarray) -> dict[str, float]:
    """Shot-averaged duplicate-circuit weights for a 16-entry distribution.

    Keys: z1, z2 (unbiased single-qubit numerators), pair_product (naive
    two-qubit numerator), copy_parity (per-copy parity average), and
    denominator (swap weights on both pairs, estimating Tr(rho^2)).
    """
    if len(freqs) != 16:
        raise DataError("duplicate-circuit distributions have 16 outcomes")
    return {
        "z1": float(np.dot(freqs, _W_Z1)),
        "z2": float(np.dot(freqs, _W_Z2)),
        "pair_product": float(np.dot(freqs, _W_PAIR_PRODUCT)),
        "copy_parity": float(np.dot(freqs, _W_COPY_PARITY)),
        "denominator": float(np.dot(freqs, DUPLICATE_DENOMINATOR_WEIGHTS)),
    }


def duplicate_estimate(
    h: ShotHistogram, observable_pairs: tuple[int, ...] | set[int]
) -> tuple[float, float, float]:
    """Ratio estimator for Z-type observables on the listed pairs (0-based).

    Per shot the numerator weight is the product of PAIR_Z over the listed
    pairs and PAIR_SWAP over the rest; the denominator weight is PAIR_SWAP
    on every pair.  Single-pair observables estimate Tr(Z rho^2)/Tr(rho^2)
    without bias; for both pairs the product carries a known remainder and
    `duplicate_oracle` should be consulted alongside.
    """
    pairs = set(observable_pairs)
    if not pairs or not pairs.issubset({0, 1}):
        raise DataError("observable pairs must be a nonempty subset of {0, 1}")
    if h.n_bits != 4:
        raise DataError("duplicate estimator expects 4-bit keys")
    freqs = h.frequencies()
    tables = [PAIR_Z if k in pairs else PAIR_SWAP for k in range(2)]
    numerator = float(np.dot(freqs, _weight_vector(tables)))
    denominator = float(np.dot(freqs, DUPLICATE_DENOMINATOR_WEIGHTS))
    if abs(denominator) < 10.0 / h.shots:
        raise UnstableDenominatorError(
            f"denominator {denominator:.3e} below 10/shots; ratio variance diverges"
        )
    return numerator, denominator, numerator / denominator


def duplicate_oracle(rho_data: np.ndarray, word: str) -> float:
    """Tr(O rho^2) / Tr(rho^2) by direct matrix algebra (N = 2)."""
    rho_sq = rho_data @ rho_data
    purity = float(np.real(np.trace(rho_sq)))
    if purity < 1e-12:
        raise NumericalGuardError("state purity below 1e-12; ratio undefined")
    val = np.trace(pauli_matrix(word) @ rho_sq) / purity
    return float(np.real(val))


def read_histogram_csv(path) -> ShotHistogram:
    """CSV with header `bitstring,count`."""
    lines = [ln.strip() for ln in open(path) if ln.strip() and not ln.startswith("#")]
    if not lines or lines[0] != "bitstring,count":
        raise DataError(f"{path}: expected header 'bitstring,count'")
    counts: dict[str, int] = {}
    for lineno, line in enumerate(lines[1:], start=2):
        fields = line.split(",")
        if len(fields) != 2:
            raise DataError(f"{path}:{lineno}: expected 2 columns")
        key, value = fields[0], int(fields[1])
        if value < 0 or any(c not in "01" for c in key):
            raise DataError(f"{path}:{lineno}: bad histogram row")
        counts[key] = counts.get(key, 0) + value
    if not counts:
        raise DataError(f"{path}: histogram has no rows")
    return ShotHistogram(counts, sum(counts.values()))


def write_histogram_csv(path, h: ShotHistogram) -> None:
    with open(path, "w") as fh:
        fh.write("bitstring,count\n")
        for key in sorted(h.counts):
            fh.write(f"{key},{h.counts[key]}\n")


def read_response_csv(path) -> np.ndarray:
    """Row-major response matrix; first line `n_qubits=<n>`."""
    lines = [ln.strip() for ln in open(path) if ln.strip() and not ln.startswith("#")]
    if not lines or not lines[0].startswith("n_qubits="):
        raise DataError(f"{path}: expected 'n_qubits=<n>' header")
    n = int(lines[0].split("=", 1)[1])
    dim = 2**n
    if len(lines) - 1 != dim:
        raise DataError(f"{path}: expected {dim} matrix rows, got {len(lines) - 1}")
    rows = []
    for line in lines[1:]:
        row = [float(f) for f in line.split(",")]
        if len(row) != dim:
            raise DataError(f"{path}: expected {dim} columns per row")
        rows.append(row)
    response = np.array(rows)
    validate_response(response)
    return response


def write_response_csv(path, response: np.ndarray) -> None:
    n = int(np.log2(response.shape[0]))
    with open(path, "w") as fh:
        fh.write(f"n_qubits={n}\n")
        for row in response:
            fh.write(",".join(f"{v:.12g}" for v in row) + "\n")
