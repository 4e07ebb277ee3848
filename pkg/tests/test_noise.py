import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vqemit.circuits import MeasurementBasis, bare_ansatz
from vqemit.densesim import DensityMatrix, Gate, apply_unitary, init_state
from vqemit.errors import DataError
from vqemit.noise import (
    NOISELESS,
    ExecutionMode,
    NoiseModel,
    apply_readout_error,
    depolarize,
    execute,
    final_state,
    readout_matrix,
)

from conftest import random_circuit, random_mixed_density


def replace_with_mixed_oracle(rho: np.ndarray, n: int, targets: tuple[int, ...]) -> np.ndarray:
    """Independent construction of I/2^k (x) Tr_targets(rho) by index arithmetic."""
    k = len(targets)
    keep = [q for q in range(n) if q not in targets]
    out = np.zeros_like(rho)
    for i in range(2**n):
        for j in range(2**n):
            if any(((i >> q) & 1) != ((j >> q) & 1) for q in targets):
                continue
            total = 0.0 + 0.0j
            for cfg in range(2**k):
                a, b = i, j
                for pos, q in enumerate(targets):
                    bit = (cfg >> pos) & 1
                    a = (a & ~(1 << q)) | (bit << q)
                    b = (b & ~(1 << q)) | (bit << q)
                if all(((a >> q) & 1) == ((i >> q) & 1) for q in keep):
                    total += rho[a, b]
            out[i, j] = total / 2**k
    return out


class TestDepolarize:
    def test_p_zero_identity(self):
        rng = np.random.default_rng(0)
        rho = DensityMatrix(2, random_mixed_density(rng, 2))
        out = depolarize(rho, (0,), 0.0)
        assert np.allclose(out.data, rho.data)

    def test_p_one_single_qubit(self):
        out = depolarize(init_state(1), (0,), 1.0)
        assert np.allclose(out.data, np.eye(2) / 2)

    def test_half_on_ground(self):
        # 0.5 * I/2 + 0.5 * |0><0| = diag(0.75, 0.25)
        out = depolarize(init_state(1), (0,), 0.5)
        assert np.allclose(out.data, np.diag([0.75, 0.25]))

    def test_parameter_range(self):
        with pytest.raises(DataError):
            depolarize(init_state(1), (0,), 1.5)

    def test_target_count(self):
        with pytest.raises(DataError):
            depolarize(init_state(3), (0, 1, 2), 0.1)

    @pytest.mark.parametrize("targets", [(0,), (2,), (0, 2), (1, 2)])
    def test_matches_elementwise_identity(self, targets):
        # E(rho) = p * rho_cms(x)marginal + (1-p) * rho, via an independent
        # index-arithmetic construction of the replaced-marginal state.
        rng = np.random.default_rng(3)
        rho = random_mixed_density(rng, 3)
        p = 0.37
        expected = p * replace_with_mixed_oracle(rho, 3, targets) + (1 - p) * rho
        out = depolarize(DensityMatrix(3, rho), targets, p)
        assert np.allclose(out.data, expected, atol=1e-12)

    @settings(max_examples=20, deadline=None)
    @given(p=st.floats(0.0, 1.0), q=st.floats(0.0, 1.0), w=st.floats(0.0, 1.0))
    def test_linear_in_rho(self, p, q, w):
        rng = np.random.default_rng(9)
        rho1 = random_mixed_density(rng, 2)
        rho2 = random_mixed_density(rng, 2)
        mix = w * rho1 + (1 - w) * rho2
        lhs = depolarize(DensityMatrix(2, mix), (0,), p).data
        rhs = w * depolarize(DensityMatrix(2, rho1), (0,), p).data + (
            1 - w
        ) * depolarize(DensityMatrix(2, rho2), (0,), p).data
        assert np.allclose(lhs, rhs, atol=1e-12)
        # idempotent at p = 1
        once = depolarize(DensityMatrix(2, mix), (0,), 1.0)
        twice = depolarize(once, (0,), 1.0)
        assert np.allclose(once.data, twice.data, atol=1e-12)

    def test_two_qubit_is_joint_not_independent(self):
        # I/4 replacement differs from two independent single-qubit channels.
        rng = np.random.default_rng(4)
        rho = random_mixed_density(rng, 2)
        p = 0.6
        joint = depolarize(DensityMatrix(2, rho), (0, 1), p).data
        independent = depolarize(
            depolarize(DensityMatrix(2, rho), (0,), p), (1,), p
        ).data
        assert not np.allclose(joint, independent)

    def test_trace_preserved(self):
        rng = np.random.default_rng(12)
        rho = DensityMatrix(3, random_mixed_density(rng, 3))
        out = depolarize(rho, (1, 2), 0.8)
        assert abs(out.trace() - 1.0) < 1e-12


class TestReadout:
    def test_zero_rates_identity(self):
        p = np.array([0.3, 0.2, 0.1, 0.4])
        assert np.allclose(apply_readout_error(p, NOISELESS), p)

    def test_single_qubit_flip(self):
        nm = NoiseModel(readout_p01=0.04)
        assert np.allclose(apply_readout_error(np.array([1.0, 0.0]), nm), [0.96, 0.04])

    def test_two_qubit_tensor_expansion(self):
        nm = NoiseModel(readout_p01=0.02, readout_p10=0.02)
        out = apply_readout_error(np.array([1.0, 0, 0, 0]), nm)
        assert np.allclose(out, [0.9604, 0.0196, 0.0196, 0.0004])

    def test_matches_full_matrix(self):
        nm = NoiseModel(readout_p01=0.03, readout_p10=0.07)
        rng = np.random.default_rng(1)
        p = rng.dirichlet(np.ones(8))
        full = readout_matrix(3, nm.readout_p01, nm.readout_p10) @ p
        assert np.allclose(apply_readout_error(p, nm), full)

    @settings(max_examples=25, deadline=None)
    @given(
        p01=st.floats(0.0, 0.5),
        p10=st.floats(0.0, 0.5),
        seed=st.integers(0, 2**16),
    )
    def test_preserves_normalization_exactly(self, p01, p10, seed):
        rng = np.random.default_rng(seed)
        p = rng.dirichlet(np.ones(16))
        out = apply_readout_error(p, NoiseModel(readout_p01=p01, readout_p10=p10))
        assert out.sum() == pytest.approx(1.0, abs=1e-12)
        assert np.all(out >= 0)


class TestExecute:
    def test_zero_noise_reference_state(self):
        p = execute(bare_ansatz(0.0, MeasurementBasis.ZZ), NOISELESS, ExecutionMode.exact())
        assert np.allclose(p, [1, 0, 0, 0], atol=1e-12)

    def test_fully_depolarizing_uniform(self):
        nm = NoiseModel(p1=1.0, p2=1.0)
        p = execute(bare_ansatz(0.7, MeasurementBasis.ZZ), nm, ExecutionMode.exact())
        assert np.allclose(p, np.full(4, 0.25), atol=1e-12)

    def test_quarter_pi_distribution(self):
        p = execute(
            bare_ansatz(np.pi / 4, MeasurementBasis.ZZ), NOISELESS, ExecutionMode.exact()
        )
        assert np.allclose(p, [0.5, 0, 0, 0.5], atol=1e-10)

    def test_exact_vs_shot_agreement(self):
        # Total-variation distance below 0.01 at 2^17 shots.
        rng = np.random.default_rng(21)
        circ = random_circuit(rng, 3, depth=12)
        nm = NoiseModel(p1=0.01, p2=0.02, readout_p01=0.02, readout_p10=0.01)
        exact = execute(circ, nm, ExecutionMode.exact())
        hist = execute(circ, nm, ExecutionMode.sampled(2**17, seed=5))
        tv = 0.5 * np.abs(hist.frequencies() - exact).sum()
        assert tv < 0.01

    def test_noise_free_gate_exemption(self):
        nm = NoiseModel(p1=0.5, p2=0.5)
        circ = bare_ansatz(0.3, MeasurementBasis.ZZ)
        all_names = frozenset(g.name for g in circ.ops)
        exempt = execute(circ, nm, ExecutionMode.exact(), noise_free_gates=all_names)
        clean = execute(circ, NOISELESS, ExecutionMode.exact())
        assert np.allclose(exempt, clean, atol=1e-12)

    def test_final_state_marginal_uniform_when_fully_mixed(self):
        nm = NoiseModel(p1=1.0, p2=1.0)
        rho = final_state(bare_ansatz(1.1, MeasurementBasis.XX), nm)
        assert np.allclose(rho.data, np.eye(4) / 4, atol=1e-12)


def test_noise_model_validation():
    with pytest.raises(DataError):
        NoiseModel(p1=-0.1)
    with pytest.raises(DataError):
        NoiseModel(readout_p10=1.2)


def test_execution_mode_validation():
    with pytest.raises(DataError):
        ExecutionMode.sampled(0, seed=1)
    assert ExecutionMode.exact().is_exact
