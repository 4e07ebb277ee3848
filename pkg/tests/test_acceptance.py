"""Acceptance suite: one test per acceptance criterion, each printing a
PASS/FAIL line with the measured numbers at the stated tolerances."""

import time

import numpy as np
import pytest

from vqemit.chem import exact_ground_energy, hamiltonian
from vqemit.circuits import MeasurementBasis, bare_ansatz, encoded_ansatz
from vqemit.cli import RUN_PRESETS, main
from vqemit.densesim import sample_shots
from vqemit.errors import NumericalGuardError
from vqemit.mitigation import (
    brem_unfold,
    duplicate_estimate,
    duplicate_oracle,
    duplicate_weighted_means,
    postselect_probs,
)
from vqemit.noise import NOISELESS, ExecutionMode, NoiseModel, execute
from vqemit.vqe import ScanConfig, gate_error_sweep, run_scan

from conftest import random_mixed_density
from test_mitigation import dup_probs_from_rho, flip_matrix


def report(tag: str, ok: bool, detail: str = "") -> bool:
    status = "PASS" if ok else "FAIL"
    print(f"\nACCEPTANCE {tag}: {status}  {detail}")
    return ok


# --------------------------------------------------------------------------
# Criterion 1: noise-free baseline, exact and sampled, with runtime bound.
# --------------------------------------------------------------------------


def test_criterion_1_noise_free_baseline(table):
    start = time.monotonic()
    records = run_scan(ScanConfig(family="bare"), table)
    elapsed = time.monotonic() - start
    worst_exact = max(abs(r.e_raw - r.e_exact) for r in records)

    sampled = run_scan(ScanConfig(family="bare", shots=8192, seed=2022), table)
    worst_shots = max(abs(r.e_raw - r.e_exact) for r in sampled)

    ok = worst_exact <= 1e-3 and worst_shots <= 0.01 and elapsed < 60.0
    assert report(
        "1 noise-free baseline",
        ok,
        f"exact worst {worst_exact:.2e} Ha (<=1e-3), 8192-shot worst "
        f"{worst_shots:.4f} Ha (<=0.01), exact scan {elapsed:.1f}s (<60s)",
    )


# --------------------------------------------------------------------------
# Criterion 2: encoding equivalence and fault injection.
# --------------------------------------------------------------------------


def test_criterion_2_encoding_equivalence(table):
    rng = np.random.default_rng(2)
    worst = 0.0
    for _ in range(16):
        theta = float(rng.uniform(-np.pi, np.pi))
        basis = list(MeasurementBasis)[int(rng.integers(3))]
        bare = execute(bare_ansatz(theta, basis), NOISELESS, ExecutionMode.exact())
        phys = execute(encoded_ansatz(theta, basis), NOISELESS, ExecutionMode.exact())
        decoded, kept = postselect_probs(phys)
        worst = max(worst, float(np.max(np.abs(decoded - bare))), abs(kept - 1.0))

    from vqemit.densesim import Gate, apply_unitary, bitstring, init_state, probabilities
    from vqemit.mitigation import decode_logical_key, passes_checks

    injections_ok = 0
    circ = encoded_ansatz(0.63, MeasurementBasis.ZZ)
    baseline, _ = postselect_probs(execute(circ, NOISELESS, ExecutionMode.exact()))
    for pauli in ("X", "Y", "Z"):
        for qubit in range(4):
            rho = init_state(6)
            for op in circ.ops[:6]:
                rho = apply_unitary(rho, op)
            rho = apply_unitary(rho, Gate(pauli, (qubit,)))
            for op in circ.ops[6:]:
                rho = apply_unitary(rho, op)
            p = probabilities(rho, circ.measured_qubits)
            kept = np.zeros(4)
            kept_mass = 0.0
            for idx, prob in enumerate(p):
                key = bitstring(idx, 6)
                if passes_checks(key):
                    kept_mass += prob
                    kept[int(decode_logical_key(key), 2)] += prob
            detected = kept_mass <= 1e-12
            benign = kept_mass > 1e-12 and np.allclose(
                kept / kept_mass, baseline, atol=1e-9
            )
            if detected or benign:
                injections_ok += 1

    ok = worst <= 1e-10 and injections_ok == 12
    assert report(
        "2 encoding equivalence",
        ok,
        f"equivalence worst dev {worst:.2e} (<=1e-10), fault injections "
        f"{injections_ok}/12 detected-or-benign",
    )


# --------------------------------------------------------------------------
# Criterion 3: duplicate estimator correctness.
# --------------------------------------------------------------------------


def test_criterion_3_duplicate_estimator():
    from vqemit.mitigation import DUPLICATE_DENOMINATOR_WEIGHTS, PAIR_SWAP, PAIR_Z, _weight_vector

    shots = 2**17
    rng = np.random.default_rng(3)
    wn = _weight_vector([PAIR_Z, PAIR_SWAP])
    wd = DUPLICATE_DENOMINATOR_WEIGHTS
    shot_ok = exact_ok = purity_ok = 0
    for trial in range(20):
        rho = random_mixed_density(rng, 2)
        p = dup_probs_from_rho(rho)
        oracle = duplicate_oracle(rho, "ZI")
        purity = float(np.real(np.trace(rho @ rho)))

        means = duplicate_weighted_means(p)
        if abs(means["z1"] / means["denominator"] - oracle) <= 1e-10:
            exact_ok += 1
        if abs(means["denominator"] - purity) <= 1e-10:
            purity_ok += 1

        hist = sample_shots(p, shots, seed=int(rng.integers(2**31)))
        num, den, ratio = duplicate_estimate(hist, {0})
        freqs = hist.frequencies()
        var_n = freqs @ (wn**2) - num**2
        var_d = freqs @ (wd**2) - den**2
        cov = freqs @ (wn * wd) - num * den
        sigma = np.sqrt(
            max(var_n / den**2 + num**2 * var_d / den**4 - 2 * num * cov / den**3, 0.0)
            / shots
        )
        if abs(ratio - oracle) <= 5 * max(sigma, 1e-12):
            shot_ok += 1

    ok = shot_ok == 20 and exact_ok == 20 and purity_ok == 20
    assert report(
        "3 duplicate estimator",
        ok,
        f"shot 5-sigma {shot_ok}/20, exact 1e-10 {exact_ok}/20, "
        f"denominator=purity {purity_ok}/20",
    )


# --------------------------------------------------------------------------
# Criterion 4: Fig. 7 analog (three sub-clauses, runtime bound).
# --------------------------------------------------------------------------


@pytest.fixture(scope="module")
def sweep_results(table):
    start = time.monotonic()
    rates = [0.02, 0.04, 0.06, 0.08, 0.10, 0.12]
    rows = gate_error_sweep(rates, 0.75, table=table)
    window = gate_error_sweep(
        [0.25, 0.30, 0.35, 0.40], 0.75, ("bare", "encoded", "duplicate"), table
    )
    elapsed = time.monotonic() - start
    by_rate: dict[float, dict[str, float]] = {}
    for rate, variant, err in rows + window:
        by_rate.setdefault(rate, {})[variant] = err
    return by_rate, elapsed


def test_criterion_4a_mitigation_ordering(table, sweep_results):
    by_rate, elapsed = sweep_results
    bad = [
        rate
        for rate in (0.02, 0.04, 0.06, 0.08, 0.10, 0.12)
        if not (
            by_rate[rate]["duplicate"]
            <= by_rate[rate]["encoded"]
            <= by_rate[rate]["bare"]
        )
    ]
    ok = not bad and elapsed < 300.0
    assert report(
        "4a duplicate <= encoded <= bare at 2..12%",
        ok,
        f"violations at {bad if bad else 'none'}; sweep runtime {elapsed:.0f}s (<300s)",
    )


def test_criterion_4b_ideal_b_smallest(sweep_results):
    by_rate, _ = sweep_results
    bad = [
        rate
        for rate in (0.02, 0.04, 0.06, 0.08, 0.10, 0.12)
        if any(
            by_rate[rate]["duplicate_ideal_b"] > by_rate[rate][v] + 1e-12
            for v in by_rate[rate]
        )
    ]
    assert report(
        "4b ideal-B smallest at all tested rates",
        not bad,
        f"violations at {bad if bad else 'none'}",
    )


def test_criterion_4c_crossover_window(sweep_results):
    by_rate, _ = sweep_results

    def bare_beats_both(rate):
        errs = by_rate[rate]
        return errs["bare"] < errs["encoded"] and errs["bare"] < errs["duplicate"]

    not_yet_at_25 = not bare_beats_both(0.25)
    by_40 = any(bare_beats_both(rate) for rate in (0.30, 0.35, 0.40))
    detail = {rate: bare_beats_both(rate) for rate in (0.25, 0.30, 0.35, 0.40)}
    assert report(
        "4c crossover in (25%, 40%)",
        not_yet_at_25 and by_40,
        f"bare-beats-both by rate: {detail}",
    )


# --------------------------------------------------------------------------
# Criterion 5: readout-only scenarios, BREM within 0.01 Ha everywhere.
# --------------------------------------------------------------------------


def test_criterion_5_readout_only_brem(table):
    worst = 0.0
    worst_at = None
    for rate in (0.005, 0.02, 0.04):
        nm = NoiseModel(readout_p01=rate, readout_p10=rate)
        for family in ("bare", "encoded", "duplicate"):
            cfg = ScanConfig(
                family=family, noise=nm, shots=8192, seed=2022, brem=True, jobs=4
            )
            for rec in run_scan(cfg, table):
                err = abs(rec.e_mitigated - rec.e_exact)
                if err > worst:
                    worst, worst_at = err, (rate, family, rec.r)
    ok = worst <= 0.01
    assert report(
        "5 readout-only BREM within 0.01 Ha",
        ok,
        f"worst {worst:.4f} Ha at {worst_at}",
    )


# --------------------------------------------------------------------------
# Criterion 6: depolarizing-only scenarios.
# --------------------------------------------------------------------------


def test_criterion_6_depolarizing_only(table):
    r_values = table.bond_lengths[::6]  # every 0.3 A across the curve
    brem_gap = 0.0
    for rate in (0.001, 0.005, 0.01, 0.02):
        nm = NoiseModel(p1=rate, p2=rate)
        cfg = ScanConfig(
            family="bare", noise=nm, r_values=r_values, shots=8192, seed=2022, brem=True
        )
        for rec in run_scan(cfg, table):
            brem_gap = max(brem_gap, abs(rec.e_mitigated - rec.e_raw))

    nm = NoiseModel(p1=0.02, p2=0.02)
    cfg = ScanConfig(family="encoded", noise=nm, r_values=r_values, shots=8192, seed=2022)
    improved = 0
    total = 0
    for rec in run_scan(cfg, table):
        total += 1
        if abs(rec.e_mitigated - rec.e_exact) < abs(rec.e_raw - rec.e_exact):
            improved += 1

    ok = brem_gap <= 0.005 and improved == total
    assert report(
        "6 depolarizing-only",
        ok,
        f"max |E_brem - E_raw| {brem_gap:.4f} Ha (<=0.005); post-selection "
        f"improves encoded raw at 2% for {improved}/{total} bond lengths",
    )


# --------------------------------------------------------------------------
# Criterion 7: BREM round trip, 2..6 qubits, flips up to the 10% bound.
# --------------------------------------------------------------------------


def test_criterion_7_brem_round_trip():
    rng = np.random.default_rng(0)
    failures = []
    worst = 0.0
    for n in (2, 3, 4, 5, 6):
        for rate in (0.025, 0.05, 0.075, 0.10):
            for draw in range(2):
                truth = rng.dirichlet(np.ones(2**n))
                response = flip_matrix(n, rate, 0.8 * rate)
                unfolded = brem_unfold(response @ truth, response, max_iters=100, tol=0.0)
                l1 = float(np.abs(unfolded - truth).sum())
                worst = max(worst, l1)
                if l1 > 1e-3:
                    failures.append((n, rate, round(l1, 5)))
    assert report(
        "7 BREM round trip (<=10% flips, 100 iters, L1<=1e-3)",
        not failures,
        f"worst L1 {worst:.2e}; failures {failures if failures else 'none'}",
    )


# --------------------------------------------------------------------------
# Criterion 8: byte-identical determinism, including parallel runs.
# --------------------------------------------------------------------------


def test_criterion_8_determinism(tmp_path):
    outs = []
    for tag, jobs in (("a", "1"), ("b", "1"), ("c", "3")):
        out = tmp_path / f"det_{tag}.csv"
        code = main(
            [
                "run-vqe",
                "--preset",
                "readout-only-4pct",
                "--out",
                str(out),
                "--seed",
                "2022",
                "--jobs",
                jobs,
            ]
        )
        assert code == 0
        outs.append(out.read_bytes())
    ok = outs[0] == outs[1] == outs[2]
    assert report(
        "8 determinism (byte-identical CSVs, jobs 1 and 3)",
        ok,
        f"sizes {[len(o) for o in outs]}",
    )
