import json

import numpy as np
import pytest

from ionjump.dft import (
    bit_reverse,
    calibrate_gamma,
    dft_experiment,
    dft_input_function,
    frequency_distribution,
    ideal_dft_amplitudes,
    ideal_dft_oracle,
    integrated_upper_population,
    qft_gates,
    qft_program,
    resolve_gamma11,
    write_bins_csv,
    write_summary_json,
    write_trajectories_csv,
)
from ionjump.errors import ValidationError, ZeroFunction
from ionjump.gates import run_program_exact
from ionjump.register import QuantumState, RegisterLayout

# 32-point spectrum of f(n) = [n = 8 mod 10], frozen from the direct
# O(N^2) summation oracle
GOLDEN_SPECTRUM = np.array([
    0.09375000000000001, 0.0005734657100681877, 0.001787217450560522,
    0.08447637179602337, 0.010416666666666682, 0.007486410753416136,
    0.06071278254943953, 0.032463751740492465, 0.010416666666666666,
    0.03246375174049238, 0.0607127825494396, 0.007486410753416129,
    0.010416666666666704, 0.08447637179602346, 0.0017872174505604746,
    0.0005734657100682039, 0.09375000000000001, 0.0005734657100682265,
    0.0017872174505605045, 0.08447637179602337, 0.010416666666666808,
    0.007486410753416119, 0.060712782549439556, 0.03246375174049249,
    0.010416666666666666, 0.032463751740491764, 0.06071278254943982,
    0.0074864107534161626, 0.010416666666666356, 0.08447637179602349,
    0.0017872174505605678, 0.0005734657100681291,
])


def test_oracle_delta_input_is_flat():
    f = np.zeros(8)
    f[0] = 1.0
    assert np.allclose(ideal_dft_oracle(f), np.full(8, 1.0 / 8.0))


def test_oracle_normalizes_and_conserves():
    rng = np.random.default_rng(3)
    f = rng.normal(size=16)
    probs = ideal_dft_oracle(f)
    assert probs.sum() == pytest.approx(1.0)
    assert np.allclose(probs, ideal_dft_oracle(5.0 * f))


def test_oracle_rejects_bad_input():
    with pytest.raises(ZeroFunction):
        ideal_dft_oracle(np.zeros(8))
    with pytest.raises(ValidationError):
        ideal_dft_oracle(np.ones(6))


def test_oracle_golden_spectrum():
    f = dft_input_function(5)
    assert np.nonzero(f)[0].tolist() == [8, 18, 28]
    probs = ideal_dft_oracle(f)
    assert np.max(np.abs(probs - GOLDEN_SPECTRUM)) < 1e-15
    # dominant peaks sit near multiples of 32/10
    top = set(np.argsort(probs)[-6:])
    assert {0, 3, 13, 16, 19, 29} == top


def test_bit_reverse():
    assert bit_reverse(0b10110, 5) == 0b01101
    for value in range(32):
        assert bit_reverse(bit_reverse(value, 5), 5) == value


def test_circuit_matches_oracle_exactly():
    layout = RegisterLayout(n_ions=3, phonon_cutoff=3)
    f = np.zeros(8)
    f[3], f[5] = 1.0, 0.5
    initial = QuantumState.from_computational(layout, {3: 1.0, 5: 0.5})
    out = run_program_exact(qft_program(layout), layout, initial.amplitudes)
    state = QuantumState(layout=layout, amplitudes=out)
    assert np.max(np.abs(frequency_distribution(state) - ideal_dft_oracle(f))) < 1e-12
    assert state.leakage() < 1e-12
    assert state.phonon_excited_population() < 1e-12


def test_qft_gate_count():
    gates = qft_gates(5)
    assert len(gates) == 5 + 10    # Hadamards + controlled phases


def test_auto_gamma_modes():
    layout = RegisterLayout(n_ions=5, phonon_cutoff=3)
    f = dft_input_function(5)
    initial = QuantumState.from_computational(
        layout, {int(n): 1.0 for n in np.nonzero(f)[0]})
    program = qft_program(layout)
    half = resolve_gamma11("auto", program, layout, initial, auto_mode="mean-half")
    assert half == pytest.approx(1.0 / (5.0 * program.duration))
    measured = resolve_gamma11("auto", program, layout, initial, auto_mode="measured")
    integral = integrated_upper_population(program, layout, initial)
    assert measured == pytest.approx(1.0 / (2.0 * integral))
    # the compiled network parks excitation in the bus, so the true mean
    # excitation sits well below the coarse 1/2 estimate
    assert 0.25 < integral / (5.0 * program.duration) < 0.40
    assert resolve_gamma11(0.25, program, layout, initial) == 0.25
    with pytest.raises(ValidationError):
        resolve_gamma11("magic", program, layout, initial)
    with pytest.raises(ValidationError):
        resolve_gamma11(-1.0, program, layout, initial)


def test_calibration_is_deterministic_and_scales():
    layout = RegisterLayout(n_ions=2, phonon_cutoff=3)
    initial = QuantumState.from_computational(layout, {1: 1.0, 2: 1.0})
    program = qft_program(layout)
    first = calibrate_gamma(program, layout, initial, t_ratio=1.0, n_pilot=40)
    second = calibrate_gamma(program, layout, initial, t_ratio=1.0, n_pilot=40)
    assert first == second
    assert first > 0.0


def test_experiment_gamma_zero_reproduces_oracle():
    report = dft_experiment(n_trajectories=1, gamma11=0.0, seed0=3)
    assert report.records[0].emitted_count == 0
    assert report.records[0].fidelity == pytest.approx(1.0, abs=1e-9)
    assert np.max(np.abs(report.distributions[0] - report.oracle_distribution)) < 1e-9
    assert report.class_counts() == {"zero": 1, "one": 0, "multi": 0}


def test_experiment_statistics_and_artifacts(tmp_path):
    report = dft_experiment(n_trajectories=4, gamma11=2e-4, seed0=20)
    assert report.n_trajectories == 4
    assert report.mean_jump_count == pytest.approx(
        np.mean([r.emitted_count for r in report.records]))
    counts = report.class_counts()
    assert sum(counts.values()) == 4

    write_trajectories_csv(report, tmp_path / "trajectories.csv")
    write_summary_json(report, tmp_path / "summary.json")
    write_bins_csv(report, tmp_path / "bins.csv", class_name="one")

    lines = (tmp_path / "trajectories.csv").read_text().splitlines()
    assert lines[0] == "seed,jump_count,jump_times,fidelity"
    assert len(lines) == 5
    assert lines[1].startswith("20,")

    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["n_trajectories"] == 4
    assert summary["seed0"] == 20
    assert len(summary["oracle_distribution"]) == 32
    assert set(summary["class_counts"]) == {"zero", "one", "multi"}
    assert sum(summary["fidelity_histogram"]["counts"]) == 4
    assert len(summary["fidelity_histogram"]["bin_edges"]) == 21

    bins = (tmp_path / "bins.csv").read_text().splitlines()
    assert bins[0] == "k,ideal_prob,trajectory_prob,class"
    assert len(bins) == 33


def test_experiment_deterministic_artifacts(tmp_path):
    for tag in ("a", "b"):
        report = dft_experiment(n_trajectories=3, gamma11=2e-4, seed0=9)
        write_trajectories_csv(report, tmp_path / f"{tag}.csv")
        write_summary_json(report, tmp_path / f"{tag}.json")
        write_bins_csv(report, tmp_path / f"{tag}_bins.csv")
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
    assert (tmp_path / "a_bins.csv").read_bytes() == (tmp_path / "b_bins.csv").read_bytes()


def test_experiment_rejects_bad_trajectory_count():
    with pytest.raises(ValidationError):
        dft_experiment(n_trajectories=0, gamma11=0.0)
