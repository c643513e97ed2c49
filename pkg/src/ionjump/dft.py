"""Discrete-Fourier-transform experiment on an unstable five-ion register.

The register computes a 32-point DFT of f(n) = 1 when n = 8 (mod 10),
else 0, through the standard Fourier network (Hadamards plus controlled
phases, bus-compiled) while every ion's upper levels decay.  Ensembles
of quantum-jump trajectories are classified by emission count; even the
zero-emission class deviates from the exact spectrum because the
conditional no-click evolution is itself non-unitary.

The exact spectrum comes from ``ideal_dft_oracle``, a direct O(N^2)
summation independent of the circuit and of the integrator.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ValidationError, ZeroFunction
from .evolve import (
    DEFAULT_STEP_FACTOR,
    StepPropagator,
    TrajectoryRecord,
    conditional_dt,
    qubit_channels,
    run_trajectory,
)
from .gates import ControlledPhase, Hadamard, PulseParams, compile_gate, run_program_exact
from .hamiltonians import build_pulse_hamiltonian
from .program import InstantGate, PulseProgram
from .register import QuantumState, RegisterLayout, apply_internal_unitary

JUMP_CLASSES = ("zero", "one", "multi")


def ideal_dft_oracle(f: np.ndarray) -> np.ndarray:
    """Probability spectrum of a function by direct summation.

    Normalizes ``f`` as input amplitudes, applies
    out_k = (1/sqrt(N)) sum_n exp(+2*pi*i*k*n/N) f_n by an explicit
    O(N^2) phase sum, and returns the squared moduli.
    """
    return np.abs(ideal_dft_amplitudes(f)) ** 2


def ideal_dft_amplitudes(f: np.ndarray) -> np.ndarray:
    f = np.asarray(f, dtype=np.complex128)
    if f.ndim != 1 or f.size < 2 or (f.size & (f.size - 1)) != 0:
        raise ValidationError("f must be a vector of 2^m values, m >= 1")
    norm = np.linalg.norm(f)
    if norm == 0.0:
        raise ZeroFunction("cannot transform the all-zero function")
    psi = f / norm
    n_points = f.size
    k = np.arange(n_points)
    phases = np.exp(2j * np.pi * np.outer(k, k) / n_points)
    return phases @ psi / math.sqrt(n_points)


def dft_input_function(n_qubits: int = 5) -> np.ndarray:
    """f(n) = 1 when n = 8 (mod 10), else 0, over 2^n_qubits points."""
    n_points = 2**n_qubits
    f = np.zeros(n_points)
    f[[n for n in range(n_points) if n % 10 == 8]] = 1.0
    return f


def qft_gates(n_qubits: int) -> list:
    """Standard Fourier network: H then controlled phases pi/2^(j-k)."""
    gates = []
    for k in range(n_qubits):
        gates.append(Hadamard(k))
        for j in range(k + 1, n_qubits):
            gates.append(ControlledPhase(control=j, target=k,
                                         theta=math.pi / 2.0 ** (j - k)))
    return gates


def qft_program(layout: RegisterLayout, params: PulseParams | None = None) -> PulseProgram:
    params = params or PulseParams()
    program = PulseProgram()
    for gate in qft_gates(layout.n_ions):
        program = program + compile_gate(gate, layout, params)
    return program


def bit_reverse(value: int, n_bits: int) -> int:
    out = 0
    for _ in range(n_bits):
        out = (out << 1) | (value & 1)
        value >>= 1
    return out


def frequency_distribution(state: QuantumState) -> np.ndarray:
    """Map register bit-pattern probabilities to DFT bins.

    The Fourier network leaves its output bit-reversed; readout applies
    the reversal so bin k of the result is directly comparable with the
    oracle spectrum.
    """
    n = state.layout.n_ions
    probs = state.computational_probabilities()
    out = np.empty_like(probs)
    for pattern in range(probs.size):
        out[bit_reverse(pattern, n)] = probs[pattern]
    return out


def integrated_upper_population(program: PulseProgram, layout: RegisterLayout,
                                initial: QuantumState, include_aux: bool = True,
                                step_factor: float = DEFAULT_STEP_FACTOR) -> float:
    """Time integral of the summed upper-level population at gamma = 0.

    Used by the measured-excitation calibration mode: the expected
    emission count of a run is 2*gamma times this integral (to first
    order in gamma).
    """
    psi = initial.amplitudes.copy()
    total = 0.0
    levels = (1, 2) if include_aux else (1,)
    for item in program.items:
        if isinstance(item, InstantGate):
            psi = apply_internal_unitary(psi, layout, item.ion, item.matrix)
            continue
        hamiltonian = build_pulse_hamiltonian(item, layout)
        dt_target = conditional_dt(hamiltonian, [], step_factor)
        n_steps = max(1, math.ceil(item.duration / dt_target)) if math.isfinite(dt_target) else 1
        dt = item.duration / n_steps
        stepper = StepPropagator(hamiltonian, [], dt)
        for _ in range(n_steps):
            psi = stepper.apply(psi)
            state = QuantumState(layout=layout, amplitudes=psi)
            total += dt * sum(state.ion_level_population(ion, level)
                              for ion in range(layout.n_ions) for level in levels)
    return total


#: Fixed seed base of the calibration pilots; deliberately not derived
#: from the user's seed so the calibrated gamma is a deterministic
#: property of the experiment configuration alone.
CALIBRATION_SEED_BASE = 0x5EED_CA1B
CALIBRATION_PILOT_SIZE = 400
CALIBRATION_STEP_FACTOR = 1e-2


def _pilot_mean_jumps(program: PulseProgram, layout: RegisterLayout,
                      initial: QuantumState, gamma: float, include_aux: bool,
                      n_pilot: int, seed_base: int, step_factor: float) -> float:
    channels = qubit_channels(layout, gamma,
                              gamma_aux=gamma if include_aux else None)
    counts = 0
    for index in range(n_pilot):
        record = run_trajectory(program, layout, channels, seed_base + index,
                                initial, ideal_final=None, step_factor=step_factor)
        counts += record.emitted_count
    return counts / n_pilot


def calibrate_gamma(program: PulseProgram, layout: RegisterLayout,
                    initial: QuantumState, t_ratio: float,
                    include_aux: bool = True,
                    n_pilot: int = CALIBRATION_PILOT_SIZE,
                    seed_base: int = CALIBRATION_SEED_BASE,
                    step_factor: float = CALIBRATION_STEP_FACTOR) -> float:
    """Decay constant at which the expected emission count per run is
    ``t_ratio`` (operationally: register lifetime = T/t_ratio).

    Starts from the first-order value t_ratio/(2 * integrated gamma=0
    excitation) and applies a proportional then a secant correction
    using two fixed-seed pilot ensembles; the result is deterministic
    for a given experiment configuration.  The corrections absorb the
    back-action of the conditional no-click evolution and of the jumps
    themselves, which suppress the mean excitation below its gamma=0
    value (by roughly 15% at t_ratio = 1 for the standard experiment).
    """
    integral = integrated_upper_population(program, layout, initial,
                                           include_aux=include_aux)
    gamma0 = t_ratio / (2.0 * integral)
    # Both pilots reuse the same seed block (common random numbers), so
    # the secant slope is estimated from correlated ensembles and is not
    # swamped by sampling noise.
    mean0 = _pilot_mean_jumps(program, layout, initial, gamma0, include_aux,
                              n_pilot, seed_base, step_factor)
    if mean0 <= 0.0:
        return gamma0
    gamma1 = gamma0 * t_ratio / mean0
    mean1 = _pilot_mean_jumps(program, layout, initial, gamma1, include_aux,
                              n_pilot, seed_base, step_factor)
    if mean1 <= mean0:
        return gamma1
    gamma2 = gamma1 + (t_ratio - mean1) * (gamma1 - gamma0) / (mean1 - mean0)
    # distrust large extrapolations of the noisy slope
    if not 0.5 * gamma1 <= gamma2 <= 2.0 * gamma1:
        return gamma1
    return gamma2


def resolve_gamma11(gamma11: float | str, program: PulseProgram,
                    layout: RegisterLayout, initial: QuantumState,
                    t_ratio: float = 1.0, auto_mode: str = "calibrated",
                    include_aux: bool = True) -> float:
    """Resolve the decay constant, including the "auto" calibration.

    "auto" sets gamma so the expected emission count per run equals
    ``t_ratio``, i.e. the register lifetime is T/t_ratio.  Modes:

    * "calibrated" (default) — pilot-ensemble fixed point, see
      calibrate_gamma; exact to pilot statistics.
    * "measured" — first-order value t_ratio/(2 * integrated gamma=0
      excitation); ignores the dissipative back-action.
    * "mean-half" — the coarse estimate gamma = t_ratio/(n_ions * T)
      obtained by assigning every ion a mean excitation of 1/2.  For
      the standard experiment the true integrated excitation is nearer
      0.32, so this underdrives the emission rate by about a third.
    """
    if isinstance(gamma11, str):
        if gamma11 != "auto":
            raise ValidationError(f"gamma11 must be a number or 'auto', got {gamma11!r}")
        if auto_mode == "mean-half":
            return t_ratio / (layout.n_ions * program.duration)
        if auto_mode == "measured":
            integral = integrated_upper_population(program, layout, initial,
                                                   include_aux=include_aux)
            return t_ratio / (2.0 * integral)
        if auto_mode == "calibrated":
            return calibrate_gamma(program, layout, initial, t_ratio,
                                   include_aux=include_aux)
        raise ValidationError(f"unknown auto_mode {auto_mode!r}")
    if gamma11 < 0.0:
        raise ValidationError("gamma11 must be >= 0")
    return float(gamma11)


def jump_class(count: int) -> str:
    if count == 0:
        return "zero"
    if count == 1:
        return "one"
    return "multi"


@dataclass(frozen=True)
class EnsembleReport:
    """Per-trajectory records plus the derived ensemble statistics."""

    layout: RegisterLayout
    records: tuple[TrajectoryRecord, ...]
    distributions: np.ndarray = field(repr=False)   # (n_traj, 2^n) DFT bins
    leakages: np.ndarray = field(repr=False)
    oracle_distribution: np.ndarray = field(repr=False)
    gamma11: float
    program_duration: float
    seed0: int
    t_ratio: float

    @property
    def n_trajectories(self) -> int:
        return len(self.records)

    def jump_counts(self) -> np.ndarray:
        return np.array([r.emitted_count for r in self.records])

    @property
    def mean_jump_count(self) -> float:
        return float(self.jump_counts().mean())

    @property
    def jump_count_variance(self) -> float:
        return float(self.jump_counts().var())

    def classes(self) -> list[str]:
        return [jump_class(r.emitted_count) for r in self.records]

    def class_counts(self) -> dict[str, int]:
        classes = self.classes()
        return {name: classes.count(name) for name in JUMP_CLASSES}

    def class_indices(self, class_name: str) -> list[int]:
        return [i for i, name in enumerate(self.classes()) if name == class_name]

    def mean_fidelity(self, class_name: str | None = None) -> float | None:
        if class_name is None:
            values = [r.fidelity for r in self.records]
        else:
            values = [self.records[i].fidelity for i in self.class_indices(class_name)]
        if not values:
            return None
        return float(np.mean(values))

    def class_distribution(self, class_name: str) -> np.ndarray | None:
        idx = self.class_indices(class_name)
        if not idx:
            return None
        return self.distributions[idx].mean(axis=0)

    def fidelity_histogram(self, n_bins: int = 20) -> tuple[np.ndarray, np.ndarray]:
        """Histogram of per-trajectory fidelities over [0, 1]."""
        values = np.array([r.fidelity for r in self.records])
        return np.histogram(values, bins=n_bins, range=(0.0, 1.0))


def dft_experiment(n_trajectories: int, gamma11: float | str,
                   layout: RegisterLayout | None = None, seed0: int = 0,
                   t_ratio: float = 1.0, params: PulseParams | None = None,
                   include_aux_channel: bool = True,
                   auto_mode: str = "calibrated",
                   step_factor: float = DEFAULT_STEP_FACTOR) -> EnsembleReport:
    """Run the unstable-register DFT ensemble.

    Prepares the normalized superposition of the support of f, compiles
    the five-qubit Fourier network once, and runs ``n_trajectories``
    quantum-jump trajectories with per-trajectory seeds seed0 + index.
    ``gamma11="auto"`` calibrates the decay so the expected emission
    count per run is ``t_ratio`` (register lifetime = T/t_ratio).  With
    ``include_aux_channel`` the auxiliary gate level decays at the same
    rate as the qubit's upper level.
    """
    if n_trajectories < 1:
        raise ValidationError("n_trajectories must be >= 1")
    layout = layout or RegisterLayout(n_ions=5, phonon_cutoff=3)
    params = params or PulseParams()
    f = dft_input_function(layout.n_ions)
    support = np.nonzero(f)[0]
    initial = QuantumState.from_computational(
        layout, {int(n): 1.0 for n in support})
    program = qft_program(layout, params)
    gamma = resolve_gamma11(gamma11, program, layout, initial, t_ratio=t_ratio,
                            auto_mode=auto_mode, include_aux=include_aux_channel)
    channels = qubit_channels(layout, gamma,
                              gamma_aux=gamma if include_aux_channel else None)
    channels = [ch for ch in channels if ch.gamma > 0.0]

    ideal_final = run_program_exact(program, layout, initial.amplitudes)
    oracle = ideal_dft_oracle(f)

    records = []
    distributions = np.empty((n_trajectories, 2**layout.n_ions))
    leakages = np.empty(n_trajectories)
    for index in range(n_trajectories):
        record = run_trajectory(program, layout, channels, seed0 + index,
                                initial, ideal_final=ideal_final,
                                step_factor=step_factor)
        records.append(record)
        final = record.final_state
        distributions[index] = frequency_distribution(final)
        leakages[index] = final.leakage()

    return EnsembleReport(
        layout=layout,
        records=tuple(records),
        distributions=distributions,
        leakages=leakages,
        oracle_distribution=oracle,
        gamma11=gamma,
        program_duration=program.duration,
        seed0=seed0,
        t_ratio=t_ratio,
    )


# --------------------------------------------------------------------------
# Artifact writers (stable schemas)
# --------------------------------------------------------------------------

_FLOAT_FMT = "%.12g"


def _fmt(value: float) -> str:
    return _FLOAT_FMT % value


def write_trajectories_csv(report: EnsembleReport, path: str | Path) -> None:
    """One row per trajectory: seed, jump_count, jump_times, fidelity."""
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["seed", "jump_count", "jump_times", "fidelity"])
        for record in report.records:
            times = ";".join(_fmt(t) for t in record.jump_times())
            writer.writerow([record.seed, record.emitted_count, times,
                             _fmt(record.fidelity)])


def write_summary_json(report: EnsembleReport, path: str | Path) -> None:
    payload = {
        "n_trajectories": report.n_trajectories,
        "seed0": report.seed0,
        "gamma11": report.gamma11,
        "program_duration": report.program_duration,
        "t_ratio": report.t_ratio,
        "mean_jump_count": report.mean_jump_count,
        "jump_count_variance": report.jump_count_variance,
        "class_counts": report.class_counts(),
        "mean_fidelity": {
            "overall": report.mean_fidelity(),
            **{name: report.mean_fidelity(name) for name in JUMP_CLASSES},
        },
        "mean_leakage": float(report.leakages.mean()),
        "fidelity_histogram": {
            "counts": [int(c) for c in report.fidelity_histogram()[0]],
            "bin_edges": [float(e) for e in report.fidelity_histogram()[1]],
        },
        "oracle_distribution": [float(p) for p in report.oracle_distribution],
        "class_distributions": {
            name: (None if report.class_distribution(name) is None
                   else [float(p) for p in report.class_distribution(name)])
            for name in JUMP_CLASSES
        },
    }
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, indent=2, sort_keys=True)
        handle.write("\n")


def representative_distribution(report: EnsembleReport,
                                class_name: str) -> tuple[np.ndarray, str]:
    """First trajectory of the requested emission class, falling back to
    the first trajectory overall when the class is empty."""
    idx = report.class_indices(class_name)
    if idx:
        return report.distributions[idx[0]], class_name
    return report.distributions[0], jump_class(report.records[0].emitted_count)


def write_bins_csv(report: EnsembleReport, path: str | Path,
                   class_name: str = "one") -> None:
    """Per-bin spectrum of one representative trajectory vs the oracle:
    columns (k, ideal_prob, trajectory_prob, class)."""
    trajectory_probs, actual_class = representative_distribution(report, class_name)
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["k", "ideal_prob", "trajectory_prob", "class"])
        for k in range(report.oracle_distribution.size):
            writer.writerow([k, _fmt(report.oracle_distribution[k]),
                             _fmt(trajectory_probs[k]), actual_class])
