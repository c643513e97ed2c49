"""Conditional evolution and stochastic quantum-jump trajectories.

Between emissions the register evolves under the non-Hermitian

    H_eff = H - i * sum_j gamma_j P_upper(j)

(jump operator c_j = sqrt(2 gamma_j) |0><upper|_j, so c_j^dag c_j =
2 gamma_j P_upper(j)), *without* renormalization: the squared norm is
the probability that no photon has been emitted.  A trajectory draws a
uniform threshold r, integrates until the squared norm falls below r,
then selects a jump channel with probability proportional to
<psi| c_j^dag c_j |psi>, applies it, renormalizes, redraws r and
continues to the end of the pulse program.

Integration is fixed-step fourth-order (classical RK4).  Because every
pulse Hamiltonian is constant in time, one RK4 step is a fixed linear
map P = sum_{m<=4} (dt A)^m / m!; it is precomputed once per pulse and
applied per step, exploiting the pair structure of the resonant drives
(this is arithmetically the textbook RK4 update, asserted against an
explicit four-stage reference in the tests).

Randomness comes from a counter-based generator (Philox) keyed by an
explicit 64-bit seed; ensemble members use seed0 + trajectory index, so
results are reproducible and independent of execution order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import StepTooLarge, ValidationError
from .hamiltonians import Hamiltonian, build_pulse_hamiltonian
from .program import InstantGate, Pulse, PulseProgram
from .register import QuantumState, RegisterLayout, apply_internal_unitary

#: Hard stability cap on dt * max(|H|, sum of population decay rates).
STABILITY_CAP = 1e-2
#: Default step-size factor (kept below the cap for end-to-end accuracy).
DEFAULT_STEP_FACTOR = 5e-3
#: Largest tolerated *increase* of the squared norm in one step.
_NORM_SLACK = 1e-12

_POLY_COEFF = (1.0, 1.0, 0.5, 1.0 / 6.0, 1.0 / 24.0)


@dataclass(frozen=True)
class JumpChannel:
    """Spontaneous-emission channel |upper> -> |0> on one ion.

    ``gamma`` is the amplitude decay constant; the population of the
    upper level decays at 2*gamma and the jump operator carries
    sqrt(2*gamma).
    """

    ion: int
    gamma: float
    upper_level: int = 1

    def __post_init__(self) -> None:
        if self.gamma < 0.0:
            raise ValidationError("channel gamma must be >= 0")
        if self.upper_level not in (1, 2):
            raise ValidationError("upper_level must be 1 or 2")

    def weight(self, amplitudes: np.ndarray, layout: RegisterLayout) -> float:
        """<psi| c^dag c |psi> = 2*gamma * population of the upper level."""
        state = QuantumState(layout=layout, amplitudes=amplitudes)
        return 2.0 * self.gamma * state.ion_level_population(self.ion, self.upper_level)

    def apply(self, amplitudes: np.ndarray, layout: RegisterLayout) -> np.ndarray:
        """c |psi> (unnormalized)."""
        layout.check_ion(self.ion)
        lead = layout.internal_dim**self.ion
        rest = layout.dim // (lead * layout.internal_dim)
        out = np.zeros_like(amplitudes)
        src = amplitudes.reshape(lead, layout.internal_dim, rest)
        dst = out.reshape(lead, layout.internal_dim, rest)
        dst[:, 0, :] = math.sqrt(2.0 * self.gamma) * src[:, self.upper_level, :]
        return out


def qubit_channels(layout: RegisterLayout, gamma11: float,
                   gamma_aux: float | None = None) -> list[JumpChannel]:
    """One lowering channel per ion on the qubit transition, plus an
    auxiliary-level channel per ion when ``gamma_aux`` is given.  The
    phonon mode carries no loss channel."""
    channels = [JumpChannel(ion=k, gamma=gamma11, upper_level=1)
                for k in range(layout.n_ions)]
    if gamma_aux is not None and gamma_aux > 0.0:
        channels += [JumpChannel(ion=k, gamma=gamma_aux, upper_level=2)
                     for k in range(layout.n_ions)]
    return channels


def decay_vector(layout: RegisterLayout, channels: list[JumpChannel]) -> np.ndarray:
    """Diagonal of sum_j gamma_j P_upper(j) over the register basis."""
    d = np.zeros(layout.dim)
    for ch in channels:
        if ch.gamma == 0.0:
            continue
        lead = layout.internal_dim**ch.ion
        rest = layout.dim // (lead * layout.internal_dim)
        d.reshape(lead, layout.internal_dim, rest)[:, ch.upper_level, :] += ch.gamma
    return d


def total_decay_rate(channels: list[JumpChannel]) -> float:
    """Sum of population decay rates 2*gamma over all channels."""
    return sum(2.0 * ch.gamma for ch in channels)


def _poly4_scalar(z: np.ndarray) -> np.ndarray:
    out = np.full_like(z, _POLY_COEFF[4], dtype=np.complex128)
    for coeff in reversed(_POLY_COEFF[:4]):
        out = out * z + coeff
    return out


def _mat2_mul(m1, m2):
    a1, b1, c1, d1 = m1
    a2, b2, c2, d2 = m2
    return (a1 * a2 + b1 * c2, a1 * b2 + b1 * d2,
            c1 * a2 + d1 * c2, c1 * b2 + d1 * d2)


def _poly4_mat2(a, b, c, d):
    """RK4 polynomial of stacked 2x2 matrices given entrywise arrays."""
    one = np.ones_like(a)
    zero = np.zeros_like(a)
    acc = (one * _POLY_COEFF[0], zero.copy(), zero.copy(), one * _POLY_COEFF[0])
    power = (one.copy(), zero.copy(), zero.copy(), one.copy())
    for coeff in _POLY_COEFF[1:]:
        power = _mat2_mul(power, (a, b, c, d))
        acc = tuple(x + coeff * p for x, p in zip(acc, power))
    return acc


class StepPropagator:
    """Precomputed RK4 step map for one constant H_eff and step size."""

    def __init__(self, hamiltonian: Hamiltonian, channels: list[JumpChannel],
                 dt: float) -> None:
        if dt <= 0.0:
            raise ValidationError("dt must be > 0")
        layout = hamiltonian.layout
        self.layout = layout
        self.dt = dt
        decay = decay_vector(layout, channels)
        self.scale = max(hamiltonian.norm_bound(), total_decay_rate(channels))
        if self.scale > 0.0 and dt * self.scale > STABILITY_CAP * (1.0 + 1e-9):
            raise StepTooLarge(
                f"dt*max(|H|, sum 2*gamma) = {dt * self.scale:.3e} exceeds "
                f"{STABILITY_CAP:.0e}"
            )
        # generator A = -i H - D
        a_diag = (-1j * hamiltonian.diag - decay) * dt
        if hamiltonian.is_pair_structured:
            self._dense = None
            pdiag = _poly4_scalar(a_diag)
            poff = np.zeros(layout.dim, dtype=np.complex128)
            perm = np.arange(layout.dim)
            i, j, g = hamiltonian.pair_i, hamiltonian.pair_j, hamiltonian.pair_g
            if i.size:
                block = _poly4_mat2(
                    a_diag[i], -1j * np.conj(g) * dt,
                    -1j * g * dt, a_diag[j],
                )
                pdiag[i], poff[i] = block[0], block[1]
                poff[j], pdiag[j] = block[2], block[3]
                perm[i], perm[j] = j, i
            self._pdiag, self._poff, self._perm = pdiag, poff, perm
        else:
            if layout.dim > 4096:
                raise ValidationError(
                    "dense step propagator limited to dim <= 4096; "
                    "non-pair-structured drives are meant for small registers"
                )
            gen = (-1j) * hamiltonian.to_dense() * dt
            gen[np.arange(layout.dim), np.arange(layout.dim)] -= decay * dt
            dense = np.eye(layout.dim, dtype=np.complex128) * _POLY_COEFF[0]
            power = np.eye(layout.dim, dtype=np.complex128)
            for coeff in _POLY_COEFF[1:]:
                power = power @ gen
                dense += coeff * power
            self._dense = dense

    def apply(self, psi: np.ndarray) -> np.ndarray:
        if self._dense is not None:
            return self._dense @ psi
        return self._pdiag * psi + self._poff * psi[self._perm]

    def apply_batch(self, psi: np.ndarray) -> np.ndarray:
        """Apply the step map to a (n_trajectories, dim) batch."""
        if self._dense is not None:
            return psi @ self._dense.T
        return self._pdiag * psi + self._poff * psi[:, self._perm]


def rk4_reference_step(hamiltonian: Hamiltonian, channels: list[JumpChannel],
                       dt: float, psi: np.ndarray) -> np.ndarray:
    """Textbook four-stage RK4 step; reference for StepPropagator."""
    decay = decay_vector(hamiltonian.layout, channels)

    def gen(v):
        return -1j * hamiltonian.apply(v) - decay * v

    k1 = gen(psi)
    k2 = gen(psi + 0.5 * dt * k1)
    k3 = gen(psi + 0.5 * dt * k2)
    k4 = gen(psi + dt * k3)
    return psi + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def conditional_dt(hamiltonian: Hamiltonian, channels: list[JumpChannel],
                   step_factor: float = DEFAULT_STEP_FACTOR) -> float:
    """Step size honoring dt * max(|H|, sum 2*gamma) = step_factor."""
    if not 0.0 < step_factor <= STABILITY_CAP:
        raise ValidationError(f"step_factor must be in (0, {STABILITY_CAP}]")
    scale = max(hamiltonian.norm_bound(), total_decay_rate(channels))
    if scale == 0.0:
        return math.inf
    return step_factor / scale


def evolve_conditional(state: QuantumState, hamiltonian: Hamiltonian,
                       channels: list[JumpChannel], dt: float) -> QuantumState:
    """One conditional step under H_eff, no renormalization.

    The squared norm can only decrease (it is the accumulated
    no-emission probability); a step exceeding the stability cap raises
    StepTooLarge.
    """
    stepper = StepPropagator(hamiltonian, channels, dt)
    before = state.squared_norm()
    psi = stepper.apply(state.amplitudes)
    after = float(np.vdot(psi, psi).real)
    if after > before * (1.0 + _NORM_SLACK) + _NORM_SLACK:
        raise ValidationError("conditional step increased the norm")
    return QuantumState(layout=state.layout, amplitudes=psi)


def evolve_for(state: QuantumState, hamiltonian: Hamiltonian,
               channels: list[JumpChannel], duration: float,
               step_factor: float = DEFAULT_STEP_FACTOR) -> QuantumState:
    """Conditional evolution over a finite window (no jumps applied)."""
    if duration < 0.0:
        raise ValidationError("duration must be >= 0")
    if duration == 0.0:
        return state.copy()
    dt_target = conditional_dt(hamiltonian, channels, step_factor)
    n_steps = max(1, math.ceil(duration / dt_target)) if math.isfinite(dt_target) else 1
    dt = duration / n_steps
    stepper = StepPropagator(hamiltonian, channels, dt)
    psi = state.amplitudes.copy()
    norm2 = float(np.vdot(psi, psi).real)
    for _ in range(n_steps):
        psi = stepper.apply(psi)
        new_norm2 = float(np.vdot(psi, psi).real)
        if new_norm2 > norm2 * (1.0 + _NORM_SLACK) + _NORM_SLACK:
            raise ValidationError("conditional step increased the norm")
        norm2 = new_norm2
    return QuantumState(layout=state.layout, amplitudes=psi)


@dataclass(frozen=True)
class TrajectoryRecord:
    """Outcome of one stochastic run."""

    seed: int
    jumps: tuple[tuple[float, int], ...]   # (time, channel index)
    final_state: QuantumState = field(repr=False)
    fidelity: float | None
    emitted_count: int

    def jump_times(self) -> list[float]:
        return [t for t, _ in self.jumps]


def trajectory_rng(seed: int) -> np.random.Generator:
    """Counter-based stream for one trajectory."""
    return np.random.Generator(np.random.Philox(key=seed))


def run_trajectory(program: PulseProgram, layout: RegisterLayout,
                   channels: list[JumpChannel], seed: int,
                   initial_state: QuantumState,
                   ideal_final: np.ndarray | None = None,
                   step_factor: float = DEFAULT_STEP_FACTOR) -> TrajectoryRecord:
    """Run one quantum-jump trajectory through a pulse program.

    Threshold scheme: draw r uniform in [0, 1); evolve conditionally,
    comparing the squared norm to r after each step; once it falls
    below r an emission has occurred — pick the channel with
    probability proportional to its instantaneous weight, apply it,
    renormalize and redraw r.  Recorded jump times are log-interpolated
    within the crossing step.  Same seed, program and channels give a
    bit-identical record.
    """
    rng = trajectory_rng(seed)
    psi = initial_state.amplitudes.copy()
    monitor_jumps = any(ch.gamma > 0.0 for ch in channels)
    r = rng.random() if monitor_jumps else 0.0
    t_now = 0.0
    norm2 = float(np.vdot(psi, psi).real)
    jumps: list[tuple[float, int]] = []

    for item in program.items:
        if isinstance(item, InstantGate):
            psi = apply_internal_unitary(psi, layout, item.ion, item.matrix)
            continue
        hamiltonian = build_pulse_hamiltonian(item, layout)
        if item.duration == 0.0:
            continue
        dt_target = conditional_dt(hamiltonian, channels, step_factor)
        n_steps = max(1, math.ceil(item.duration / dt_target)) if math.isfinite(dt_target) else 1
        dt = item.duration / n_steps
        stepper = StepPropagator(hamiltonian, channels, dt)
        for _ in range(n_steps):
            psi = stepper.apply(psi)
            new_norm2 = float(np.vdot(psi, psi).real)
            if new_norm2 > norm2 * (1.0 + _NORM_SLACK) + _NORM_SLACK:
                raise ValidationError("conditional step increased the norm")
            t_now += dt
            if monitor_jumps and new_norm2 < r:
                t_jump = t_now
                if 0.0 < new_norm2 < norm2:
                    frac = math.log(norm2 / r) / math.log(norm2 / new_norm2)
                    t_jump = t_now - dt + dt * min(1.0, max(0.0, frac))
                weights = np.array([ch.weight(psi, layout) for ch in channels])
                total = weights.sum()
                if total <= 0.0:
                    raise ValidationError("jump triggered with no channel weight")
                pick = int(np.searchsorted(np.cumsum(weights) / total, rng.random(),
                                           side="right"))
                pick = min(pick, len(channels) - 1)
                psi = channels[pick].apply(psi, layout)
                psi /= np.linalg.norm(psi)
                jumps.append((t_jump, pick))
                r = rng.random()
                new_norm2 = 1.0
            norm2 = new_norm2

    final = QuantumState(layout=layout, amplitudes=psi)
    fidelity = None
    if ideal_final is not None:
        normed = psi / np.linalg.norm(psi)
        fidelity = float(np.abs(np.vdot(ideal_final, normed)) ** 2)
    return TrajectoryRecord(seed=seed, jumps=tuple(jumps), final_state=final,
                            fidelity=fidelity, emitted_count=len(jumps))


def conditional_no_jump_branch(program: PulseProgram, layout: RegisterLayout,
                               channels: list[JumpChannel],
                               initial_state: QuantumState,
                               step_factor: float = DEFAULT_STEP_FACTOR) -> QuantumState:
    """Deterministic no-emission branch of a program.

    Every zero-jump trajectory ends in exactly this state (conditional
    evolution is deterministic; randomness only decides whether jumps
    happen), so the zero-class statistics of an ensemble can be checked
    against a single integration.
    """
    psi = initial_state.amplitudes.copy()
    norm2 = float(np.vdot(psi, psi).real)
    for item in program.items:
        if isinstance(item, InstantGate):
            psi = apply_internal_unitary(psi, layout, item.ion, item.matrix)
            continue
        if item.duration == 0.0:
            continue
        hamiltonian = build_pulse_hamiltonian(item, layout)
        dt_target = conditional_dt(hamiltonian, channels, step_factor)
        n_steps = max(1, math.ceil(item.duration / dt_target)) if math.isfinite(dt_target) else 1
        stepper = StepPropagator(hamiltonian, channels, item.duration / n_steps)
        for _ in range(n_steps):
            psi = stepper.apply(psi)
            new_norm2 = float(np.vdot(psi, psi).real)
            if new_norm2 > norm2 * (1.0 + _NORM_SLACK) + _NORM_SLACK:
                raise ValidationError("conditional step increased the norm")
            norm2 = new_norm2
    return QuantumState(layout=layout, amplitudes=psi)


def run_constant_hamiltonian_ensemble(
        hamiltonian: Hamiltonian, channels: list[JumpChannel],
        initial_state: QuantumState, duration: float, n_trajectories: int,
        seed0: int, step_factor: float = DEFAULT_STEP_FACTOR,
        observable: tuple[int, int] | None = None,
        n_checkpoints: int = 0):
    """Vectorized trajectory ensemble for a single constant drive.

    All trajectories share the per-step map, so the whole batch advances
    with a few array operations per step; jump handling runs per
    crossing row with that row's own Philox stream (seed0 + index),
    matching run_trajectory's draw order.  Returns
    (first_jump_times, jump_counts, checkpoint_times, mean_observable,
    stderr_observable) where ``mean_observable`` is the trajectory mean
    of the renormalized population of ``observable = (ion, level)`` at
    each checkpoint and ``stderr_observable`` its standard error (empty
    arrays when not requested).
    """
    layout = hamiltonian.layout
    dt_target = conditional_dt(hamiltonian, channels, step_factor)
    n_steps = max(1, math.ceil(duration / dt_target)) if math.isfinite(dt_target) else 1
    dt = duration / n_steps
    stepper = StepPropagator(hamiltonian, channels, dt)

    rngs = [trajectory_rng(seed0 + i) for i in range(n_trajectories)]
    psi = np.tile(initial_state.amplitudes, (n_trajectories, 1))
    thresholds = np.array([rng.random() for rng in rngs])
    norm2 = np.einsum("ij,ij->i", np.conj(psi), psi).real

    first_jump = np.full(n_trajectories, np.nan)
    counts = np.zeros(n_trajectories, dtype=np.int64)

    mask = None
    if observable is not None:
        ion, level = observable
        sel = np.zeros(layout.dim, dtype=bool)
        lead = layout.internal_dim**ion
        rest = layout.dim // (lead * layout.internal_dim)
        sel.reshape(lead, layout.internal_dim, rest)[:, level, :] = True
        mask = sel

    checkpoint_steps = set()
    checkpoint_times = np.array([])
    if n_checkpoints > 0:
        idx = np.unique(np.linspace(1, n_steps, n_checkpoints, dtype=np.int64))
        checkpoint_steps = set(int(v) for v in idx)
        checkpoint_times = idx * dt
    means = []
    stderrs = []

    t_now = 0.0
    for step in range(1, n_steps + 1):
        psi = stepper.apply_batch(psi)
        new_norm2 = np.einsum("ij,ij->i", np.conj(psi), psi).real
        t_now += dt
        crossed = np.nonzero(new_norm2 < thresholds)[0]
        for row in crossed:
            prev, new = norm2[row], new_norm2[row]
            t_jump = t_now
            if 0.0 < new < prev:
                frac = math.log(prev / thresholds[row]) / math.log(prev / new)
                t_jump = t_now - dt + dt * min(1.0, max(0.0, frac))
            weights = np.array([ch.weight(psi[row], layout) for ch in channels])
            total = weights.sum()
            if total <= 0.0:
                raise ValidationError("jump triggered with no channel weight")
            pick = int(np.searchsorted(np.cumsum(weights) / total,
                                       rngs[row].random(), side="right"))
            pick = min(pick, len(channels) - 1)
            psi[row] = channels[pick].apply(psi[row], layout)
            psi[row] /= np.linalg.norm(psi[row])
            if counts[row] == 0:
                first_jump[row] = t_jump
            counts[row] += 1
            thresholds[row] = rngs[row].random()
            new_norm2[row] = 1.0
        norm2 = new_norm2
        if step in checkpoint_steps and mask is not None:
            pop = (np.abs(psi[:, mask]) ** 2).sum(axis=1) / norm2
            means.append(float(np.mean(pop)))
            spread = float(np.std(pop, ddof=1)) if n_trajectories > 1 else 0.0
            stderrs.append(spread / math.sqrt(n_trajectories))

    return first_jump, counts, checkpoint_times, np.array(means), np.array(stderrs)
