"""Pulse programs: the laser-level instruction stream fed to the engine.

A program is an ordered mix of finite-duration laser pulses and
instantaneous single-ion unitaries (single-qubit operations are much
faster than bus operations and are applied as exact matrices by
default; a pulse-level compilation mode exists for the rotation parts).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError

QUBIT_CARRIER = "qubit_carrier"
RED_SIDEBAND = "red_sideband"
AUX_SIDEBAND = "aux_sideband"
TRANSITIONS = (QUBIT_CARRIER, RED_SIDEBAND, AUX_SIDEBAND)


@dataclass(frozen=True)
class Pulse:
    """One resonant laser pulse on one ion."""

    ion: int
    transition: str
    rabi: float        # rad/s
    phase: float = 0.0
    duration: float = 0.0
    eta: float = 1.0   # Lamb-Dicke parameter; ignored for the carrier

    def __post_init__(self) -> None:
        if self.transition not in TRANSITIONS:
            raise ValidationError(f"unknown transition kind {self.transition!r}")
        if self.duration < 0.0:
            raise ValidationError("pulse duration must be >= 0")
        if self.rabi < 0.0:
            raise ValidationError("pulse Rabi frequency must be >= 0")


@dataclass(frozen=True)
class InstantGate:
    """Instantaneous internal unitary on one ion (3x3, identity on aux
    unless stated otherwise)."""

    ion: int
    matrix: np.ndarray
    label: str = ""

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=np.complex128)
        if m.shape != (3, 3):
            raise ValidationError("instantaneous gate must be 3x3")
        if not np.allclose(m @ m.conj().T, np.eye(3), atol=1e-12):
            raise ValidationError(f"instantaneous gate {self.label!r} is not unitary")
        object.__setattr__(self, "matrix", m)


ProgramItem = Pulse | InstantGate


@dataclass(frozen=True)
class PulseProgram:
    """Ordered pulse/instant-gate sequence."""

    items: tuple[ProgramItem, ...] = field(default_factory=tuple)

    def __add__(self, other: "PulseProgram") -> "PulseProgram":
        return PulseProgram(items=self.items + other.items)

    @property
    def duration(self) -> float:
        """Total laser-on time (instant gates cost nothing)."""
        return sum(item.duration for item in self.items if isinstance(item, Pulse))

    def pulses(self) -> list[Pulse]:
        return [item for item in self.items if isinstance(item, Pulse)]

    def rotation_count(self, effective_ions: int) -> float:
        """Total sideband rotation angle in units of pi.

        A pi-pulse on the n=1 sideband contributes 1, a 2*pi-pulse 2;
        carrier pulses count with their own Rabi rate.
        """
        total = 0.0
        for pulse in self.pulses():
            if pulse.transition == QUBIT_CARRIER:
                rate = pulse.rabi
            else:
                rate = pulse.eta * pulse.rabi / np.sqrt(5.0 * effective_ions)
            total += rate * pulse.duration / np.pi
        return total
