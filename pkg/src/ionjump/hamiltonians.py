"""Hamiltonians of the driven register (hbar = 1, angular units).

The bus interaction in the Lamb-Dicke limit couples internal excitation
to the shared phonon: a red-sideband drive on ion k exchanges
|0, n+1> <-> |1, n> with matrix element

    <1, n| H |0, n+1> = eta/sqrt(5*N_eff) * Omega/2 * sqrt(n+1) * e^{i phi},

where N_eff is the effective ion count of the bus mode.  The auxiliary
sideband is identical with level 2 in place of level 1.  Carrier drives
couple |0, n> <-> |1, n> at Omega/2 without the Lamb-Dicke factor.

Every drive is stored as a sparse pair list plus a real diagonal.  The
resonant pulse operators are *pair-structured* (each basis state couples
to at most one partner), which the integrator exploits; the Raman
three-level operator is not, and falls back to a dense path.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError, ZeroDetuning
from .program import QUBIT_CARRIER, RED_SIDEBAND, Pulse
from .register import AUX_LEVEL, RegisterLayout


@dataclass(frozen=True)
class Hamiltonian:
    """Hermitian operator: real diagonal + symmetric pair couplings.

    ``pair_g[m]`` is the matrix element <pair_j[m]| H |pair_i[m]>; the
    conjugate element is implied.
    """

    layout: RegisterLayout
    diag: np.ndarray
    pair_i: np.ndarray
    pair_j: np.ndarray
    pair_g: np.ndarray

    def __post_init__(self) -> None:
        dim = self.layout.dim
        if self.diag.shape != (dim,):
            raise ValidationError("diagonal has wrong shape")
        if not (self.pair_i.shape == self.pair_j.shape == self.pair_g.shape):
            raise ValidationError("pair arrays must have matching shapes")

    @property
    def is_pair_structured(self) -> bool:
        """True when no basis state appears in more than one coupling."""
        indices = np.concatenate([self.pair_i, self.pair_j])
        return indices.size == np.unique(indices).size

    def to_dense(self) -> np.ndarray:
        dim = self.layout.dim
        h = np.zeros((dim, dim), dtype=np.complex128)
        h[np.arange(dim), np.arange(dim)] = self.diag
        # accumulate; repeated (i, j) entries add, matching the pair list
        np.add.at(h, (self.pair_j, self.pair_i), self.pair_g)
        np.add.at(h, (self.pair_i, self.pair_j), np.conj(self.pair_g))
        return h

    def apply(self, psi: np.ndarray) -> np.ndarray:
        out = self.diag * psi
        np.add.at(out, self.pair_j, self.pair_g * psi[self.pair_i])
        np.add.at(out, self.pair_i, np.conj(self.pair_g) * psi[self.pair_j])
        return out

    def norm_bound(self) -> float:
        """Infinity-norm upper bound on the spectral radius."""
        rows = np.abs(self.diag).astype(np.float64).copy()
        np.add.at(rows, self.pair_i, np.abs(self.pair_g))
        np.add.at(rows, self.pair_j, np.abs(self.pair_g))
        return float(rows.max()) if rows.size else 0.0

    def propagate_exact(self, psi: np.ndarray, t: float) -> np.ndarray:
        """Exact unitary evolution e^{-iHt} psi (state axis last).

        Pair-structured operators use the closed-form 2x2 rotation per
        block; anything else is diagonalized densely.  Serves as the
        integrator-independent oracle in the tests and the gate
        compiler's verification path.  Accepts batches of states with
        shape (..., dim).
        """
        if self.is_pair_structured:
            out = psi * np.exp(-1j * self.diag * t)
            i, j, g = self.pair_i, self.pair_j, self.pair_g
            if i.size:
                di, dj = self.diag[i], self.diag[j]
                avg = 0.5 * (di + dj)
                half = 0.5 * (di - dj)
                omega = np.sqrt(half**2 + np.abs(g) ** 2)
                safe = np.where(omega > 0.0, omega, 1.0)
                sinc = np.where(omega > 0.0, np.sin(omega * t) / safe, t)
                cos = np.cos(omega * t)
                phase = np.exp(-1j * avg * t)
                a_i, a_j = psi[..., i], psi[..., j]
                out[..., i] = phase * ((cos - 1j * half * sinc) * a_i
                                       - 1j * np.conj(g) * sinc * a_j)
                out[..., j] = phase * ((cos + 1j * half * sinc) * a_j
                                       - 1j * g * sinc * a_i)
            return out
        dense = self.to_dense()
        vals, vecs = np.linalg.eigh(dense)
        rotated = psi @ vecs.conj()
        return (rotated * np.exp(-1j * vals * t)) @ vecs.T


def _pair_indices(layout: RegisterLayout, ion: int, lower_digit: int,
                  upper_digit: int, phonon_shift: int):
    """Flat indices of |..lower.., n+shift> and |..upper.., n> pairs."""
    layout.check_ion(ion)
    lead = layout.internal_dim**ion
    mid = layout.internal_dim ** (layout.n_ions - ion - 1)
    cutoff = layout.phonon_cutoff
    shape = (lead, mid, cutoff - phonon_shift)
    a = np.arange(lead)[:, None, None]
    b = np.arange(mid)[None, :, None]
    n = np.arange(cutoff - phonon_shift)[None, None, :]
    base = (a * layout.internal_dim * mid + b) * cutoff
    idx_lower = np.broadcast_to(base + lower_digit * mid * cutoff + n + phonon_shift,
                                shape).ravel()
    idx_upper = np.broadcast_to(base + upper_digit * mid * cutoff + n, shape).ravel()
    return idx_lower, idx_upper, np.broadcast_to(n, shape).ravel()


def build_carrier_hamiltonian(layout: RegisterLayout, ion: int, rabi: float,
                              phase: float = 0.0) -> Hamiltonian:
    """Resonant qubit carrier on one ion: couples |0,n> <-> |1,n>."""
    idx0, idx1, _ = _pair_indices(layout, ion, 0, 1, 0)
    g = np.full(idx0.shape, 0.5 * rabi * np.exp(1j * phase), dtype=np.complex128)
    return Hamiltonian(layout=layout, diag=np.zeros(layout.dim),
                       pair_i=idx0, pair_j=idx1, pair_g=g)


def build_sideband_hamiltonian(layout: RegisterLayout, ion: int, rabi: float,
                               eta: float, phase: float = 0.0,
                               upper_level: int = 1) -> Hamiltonian:
    """Red-sideband drive on one ion: couples |0,n+1> <-> |upper,n>.

    ``upper_level`` 1 gives the qubit sideband, 2 the auxiliary one.
    """
    if eta <= 0.0:
        raise ValidationError("eta must be > 0")
    if upper_level not in (1, AUX_LEVEL):
        raise ValidationError("upper_level must be 1 or 2")
    idx0, idx_up, n = _pair_indices(layout, ion, 0, upper_level, 1)
    base = eta * rabi / (2.0 * np.sqrt(5.0 * layout.effective_ions))
    g = base * np.sqrt(n + 1.0) * np.exp(1j * phase)
    return Hamiltonian(layout=layout, diag=np.zeros(layout.dim),
                       pair_i=idx0, pair_j=idx_up, pair_g=g.astype(np.complex128))


def build_raman_hamiltonian(layout: RegisterLayout, ion: int, rabi02: float,
                            rabi12: float, delta2: float, eta: float) -> Hamiltonian:
    """Detuned three-level Raman drive on one ion.

    H = -Delta2 |2><2| + Omega02/2 (|2><0| + h.c.)
        + eta*Omega12/(2 sqrt(5 N_eff)) (|2><1| a + h.c.),

    so the 0<->2 branch is a carrier and the 1<->2 branch exchanges a
    phonon.  Not pair-structured (level 2 couples to both qubit levels).
    """
    if delta2 == 0.0:
        raise ZeroDetuning("Raman drive requires a nonzero one-photon detuning")
    layout.check_ion(ion)
    diag = np.zeros(layout.dim)
    lead = layout.internal_dim**ion
    mid = layout.internal_dim ** (layout.n_ions - ion - 1)
    cutoff = layout.phonon_cutoff
    grid = diag.reshape(lead, layout.internal_dim, mid * cutoff)
    grid[:, AUX_LEVEL, :] = -delta2

    idx0, idx2_car, _ = _pair_indices(layout, ion, 0, AUX_LEVEL, 0)
    g_car = np.full(idx0.shape, 0.5 * rabi02, dtype=np.complex128)
    idx1, idx2_sb, n = _pair_indices(layout, ion, 1, AUX_LEVEL, 1)
    g_sb = (eta * rabi12 / (2.0 * np.sqrt(5.0 * layout.effective_ions))
            * np.sqrt(n + 1.0)).astype(np.complex128)

    return Hamiltonian(
        layout=layout,
        diag=diag.reshape(layout.dim),
        pair_i=np.concatenate([idx0, idx1]),
        pair_j=np.concatenate([idx2_car, idx2_sb]),
        pair_g=np.concatenate([g_car, g_sb]),
    )


def build_pulse_hamiltonian(pulse: Pulse, layout: RegisterLayout) -> Hamiltonian:
    """Operator generating one program pulse."""
    if pulse.transition == QUBIT_CARRIER:
        return build_carrier_hamiltonian(layout, pulse.ion, pulse.rabi, pulse.phase)
    upper = 1 if pulse.transition == RED_SIDEBAND else AUX_LEVEL
    return build_sideband_hamiltonian(layout, pulse.ion, pulse.rabi, pulse.eta,
                                      pulse.phase, upper_level=upper)
