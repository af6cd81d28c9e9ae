"""Dense state-vector simulation.

Qubit 0 is the most significant bit of the amplitude index, so reshaping the
vector to ``(2,) * n`` gives one axis per qubit in qubit order.
"""

from __future__ import annotations

import math
from typing import Mapping, Sequence

import numpy as np

from .gates import CNOT, H, MCX, PHASE_KINDS, SWAP, GateOp
from .layout import RegisterLayout

DEFAULT_MAX_QUBITS = 24
READOUT_THRESHOLD = 1 - 1e-9

_SQRT1_2 = 1 / math.sqrt(2)


class SimulationError(RuntimeError):
    pass


class NotDeterministic(SimulationError):
    """A register readout has no value with probability >= 1 - 1e-9."""


def phase_factor(theta) -> complex:
    """``exp(2*pi*i*theta)`` for an exact phase in turns.

    Quarter turns are returned exactly so that simple circuits stay bit-clean.
    """
    theta = theta - math.floor(theta)
    quarter = theta * 4
    if quarter == int(quarter):
        return (1, 1j, -1, -1j)[int(quarter)]
    return complex(np.exp(2j * np.pi * float(theta)))


class DenseState:
    def __init__(self, num_qubits: int, amplitudes=None, *, max_qubits: int = DEFAULT_MAX_QUBITS):
        if num_qubits < 1:
            raise ValueError("need at least one qubit")
        if num_qubits > max_qubits:
            raise ValueError(f"{num_qubits} qubits exceeds the dense cap of {max_qubits}")
        self.num_qubits = num_qubits
        if amplitudes is None:
            amplitudes = np.zeros(1 << num_qubits, dtype=np.complex128)
            amplitudes[0] = 1
        else:
            amplitudes = np.array(amplitudes, dtype=np.complex128).reshape(-1)
            if amplitudes.size != 1 << num_qubits:
                raise ValueError("amplitude vector has the wrong length")
        self.amplitudes = amplitudes

    @classmethod
    def basis(cls, bits: Sequence[int], **kw) -> "DenseState":
        state = cls(len(bits), **kw)
        index = 0
        for b in bits:
            index = (index << 1) | (1 if b else 0)
        state.amplitudes[0] = 0
        state.amplitudes[index] = 1
        return state

    def copy(self) -> "DenseState":
        new = DenseState.__new__(DenseState)
        new.num_qubits = self.num_qubits
        new.amplitudes = self.amplitudes.copy()
        return new

    def norm(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def _tensor(self) -> np.ndarray:
        return self.amplitudes.reshape((2,) * self.num_qubits)

    def _selector(self, controls, fixed: Mapping[int, int]) -> tuple:
        sel: list = [slice(None)] * self.num_qubits
        for q, pol in controls:
            sel[q] = 1 if pol else 0
        for q, v in fixed.items():
            sel[q] = v
        return tuple(sel)

    def apply(self, gate: GateOp) -> "DenseState":
        """Apply ``gate`` in place and return ``self``."""
        n = self.num_qubits
        for q in gate.qubits:
            if q >= n:
                raise IndexError(f"qubit {q} out of range for {n}-qubit state")
        psi = self._tensor()
        ctl = gate.controls
        if gate.kind in PHASE_KINDS:
            sel = self._selector(ctl, {gate.targets[0]: 1})
            psi[sel] *= phase_factor(gate.phase)
        elif gate.kind in (CNOT, MCX):
            t = gate.targets[0]
            s0 = self._selector(ctl, {t: 0})
            s1 = self._selector(ctl, {t: 1})
            tmp = psi[s0].copy()
            psi[s0] = psi[s1]
            psi[s1] = tmp
        elif gate.kind == H:
            t = gate.targets[0]
            s0 = self._selector(ctl, {t: 0})
            s1 = self._selector(ctl, {t: 1})
            a = psi[s0].copy()
            b = psi[s1].copy()
            psi[s0] = (a + b) * _SQRT1_2
            psi[s1] = (a - b) * _SQRT1_2
        elif gate.kind == SWAP:
            a, b = gate.targets
            s01 = self._selector(ctl, {a: 0, b: 1})
            s10 = self._selector(ctl, {a: 1, b: 0})
            tmp = psi[s01].copy()
            psi[s01] = psi[s10]
            psi[s10] = tmp
        else:  # pragma: no cover - GateOp validates kinds
            raise SimulationError(f"unsupported gate {gate.kind}")
        return self

    def probabilities(self, qubits: Sequence[int]) -> np.ndarray:
        """Marginal distribution over the values of ``qubits`` (MSB first)."""
        qubits = list(qubits)
        probs = np.abs(self._tensor()) ** 2
        others = tuple(q for q in range(self.num_qubits) if q not in qubits)
        marg = probs.sum(axis=others) if others else probs
        # remaining axes are in ascending qubit order; permute to register order
        order = sorted(qubits)
        marg = np.transpose(marg, [order.index(q) for q in qubits])
        return marg.reshape(-1)

    def read(self, qubits: Sequence[int]) -> int:
        probs = self.probabilities(qubits)
        value = int(np.argmax(probs))
        if probs[value] < READOUT_THRESHOLD:
            raise NotDeterministic(
                f"register {tuple(qubits)} is not in a basis state (max p={probs[value]:.6f})"
            )
        return value


def init_basis(layout: RegisterLayout, assignments: Mapping[str, int], **kw) -> DenseState:
    return DenseState.basis(layout.basis_bits(assignments), **kw)


def apply_gate(state: DenseState, gate: GateOp) -> DenseState:
    return state.apply(gate)


def read_register(state: DenseState, register: Sequence[int]) -> int:
    return state.read(register)
