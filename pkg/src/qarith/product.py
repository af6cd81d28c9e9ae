"""Product-state simulation for circuits that never entangle.

Every qubit is either a basis state ``|0>``/``|1>`` or a Fourier-phase state
``(|0> + exp(2 pi i theta)|1>)/sqrt(2)``. Phases are stored as integers modulo
``2**precision`` (``theta = num / 2**precision``), so all phase bookkeeping is
exact. A global phase is tracked the same way so that the embedded dense vector
matches the dense backend element-wise.

Diagonal (phase) gates are symmetric in their qubits. A gate whose operands are
all basis states except one acts as a single-qubit phase on that one qubit
(phase kickback), which is what lets phase estimation run here: the controls sit
in Fourier states while the target is the ``|1>`` eigenstate.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .gates import CNOT, H, MCX, PHASE_KINDS, SWAP, GateOp, build_inv_qft
from .layout import RegisterLayout
from .statevec import DEFAULT_MAX_QUBITS, DenseState, NotDeterministic, SimulationError

DEFAULT_PRECISION = 64

_BASIS = 0
_FOURIER = 1


class WouldEntangle(SimulationError):
    """The gate would entangle qubits; the product backend refuses it."""


class NotRepresentable(SimulationError):
    """The single-qubit result is neither a basis nor a Fourier-phase state."""


class ProductState:
    def __init__(self, bits: Sequence[int], *, precision: int = DEFAULT_PRECISION):
        self.precision = precision
        self._mod = 1 << precision
        self._half = 1 << (precision - 1)
        n = len(bits)
        # kind[q] is _BASIS or _FOURIER; val[q] is the bit or the phase numerator
        self._kind = [_BASIS] * n
        self._val = [1 if b else 0 for b in bits]
        self.global_phase = 0
        self._phase_cache: dict[GateOp, int] = {}

    @property
    def num_qubits(self) -> int:
        return len(self._kind)

    def copy(self) -> "ProductState":
        new = ProductState.__new__(ProductState)
        new.precision = self.precision
        new._mod = self._mod
        new._half = self._half
        new._kind = list(self._kind)
        new._val = list(self._val)
        new.global_phase = self.global_phase
        new._phase_cache = self._phase_cache
        return new

    # -- per-qubit inspection ---------------------------------------------

    def is_basis(self, q: int) -> bool:
        return self._kind[q] == _BASIS

    def bit(self, q: int) -> int:
        if self._kind[q] != _BASIS:
            raise NotDeterministic(f"qubit {q} is in a Fourier-phase state")
        return self._val[q]

    def phase(self, q: int) -> Fraction:
        """Phase in turns of a Fourier-phase qubit, reduced to [0, 1)."""
        if self._kind[q] != _FOURIER:
            raise ValueError(f"qubit {q} is a basis state")
        return Fraction(self._val[q], self._mod)

    def phases(self, qubits: Sequence[int]) -> list[Fraction]:
        return [self.phase(q) for q in qubits]

    def set_fourier(self, q: int, theta) -> None:
        num = Fraction(theta) * self._mod
        if num.denominator != 1:
            raise ValueError(f"phase {theta} needs more than {self.precision} bits")
        self._kind[q] = _FOURIER
        self._val[q] = int(num) % self._mod

    def read(self, qubits: Sequence[int]) -> int:
        value = 0
        for q in qubits:
            value = (value << 1) | self.bit(q)
        return value

    # -- gates --------------------------------------------------------------

    def _gate_phase(self, gate: GateOp) -> int:
        num = self._phase_cache.get(gate)
        if num is None:
            p = gate.phase * self._mod
            if p.denominator != 1:
                raise ValueError(f"{gate} needs more than {self.precision} phase bits")
            num = int(p) % self._mod
            self._phase_cache[gate] = num
        return num

    def _controls_enabled(self, controls) -> bool:
        kind, val = self._kind, self._val
        for q, pol in controls:
            if kind[q] != _BASIS:
                raise WouldEntangle(f"control qubit {q} is not in a basis state")
            if val[q] != pol:
                return False
        return True

    def apply(self, gate: GateOp) -> "ProductState":
        """Apply ``gate`` in place and return ``self``.

        Touches only the gate's own qubits, so the cost does not depend on the
        size of the state.
        """
        n = len(self._kind)
        for q in gate.qubits:
            if q >= n:
                raise IndexError(f"qubit {q} out of range for {n}-qubit state")
        if gate.kind in PHASE_KINDS:
            self._apply_phase(gate)
        elif gate.kind in (CNOT, MCX):
            if self._controls_enabled(gate.controls):
                self._apply_x(gate.targets[0])
        elif gate.kind == H:
            if self._controls_enabled(gate.controls):
                self._apply_h(gate.targets[0])
        elif gate.kind == SWAP:
            if self._controls_enabled(gate.controls):
                a, b = gate.targets
                self._kind[a], self._kind[b] = self._kind[b], self._kind[a]
                self._val[a], self._val[b] = self._val[b], self._val[a]
        else:  # pragma: no cover
            raise SimulationError(f"unsupported gate {gate.kind}")
        return self

    def _apply_phase(self, gate: GateOp) -> None:
        kind, val = self._kind, self._val
        free = None
        # the phase fires when every operand matches; the target matches on |1>
        for q, pol in ((gate.targets[0], True),) + gate.controls:
            if kind[q] == _BASIS:
                if val[q] != pol:
                    return
            elif free is not None:
                raise WouldEntangle(f"{gate} acts on two Fourier-phase qubits")
            else:
                free = (q, pol)
        theta = self._gate_phase(gate)
        if free is None:
            self.global_phase = (self.global_phase + theta) % self._mod
            return
        q, pol = free
        if pol:
            val[q] = (val[q] + theta) % self._mod
        else:
            # phase on the |0> branch: pull it out as a global phase
            self.global_phase = (self.global_phase + theta) % self._mod
            val[q] = (val[q] - theta) % self._mod

    def _apply_x(self, q: int) -> None:
        if self._kind[q] == _BASIS:
            self._val[q] ^= 1
        else:
            # X(|0> + e^{i t}|1>) = e^{i t}(|0> + e^{-i t}|1>)
            t = self._val[q]
            self.global_phase = (self.global_phase + t) % self._mod
            self._val[q] = (-t) % self._mod

    def _apply_h(self, q: int) -> None:
        if self._kind[q] == _BASIS:
            self._val[q] = self._half if self._val[q] else 0
            self._kind[q] = _FOURIER
            return
        t = self._val[q]
        if t == 0:
            self._kind[q], self._val[q] = _BASIS, 0
        elif t == self._half:
            self._kind[q], self._val[q] = _BASIS, 1
        else:
            raise NotRepresentable(
                f"H on qubit {q} with phase {Fraction(t, self._mod)} leaves a general state"
            )

    # -- dense bridge -------------------------------------------------------

    def qubit_vector(self, q: int) -> np.ndarray:
        if self._kind[q] == _BASIS:
            v = np.zeros(2, dtype=np.complex128)
            v[self._val[q]] = 1
            return v
        angle = 2 * np.pi * self._val[q] / self._mod
        return np.array([1, np.exp(1j * angle)], dtype=np.complex128) / np.sqrt(2)

    def embed_dense(self, *, max_qubits: int = DEFAULT_MAX_QUBITS) -> DenseState:
        """Expand into a dense state vector (qubit 0 most significant)."""
        n = self.num_qubits
        if n > max_qubits:
            raise ValueError(f"{n} qubits exceeds the dense cap of {max_qubits}")
        vec = np.ones(1, dtype=np.complex128)
        for q in range(n):
            vec = np.kron(vec, self.qubit_vector(q))
        vec *= np.exp(2j * np.pi * self.global_phase / self._mod)
        return DenseState(n, vec, max_qubits=max_qubits)


def init_product(layout: RegisterLayout, assignments: Mapping[str, int], **kw) -> ProductState:
    return ProductState(layout.basis_bits(assignments), **kw)


def apply_gate_product(state: ProductState, gate: GateOp) -> ProductState:
    return state.apply(gate)


def embed_dense(state: ProductState, **kw) -> DenseState:
    return state.embed_dense(**kw)


def fourier_value(state: ProductState, register: Sequence[int]) -> int:
    """Read the integer encoded by a Fourier-form register from its phases.

    Algebraic shortcut for the inverse QFT: the most significant qubit carries
    ``a / 2**n``. The remaining qubits are checked for consistency.
    """
    n = len(register)
    a = state.phase(register[0]) * (1 << n)
    if a.denominator != 1:
        raise NotDeterministic("register phases are not a Fourier basis state")
    a = int(a)
    for j, q in enumerate(register):
        expected = Fraction(a, 1 << (n - j))
        expected -= expected.numerator // expected.denominator
        if state.phase(q) != expected:
            raise NotDeterministic("register phases are not a Fourier basis state")
    return a


def inverse_qft_shortcut(state: ProductState, register: Sequence[int]) -> ProductState:
    """Test-only replacement for the literal inverse QFT."""
    a = fourier_value(state, register)
    n = len(register)
    for j, q in enumerate(register):
        state._kind[q] = _BASIS
        state._val[q] = (a >> (n - 1 - j)) & 1
    return state


def inverse_qft_literal(state: ProductState, register: Sequence[int]) -> ProductState:
    for g in build_inv_qft(register):
        state.apply(g)
    return state
