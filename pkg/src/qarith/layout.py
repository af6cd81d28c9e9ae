"""Named qubit registers.

A register is an ordered tuple of qubit indices. The first listed qubit is the
most significant bit of the integer the register holds, so ``|a1 a2 ... an>``
encodes ``a = a1*2**(n-1) + ... + an``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Mapping


@dataclass(frozen=True)
class Register:
    name: str
    qubits: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.qubits)

    def __iter__(self) -> Iterator[int]:
        return iter(self.qubits)

    def __getitem__(self, i):
        return self.qubits[i]

    @property
    def width(self) -> int:
        return len(self.qubits)

    def bits(self, value: int) -> dict[int, int]:
        """Map each qubit to its bit of ``value`` (MSB first)."""
        n = len(self.qubits)
        if value < 0 or value >= 1 << n:
            raise ValueError(f"value {value} does not fit register {self.name!r} of width {n}")
        return {q: (value >> (n - 1 - i)) & 1 for i, q in enumerate(self.qubits)}


@dataclass
class RegisterLayout:
    """Disjoint named registers over ``num_qubits`` qubits."""

    registers: dict[str, Register] = field(default_factory=dict)
    num_qubits: int = 0

    def add(self, name: str, width: int) -> Register:
        """Allocate ``width`` fresh qubits at the end of the layout."""
        if name in self.registers:
            raise ValueError(f"register {name!r} already exists")
        if width < 1:
            raise ValueError(f"register {name!r} needs at least one qubit")
        reg = Register(name, tuple(range(self.num_qubits, self.num_qubits + width)))
        self.registers[name] = reg
        self.num_qubits += width
        return reg

    def adopt(self, reg: Register) -> Register:
        """Insert an externally built register, checking disjointness."""
        if reg.name in self.registers:
            raise ValueError(f"register {reg.name!r} already exists")
        if len(set(reg.qubits)) != len(reg.qubits):
            raise ValueError(f"register {reg.name!r} repeats a qubit")
        used = {q for r in self.registers.values() for q in r.qubits}
        overlap = used.intersection(reg.qubits)
        if overlap:
            raise ValueError(f"register {reg.name!r} overlaps qubits {sorted(overlap)}")
        if min(reg.qubits) < 0:
            raise ValueError("negative qubit index")
        self.registers[reg.name] = reg
        self.num_qubits = max(self.num_qubits, max(reg.qubits) + 1)
        return reg

    def __getitem__(self, name: str) -> Register:
        return self.registers[name]

    def __contains__(self, name: str) -> bool:
        return name in self.registers

    def __iter__(self) -> Iterator[Register]:
        return iter(self.registers.values())

    def basis_bits(self, assignments: Mapping[str, int]) -> list[int]:
        """Per-qubit bit values for a basis state; unassigned qubits are 0."""
        bits = [0] * self.num_qubits
        for name, value in assignments.items():
            if name not in self.registers:
                raise KeyError(f"unknown register {name!r}")
            for q, b in self.registers[name].bits(value).items():
                bits[q] = b
        return bits

    def widths(self) -> dict[str, int]:
        return {name: len(r) for name, r in self.registers.items()}


def bit_length(value: int) -> int:
    """Qubits needed to hold ``value`` (at least one)."""
    return max(1, int(value).bit_length())
