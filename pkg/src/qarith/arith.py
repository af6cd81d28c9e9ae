"""Decrement, zero-check and the repeated-addition multiplier.

The multiplier is a statically unrolled loop. Each block is

    tick    counter += 1             if control == 1
    check   control ^= 1             if y == 0 and counter == 0
    S       acc += x  (Fourier form) if control == 0
    D       y -= 1                   if control == 0

The accumulator is transformed into Fourier form once before the first block
and back once after the last. The loop counter makes the loop reversible.
Without it, the check would re-fire on every block after ``y`` reaches zero,
and for ``x == 0`` different ``y`` would collapse onto one final state. The
counter ends holding ``blocks - 1 - y``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .gates import (Circuit, CircuitError, build_add_constant, build_adder, build_inv_qft,
                    build_qft, mcx)
from .layout import Register, RegisterLayout, bit_length


def build_decrement(y_register: Sequence[int], control: int | None = None,
                    polarity: bool = False) -> Circuit:
    """``y <- y - 1 (mod 2**n)``: QFT, a ``-R_k`` per qubit, inverse QFT.

    With ``control`` the phase gates fire only when the control qubit equals
    ``polarity`` (default ``|0>``); the surrounding QFT pair cancels when
    disabled.
    """
    controls = () if control is None else ((control, polarity),)
    return (build_qft(y_register)
            + Circuit.label("fourier")
            + build_add_constant(y_register, -1, controls=controls)
            + Circuit.label("decremented")
            + build_inv_qft(y_register))


def build_increment(register: Sequence[int], control: int | None = None,
                    polarity: bool = True) -> Circuit:
    controls = () if control is None else ((control, polarity),)
    return (build_qft(register)
            + build_add_constant(register, 1, controls=controls)
            + build_inv_qft(register))


def build_zero_check(y_register: Sequence[int], control_qubit: int,
                     guard: Sequence[int] = ()) -> Circuit:
    """Flip ``control_qubit`` iff every qubit of ``y`` (and of ``guard``) is 0."""
    controls = [(q, False) for q in y_register] + [(q, False) for q in guard]
    return Circuit((mcx(control_qubit, controls),))


@dataclass(frozen=True)
class MultiplierLayout:
    """Registers for ``acc += x * y``.

    ``max_x``/``max_y`` are static bounds on the inputs (default: register
    maxima) and ``acc_start`` bounds the accumulator's initial content. The
    loop is unrolled ``max_y + 1`` times.
    """

    x: Register
    y: Register
    acc: Register
    control: int
    counter: Register
    max_x: int | None = None
    max_y: int | None = None
    acc_start: int = 0

    @property
    def bound_x(self) -> int:
        return (1 << len(self.x)) - 1 if self.max_x is None else self.max_x

    @property
    def bound_y(self) -> int:
        return (1 << len(self.y)) - 1 if self.max_y is None else self.max_y

    @property
    def blocks(self) -> int:
        return self.bound_y + 1

    @classmethod
    def allocate(cls, layout: RegisterLayout, x: Register, y: Register, acc: Register,
                 *, prefix: str = "", max_x: int | None = None, max_y: int | None = None,
                 acc_start: int = 0) -> "MultiplierLayout":
        """Add the control qubit and loop counter to ``layout``."""
        bound_y = (1 << len(y)) - 1 if max_y is None else max_y
        control = layout.add(prefix + "control", 1)
        counter = layout.add(prefix + "counter", bit_length(bound_y))
        return cls(x, y, acc, control[0], counter, max_x, max_y, acc_start)

    def validate(self) -> None:
        if self.max_x is None and self.max_y is None and self.acc_start == 0:
            if len(self.acc) < len(self.x) + len(self.y):
                raise CircuitError(
                    f"accumulator has {len(self.acc)} qubits, needs {len(self.x) + len(self.y)}"
                )
        need = self.acc_start + self.bound_x * self.bound_y
        if need >= 1 << len(self.acc):
            raise CircuitError(f"accumulator of {len(self.acc)} qubits cannot hold {need}")
        if self.bound_y >= 1 << len(self.y) or self.bound_x >= 1 << len(self.x):
            raise CircuitError("input bound exceeds register width")
        if (1 << len(self.counter)) < self.blocks:
            raise CircuitError("loop counter too narrow for the unroll count")
        regs = [self.x.qubits, self.y.qubits, self.acc.qubits, (self.control,),
                self.counter.qubits]
        flat = [q for r in regs for q in r]
        if len(set(flat)) != len(flat):
            raise CircuitError("multiplier registers overlap")


def build_multiplier(layout: MultiplierLayout, *, blocks: int | None = None,
                     snapshots: bool = True) -> Circuit:
    """Accumulate ``x * y`` into ``acc``, consuming ``y``.

    Afterwards ``y == 0`` and ``control == 1`` and ``x`` is unchanged. ``blocks``
    overrides the unroll count (only useful for demonstrating that fewer blocks
    are insufficient).
    """
    layout.validate()
    nblocks = layout.blocks if blocks is None else blocks
    ctrl = layout.control
    enabled = ((ctrl, False),)
    add = build_adder(layout.acc, layout.x, controls=enabled)
    dec = build_decrement(layout.y, ctrl, polarity=False)
    tick = build_increment(layout.counter, ctrl, polarity=True)
    check = build_zero_check(layout.y, ctrl, guard=layout.counter)
    if not snapshots:
        dec = dec.without_marks()

    parts = [build_qft(layout.acc), Circuit.label("acc fourier")]
    for i in range(1, nblocks + 1):
        if i > 1:
            parts.append(tick)
        parts.append(check)
        parts.append(Circuit.label(f"block {i}/checked"))
        parts.append(add)
        if snapshots:
            parts.append(Circuit.label(f"block {i}/summed"))
        parts.append(dec.prefixed(f"block {i}/y "))
        if snapshots:
            parts.append(Circuit.label(f"block {i}/done"))
    parts.append(build_inv_qft(layout.acc))
    parts.append(Circuit.label("acc basis"))
    return Circuit.concat(parts)


def multiplier_registers(n_x: int, n_y: int, n_acc: int, *, max_x: int | None = None,
                         max_y: int | None = None) -> tuple[RegisterLayout, MultiplierLayout]:
    """Standalone layout: x, y, acc, control, counter in that qubit order."""
    layout = RegisterLayout()
    x = layout.add("x", n_x)
    y = layout.add("y", n_y)
    acc = layout.add("acc", n_acc)
    mul = MultiplierLayout.allocate(layout, x, y, acc, max_x=max_x, max_y=max_y)
    return layout, mul
