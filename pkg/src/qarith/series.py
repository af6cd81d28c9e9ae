"""Truncated power-series evaluation built from the arithmetic circuits.

The evaluator computes ``sum_k w_k * x**k`` where every weight ``w_k`` is a
``t``-bit binary fraction ``num_k / 2**t``. All terms share one exponent
``-t``: the accumulator holds the mantissa ``sum_k num_k * x**k`` and the
exponent is classical metadata. For ``exp`` the default weights are
``floor(2**t / k!)`` (truncated, not rounded), and the weights of ``k = 0, 1``
are exactly one (mantissa ``2**t``).

Per term ``k``:

* the power chain produces ``x**k``, alternating between two registers. Odd
  powers land in ``p1`` and even powers in ``p3``. Each multiplication consumes
  (zeroes) the register holding the previous power;
* a unit weight is added with a shifted Fourier adder; any other weight is
  loaded into ``phi`` by phase estimation, multiplied with a copy of ``x**k``
  into the accumulator, and erased again.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

from .arith import MultiplierLayout, build_multiplier
from .gates import (Circuit, CircuitError, build_adder, build_inv_qft, build_qft, cnot,
                    cphase, hadamard, parse_dyadic, swap)
from .layout import Register, RegisterLayout, bit_length


# -- fixed point -------------------------------------------------------------


@dataclass(frozen=True)
class FixedPointNumber:
    """``mantissa * 2**exponent`` with a non-negative integer mantissa."""

    mantissa: int
    exponent: int

    def __post_init__(self):
        if self.mantissa < 0:
            raise ValueError("mantissa must be non-negative")

    @property
    def value(self) -> Fraction:
        return Fraction(self.mantissa) * Fraction(2) ** self.exponent

    def __float__(self) -> float:
        return float(self.value)

    def aligned(self, exponent: int) -> "FixedPointNumber":
        """Rewrite with a smaller (or equal) exponent by shifting the mantissa left."""
        if exponent > self.exponent:
            raise ValueError(
                f"aligning {self} to exponent {exponent} would drop low bits"
            )
        return FixedPointNumber(self.mantissa << (self.exponent - exponent), exponent)

    def __add__(self, other: "FixedPointNumber") -> "FixedPointNumber":
        if self.exponent != other.exponent:
            raise ValueError("fixed-point addition needs equal exponents; align first")
        return FixedPointNumber(self.mantissa + other.mantissa, self.exponent)

    def __mul__(self, other: "FixedPointNumber") -> "FixedPointNumber":
        return FixedPointNumber(self.mantissa * other.mantissa, self.exponent + other.exponent)

    def __str__(self) -> str:
        return f"{self.mantissa} x 2^{self.exponent}"


def align_fixed_point(terms: Iterable[FixedPointNumber],
                      target_exponent: int) -> list[FixedPointNumber]:
    return [t.aligned(target_exponent) for t in terms]


# -- weights -----------------------------------------------------------------


@dataclass(frozen=True)
class WeightPhase:
    """A series weight ``phase_numerator / 2**t``.

    ``phase_numerator == 2**t`` is the unit weight, added directly without
    phase loading. Any other weight lies in ``[0, 2**t)``.
    """

    k: int
    t: int
    phase_numerator: int

    def __post_init__(self):
        if self.t < 1:
            raise ValueError("weight precision t must be at least 1")
        if not 0 <= self.phase_numerator <= 1 << self.t:
            raise ValueError(f"weight numerator {self.phase_numerator} outside [0, 2^{self.t}]")

    @classmethod
    def truncated(cls, k: int, t: int) -> "WeightPhase":
        """``1/k!`` truncated to ``t`` fractional bits."""
        if k in (0, 1):
            return cls(k, t, 1 << t)
        return cls(k, t, (1 << t) // math.factorial(k))

    @property
    def is_unit(self) -> bool:
        return self.phase_numerator == 1 << self.t

    @property
    def value(self) -> Fraction:
        return Fraction(self.phase_numerator, 1 << self.t)

    @property
    def exponent(self) -> int:
        return -self.t


@dataclass(frozen=True)
class SeriesSpec:
    order: int
    t: int
    weights: tuple[WeightPhase, ...]
    widths: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.order < 0:
            raise ValueError("order must be non-negative")
        if len(self.weights) != self.order + 1:
            raise ValueError(f"need {self.order + 1} weights, got {len(self.weights)}")
        for k, w in enumerate(self.weights):
            if w.k != k or w.t != self.t:
                raise ValueError(f"weight {k} does not match order and t")

    @classmethod
    def exponential(cls, order: int, t: int, **widths) -> "SeriesSpec":
        return cls(order, t, tuple(WeightPhase.truncated(k, t) for k in range(order + 1)),
                   dict(widths))

    @classmethod
    def from_config(cls, config: dict) -> "SeriesSpec":
        """Build from ``{order, t, weights?, widths?}``.

        ``weights`` entries are ``"num/2^d"`` strings (or ``"1"``) and must be
        exactly representable with ``t`` bits.
        """
        order = int(config["order"])
        t = int(config["t"])
        widths = dict(config.get("widths") or {})
        raw = config.get("weights")
        if raw is None:
            return cls.exponential(order, t, **widths)
        if len(raw) != order + 1:
            raise ValueError(f"config lists {len(raw)} weights for order {order}")
        weights = []
        for k, text in enumerate(raw):
            w = Fraction(1) if str(text).strip() == "1" else parse_dyadic(str(text))
            num = w * (1 << t)
            if num.denominator != 1:
                raise ValueError(f"weight {text} needs more than t={t} bits")
            weights.append(WeightPhase(k, t, int(num)))
        return cls(order, t, tuple(weights), widths)

    @classmethod
    def load(cls, path: str | Path) -> "SeriesSpec":
        return cls.from_config(json.loads(Path(path).read_text()))

    def to_config(self) -> dict:
        return {
            "order": self.order,
            "t": self.t,
            "weights": ["1" if w.is_unit else f"{w.phase_numerator}/2^{self.t}"
                        for w in self.weights],
            "widths": dict(self.widths),
        }

    def mantissa_bound(self, max_x: int) -> int:
        return sum(w.phase_numerator * max_x ** w.k for w in self.weights)


# -- building blocks ---------------------------------------------------------


def build_copy(src_register: Sequence[int], dst_register: Sequence[int]) -> Circuit:
    """CNOT fan-out ``dst ^= src``; copies a basis state into a zeroed ``dst``.

    ``dst`` may be wider than ``src``; the values are aligned at the least
    significant qubit.
    """
    src, dst = tuple(src_register), tuple(dst_register)
    if len(dst) < len(src):
        raise CircuitError("copy destination narrower than source")
    off = len(dst) - len(src)
    return Circuit(tuple(cnot(s, dst[off + i]) for i, s in enumerate(src)))


def build_swap_registers(a: Sequence[int], b: Sequence[int]) -> Circuit:
    if len(a) != len(b):
        raise CircuitError("SWAP plumbing needs equal widths")
    return Circuit(tuple(swap(p, q) for p, q in zip(a, b)))


def _weight_numerator(k: int, t: int, numerator: int | None) -> int:
    if t < 1:
        raise CircuitError("phase register needs t >= 1")
    num = WeightPhase.truncated(k, t).phase_numerator if numerator is None else numerator
    if not 0 <= num < 1 << t:
        raise CircuitError(f"weight {num}/2^{t} cannot be phase-loaded")
    return num


def build_weight_loader(k: int, t: int, phi_register: Sequence[int], eigen_qubit: int,
                        numerator: int | None = None) -> Circuit:
    """Phase estimation of ``U = diag(1, exp(2 pi i num/2**t))`` on eigenstate ``|1>``.

    Leaves ``phi`` holding ``num`` exactly, since the phase has ``t`` bits. In
    the swap-free QFT convention the qubit ``j`` (1-based, MSB first) controls
    ``U**(2**(j-1))``.
    """
    phi = tuple(phi_register)
    if len(phi) != t:
        raise CircuitError(f"phase register has {len(phi)} qubits, expected t={t}")
    num = _weight_numerator(k, t, numerator)
    theta = Fraction(num, 1 << t)
    gates = [hadamard(q) for q in phi]
    for j, q in enumerate(phi):
        power_phase = (theta * (1 << j)) % 1
        if power_phase:
            gates.append(cphase(power_phase, eigen_qubit, (q, True)))
    return Circuit(tuple(gates)) + Circuit.label("phi kicked") + build_inv_qft(phi)


def build_weight_eraser(k: int, t: int, phi_register: Sequence[int], eigen_qubit: int,
                        numerator: int | None = None) -> Circuit:
    """Return ``phi`` from ``|num>`` to ``|0...0>``.

    QFT, then controlled ``-U**(2**(j-1))`` to cancel each qubit's phase, then
    a Hadamard per qubit.
    """
    phi = tuple(phi_register)
    if len(phi) != t:
        raise CircuitError(f"phase register has {len(phi)} qubits, expected t={t}")
    num = _weight_numerator(k, t, numerator)
    theta = Fraction(num, 1 << t)
    gates = []
    for j, q in enumerate(phi):
        power_phase = (theta * (1 << j)) % 1
        if power_phase:
            gates.append(cphase(power_phase, eigen_qubit, (q, True), negative=True))
    return (build_qft(phi) + Circuit(tuple(gates)) + Circuit.label("phi unwound")
            + Circuit(tuple(hadamard(q) for q in phi)))


# -- power chain ---------------------------------------------------------------


class PowerChain:
    """Snake computation of ``x**2 ... x**K`` over registers ``p1``/``p3``.

    ``x`` stays put. ``x**k`` sits in ``p3`` for even ``k`` and ``p1`` for odd
    ``k >= 3``. The multiplication module always reads its multiplier from
    ``p1`` and accumulates into ``p3``. Odd steps are wrapped in a register
    SWAP before and after so the same module serves both directions.
    """

    def __init__(self, layout: RegisterLayout, x: Register, max_power: int, max_x: int,
                 width: int | None = None):
        if max_power < 2:
            raise ValueError("power chain needs max_power >= 2")
        if max_x >= 1 << len(x):
            raise CircuitError(f"max_x={max_x} does not fit the x register")
        self.layout = layout
        self.x = x
        self.max_power = max_power
        self.max_x = max_x
        need = bit_length(max(max_x ** max_power, max_x))
        if width is None:
            width = max(need, len(x))
        if width < need or width < len(x):
            raise CircuitError(f"power registers of {width} qubits cannot hold {max_x}^{max_power}")
        self.p1 = layout.add("p1", width)
        self.p3 = layout.add("p3", width)

    def register_for(self, k: int) -> Register:
        if k == 1:
            return self.x
        return self.p3 if k % 2 == 0 else self.p1

    def step(self, k: int) -> Circuit:
        """Circuit taking ``x**(k-1)`` to ``x**k``."""
        if not 2 <= k <= self.max_power:
            raise ValueError(f"step {k} outside 2..{self.max_power}")
        mul = MultiplierLayout.allocate(
            self.layout, self.x, self.p1, self.p3, prefix=f"pow{k}/",
            max_x=self.max_x, max_y=self.max_x ** (k - 1),
        )
        body = build_multiplier(mul).prefixed(f"pow{k}/")
        parts = []
        if k == 2:
            parts.append(build_copy(self.x, self.p1))
            parts.append(Circuit.label("pow2/copied"))
        if k % 2:
            wrap_swaps = build_swap_registers(self.p1, self.p3)
            parts += [wrap_swaps, body, wrap_swaps]
        else:
            parts.append(body)
        parts.append(Circuit.label(f"pow{k}/done"))
        return Circuit.concat(parts)


def build_power_chain(x_register: Register, max_power: int, *, layout: RegisterLayout,
                      max_x: int, width: int | None = None) -> tuple[Circuit, PowerChain]:
    chain = PowerChain(layout, x_register, max_power, max_x, width)
    circuit = Circuit.concat(chain.step(k) for k in range(2, max_power + 1))
    return circuit, chain


# -- evaluator -----------------------------------------------------------------


@dataclass
class SeriesCircuit:
    spec: SeriesSpec
    max_x: int
    layout: RegisterLayout
    circuit: Circuit
    chain: PowerChain | None

    @property
    def exponent(self) -> int:
        return -self.spec.t

    def initial(self, x: int) -> dict[str, int]:
        if not 0 <= x <= self.max_x:
            raise ValueError(f"x={x} outside the planned range [0, {self.max_x}]")
        values = {"x": x, "acc": self.spec.weights[0].phase_numerator}
        if "eigen" in self.layout:
            values["eigen"] = 1
        return values

    def result(self, mantissa: int) -> FixedPointNumber:
        return FixedPointNumber(mantissa, self.exponent)


def build_series(spec: SeriesSpec, max_x: int) -> SeriesCircuit:
    """Plan registers and build the whole evaluation circuit for ``x <= max_x``.

    The ``k = 0`` term (``w_0 * x**0``) is loaded classically as the initial
    accumulator content.
    """
    if max_x < 0:
        raise ValueError("negative x is not supported")
    t, order = spec.t, spec.order
    widths = spec.widths
    layout = RegisterLayout()
    x_width = widths.get("x", bit_length(max_x))
    if max_x >= 1 << x_width:
        raise CircuitError(f"x register of {x_width} qubits cannot hold {max_x}")
    x = layout.add("x", x_width)

    bound = spec.mantissa_bound(max_x)
    acc_width = widths.get("acc", bit_length(bound))
    if bound >= 1 << acc_width:
        raise CircuitError(f"accumulator of {acc_width} qubits overflows (bound {bound})")
    acc = layout.add("acc", acc_width)

    chain = PowerChain(layout, x, order, max_x, widths.get("power")) if order >= 2 else None
    loaded = [w for w in spec.weights[1:] if not w.is_unit and w.phase_numerator]
    if loaded:
        copy_width = max(len(x), len(chain.p1) if chain else 0)
        w1 = layout.add("w1", copy_width)
        phi = layout.add("phi", t)
        eigen = layout.add("eigen", 1)

    parts = [Circuit.label("start")]
    partial = spec.weights[0].phase_numerator
    for k in range(1, order + 1):
        if k >= 2:
            parts.append(chain.step(k))
        w = spec.weights[k]
        src = chain.register_for(k) if chain else x
        max_term = max_x ** k
        if w.phase_numerator == 0:
            pass
        elif w.is_unit:
            parts += [build_qft(acc), Circuit.label(f"term{k}/acc fourier"),
                      build_adder(acc, src, shift=t), Circuit.label(f"term{k}/summed"),
                      build_inv_qft(acc)]
        else:
            mul = MultiplierLayout.allocate(
                layout, phi, w1, acc, prefix=f"term{k}/",
                max_x=w.phase_numerator, max_y=max_term, acc_start=partial,
            )
            parts += [
                build_copy(src, w1),
                Circuit.label(f"term{k}/copied"),
                build_weight_loader(k, t, phi, eigen[0], w.phase_numerator).prefixed(f"term{k}/"),
                Circuit.label(f"term{k}/loaded"),
                build_multiplier(mul).prefixed(f"term{k}/"),
                Circuit.label(f"term{k}/multiplied"),
                build_weight_eraser(k, t, phi, eigen[0], w.phase_numerator).prefixed(f"term{k}/"),
            ]
        partial += w.phase_numerator * max_term
        parts.append(Circuit.label(f"term{k}/done"))
    return SeriesCircuit(spec, max_x, layout, Circuit.concat(parts), chain)


def evaluate_series(x: int, spec: SeriesSpec, backend: str = "product",
                    max_x: int | None = None) -> FixedPointNumber:
    """Run the series circuit on ``x`` and return the accumulator as fixed point."""
    from .runner import simulate

    plan = build_series(spec, x if max_x is None else max_x)
    result = simulate(plan.circuit, plan.layout, plan.initial(x), backend, read=["acc"])
    return plan.result(result.registers["acc"])
