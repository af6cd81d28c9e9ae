"""Gate set, circuits and the Fourier-basis building blocks.

Phases are exact dyadic rationals (``fractions.Fraction`` with a power-of-two
denominator) and mean a factor ``exp(2*pi*i*theta)`` on the ``|1>`` branch of
the target. They only become complex numbers inside a backend.

The QFT used throughout is the swap-free form: after ``build_qft`` on an
``n``-qubit register holding ``a``, qubit ``j`` (1-based, MSB first) is
``(|0> + exp(2 pi i a / 2**(n-j+1)) |1>)/sqrt(2)``. The most significant qubit
therefore carries the full binary fraction ``0.a1 a2 ... an``.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Iterable, Sequence

H = "H"
R = "R"
NEG_R = "NEG_R"
CPHASE = "CPHASE"
NEG_CPHASE = "NEG_CPHASE"
CNOT = "CNOT"
MCX = "MCX"
SWAP = "SWAP"

PHASE_KINDS = frozenset({R, NEG_R, CPHASE, NEG_CPHASE})
KINDS = frozenset({H, CNOT, MCX, SWAP}) | PHASE_KINDS

TRACE_SCHEMA = 1


class CircuitError(ValueError):
    """Raised for malformed gates or circuits."""


# -- dyadic phases ---------------------------------------------------------


def dyadic(value) -> Fraction:
    """Coerce to a Fraction and insist the denominator is a power of two."""
    f = Fraction(value)
    d = f.denominator
    if d & (d - 1):
        raise CircuitError(f"{value} is not a dyadic rational")
    return f


def dyadic_str(theta: Fraction) -> str:
    """Render as ``"num/2^d"`` (``d`` may be 0)."""
    theta = dyadic(theta)
    return f"{theta.numerator}/2^{theta.denominator.bit_length() - 1}"


_DYADIC_RE = re.compile(r"^\s*(-?\d+)\s*/\s*2\^(\d+)\s*$")


def parse_dyadic(text: str) -> Fraction:
    m = _DYADIC_RE.match(text)
    if not m:
        raise CircuitError(f"expected 'num/2^d', got {text!r}")
    return Fraction(int(m.group(1)), 1 << int(m.group(2)))


def wrap(theta: Fraction) -> Fraction:
    """Reduce a phase into [0, 1)."""
    return theta - (theta.numerator // theta.denominator)


# -- gates -----------------------------------------------------------------


@dataclass(frozen=True)
class GateOp:
    """One gate application.

    ``controls`` holds ``(qubit, polarity)`` pairs; polarity ``False`` means the
    gate fires when that control is ``|0>``. ``k`` parameterises ``R``/``NEG_R``
    (phase ``+-1/2**k``) and ``theta`` parameterises ``CPHASE``/``NEG_CPHASE``.
    """

    kind: str
    targets: tuple[int, ...]
    controls: tuple[tuple[int, bool], ...] = ()
    k: int | None = None
    theta: Fraction | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise CircuitError(f"unknown gate kind {self.kind!r}")
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        object.__setattr__(
            self, "controls", tuple((int(q), bool(p)) for q, p in self.controls)
        )
        ntargets = 2 if self.kind == SWAP else 1
        if len(self.targets) != ntargets:
            raise CircuitError(f"{self.kind} takes {ntargets} target(s), got {self.targets}")
        if self.kind == CNOT and len(self.controls) != 1:
            raise CircuitError("CNOT takes exactly one control")
        if self.kind in (R, NEG_R):
            if self.k is None or self.k < 1:
                raise CircuitError(f"{self.kind} needs k >= 1")
        elif self.k is not None:
            raise CircuitError(f"{self.kind} does not take k")
        if self.kind in (CPHASE, NEG_CPHASE):
            if self.theta is None:
                raise CircuitError(f"{self.kind} needs theta")
            object.__setattr__(self, "theta", dyadic(self.theta))
        elif self.theta is not None:
            raise CircuitError(f"{self.kind} does not take theta")
        qubits = self.qubits
        if len(set(qubits)) != len(qubits):
            raise CircuitError(f"qubit collision in {self}")
        if any(q < 0 for q in qubits):
            raise CircuitError(f"negative qubit index in {self}")

    @property
    def qubits(self) -> tuple[int, ...]:
        return self.targets + tuple(q for q, _ in self.controls)

    @property
    def phase(self) -> Fraction:
        """The exact phase (in turns) of a diagonal gate."""
        if self.kind == R:
            return Fraction(1, 1 << self.k)
        if self.kind == NEG_R:
            return Fraction(-1, 1 << self.k)
        if self.kind == CPHASE:
            return self.theta
        if self.kind == NEG_CPHASE:
            return -self.theta
        raise CircuitError(f"{self.kind} is not a phase gate")

    def inverse(self) -> "GateOp":
        swap_kind = {R: NEG_R, NEG_R: R, CPHASE: NEG_CPHASE, NEG_CPHASE: CPHASE}
        if self.kind in swap_kind:
            return replace(self, kind=swap_kind[self.kind])
        return self

    def to_record(self) -> dict:
        rec = {"kind": self.kind, "targets": list(self.targets),
               "controls": [[q, int(p)] for q, p in self.controls]}
        if self.k is not None:
            rec["k"] = self.k
        if self.theta is not None:
            rec["theta"] = dyadic_str(self.theta)
        return rec

    @classmethod
    def from_record(cls, rec: dict) -> "GateOp":
        theta = rec.get("theta")
        return cls(
            kind=rec["kind"],
            targets=tuple(rec["targets"]),
            controls=tuple((q, bool(p)) for q, p in rec.get("controls", ())),
            k=rec.get("k"),
            theta=parse_dyadic(theta) if theta is not None else None,
        )

    def __str__(self) -> str:
        arg = f"({self.k})" if self.k is not None else ""
        if self.theta is not None:
            arg = f"({dyadic_str(self.theta)})"
        ctl = ",".join(f"{'' if p else '!'}{q}" for q, p in self.controls)
        tgt = ",".join(map(str, self.targets))
        return f"{self.kind}{arg} {tgt}" + (f" <- {ctl}" if ctl else "")


def hadamard(q: int) -> GateOp:
    return GateOp(H, (q,))


def rk(k: int, target: int, *controls: tuple[int, bool], negative: bool = False) -> GateOp:
    return GateOp(NEG_R if negative else R, (target,), tuple(controls), k=k)


def cphase(theta, target: int, *controls: tuple[int, bool], negative: bool = False) -> GateOp:
    return GateOp(NEG_CPHASE if negative else CPHASE, (target,), tuple(controls),
                  theta=dyadic(theta))


def cnot(control: int, target: int) -> GateOp:
    return GateOp(CNOT, (target,), ((control, True),))


def mcx(target: int, controls: Iterable[tuple[int, bool]]) -> GateOp:
    return GateOp(MCX, (target,), tuple(controls))


def swap(a: int, b: int, *controls: tuple[int, bool]) -> GateOp:
    return GateOp(SWAP, (a, b), tuple(controls))


# -- circuits --------------------------------------------------------------


@dataclass(frozen=True)
class Circuit:
    """An immutable gate sequence.

    ``rounds`` optionally assigns each gate a parallel round number (``None``
    for unscheduled gates); gates in one round act on pairwise-disjoint qubits. ``marks`` are ``(position,
    label)`` checkpoints meaning "after the first ``position`` gates".
    """

    gates: tuple[GateOp, ...] = ()
    rounds: tuple[int, ...] | None = None
    marks: tuple[tuple[int, str], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        object.__setattr__(self, "marks", tuple(self.marks))
        if self.rounds is not None:
            object.__setattr__(self, "rounds", tuple(self.rounds))
            if len(self.rounds) != len(self.gates):
                raise CircuitError("rounds must annotate every gate")
            seen: dict[int, set[int]] = {}
            for g, r in zip(self.gates, self.rounds):
                if r is None:
                    continue
                used = seen.setdefault(r, set())
                if used.intersection(g.qubits):
                    raise CircuitError(f"round {r} reuses a qubit at {g}")
                used.update(g.qubits)

    def __len__(self) -> int:
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    def __add__(self, other: "Circuit") -> "Circuit":
        if not isinstance(other, Circuit):
            return NotImplemented
        n = len(self.gates)
        rounds = None
        if self.rounds is not None or other.rounds is not None:
            off = self.num_rounds
            left = self.rounds or (None,) * len(self.gates)
            right = other.rounds or (None,) * len(other.gates)
            rounds = left + tuple(None if r is None else r + off for r in right)
        return Circuit(
            self.gates + other.gates,
            rounds,
            self.marks + tuple((p + n, lbl) for p, lbl in other.marks),
        )

    @classmethod
    def label(cls, text: str) -> "Circuit":
        """An empty circuit carrying a single checkpoint."""
        return cls(marks=((0, text),))

    @classmethod
    def concat(cls, parts: Iterable["Circuit"]) -> "Circuit":
        gates: list[GateOp] = []
        marks: list[tuple[int, str]] = []
        for part in parts:
            marks.extend((p + len(gates), lbl) for p, lbl in part.marks)
            gates.extend(part.gates)
        return cls(tuple(gates), None, tuple(marks))

    def prefixed(self, prefix: str) -> "Circuit":
        return replace(self, marks=tuple((p, prefix + lbl) for p, lbl in self.marks))

    def without_marks(self) -> "Circuit":
        return replace(self, marks=())

    def inverse(self) -> "Circuit":
        return Circuit(tuple(g.inverse() for g in reversed(self.gates)))

    def controlled(self, control: int, polarity: bool = True) -> "Circuit":
        """Add one more control to every gate (drops the round grouping)."""
        gates = tuple(replace(g, kind=MCX if g.kind == CNOT else g.kind,
                              controls=g.controls + ((control, polarity),))
                      for g in self.gates)
        return Circuit(gates, None, self.marks)

    @property
    def num_rounds(self) -> int:
        used = [r for r in self.rounds or () if r is not None]
        return max(used) + 1 if used else 0

    @property
    def qubits(self) -> set[int]:
        return {q for g in self.gates for q in g.qubits}

    def count(self, kind: str | None = None) -> int:
        if kind is None:
            return len(self.gates)
        return sum(1 for g in self.gates if g.kind == kind)

    def depth(self) -> int:
        """ASAP layer count, treating every gate as occupying all its qubits."""
        free: dict[int, int] = {}
        depth = 0
        for g in self.gates:
            layer = max((free.get(q, 0) for q in g.qubits), default=0) + 1
            for q in g.qubits:
                free[q] = layer
            depth = max(depth, layer)
        return depth

    def to_json(self, **extra) -> dict:
        records = []
        for i, g in enumerate(self.gates):
            rec = g.to_record()
            rec["round"] = None if self.rounds is None else self.rounds[i]
            records.append(rec)
        out = {"schema": TRACE_SCHEMA, "gates": records,
               "marks": [[p, lbl] for p, lbl in self.marks]}
        out.update(extra)
        return out

    @classmethod
    def from_json(cls, data: dict) -> "Circuit":
        if data.get("schema") != TRACE_SCHEMA:
            raise CircuitError(f"unsupported trace schema {data.get('schema')!r}")
        recs = data["gates"]
        gates = tuple(GateOp.from_record(r) for r in recs)
        rounds = [r.get("round") for r in recs]
        return cls(
            gates,
            None if all(r is None for r in rounds) else tuple(rounds),
            tuple((p, lbl) for p, lbl in data.get("marks", ())),
        )

    def dumps(self, **extra) -> str:
        return json.dumps(self.to_json(**extra), indent=1)


# -- Fourier-basis builders -------------------------------------------------


def _check_register(register: Sequence[int], what: str) -> tuple[int, ...]:
    qs = tuple(register)
    if not qs:
        raise CircuitError(f"{what} needs a non-empty register")
    return qs


def build_qft(register: Sequence[int]) -> Circuit:
    """Swap-free QFT; qubit j ends up carrying ``0.a_j ... a_n``."""
    qs = _check_register(register, "QFT")
    n = len(qs)
    gates = []
    for j in range(n):
        gates.append(hadamard(qs[j]))
        for m in range(j + 1, n):
            gates.append(rk(m - j + 1, qs[j], (qs[m], True)))
    return Circuit(tuple(gates))


def build_inv_qft(register: Sequence[int]) -> Circuit:
    """Exact inverse of :func:`build_qft`."""
    _check_register(register, "inverse QFT")
    return build_qft(register).inverse()


def build_adder(a_register: Sequence[int], b_register: Sequence[int], *,
                negate: bool = False, shift: int = 0, max_k: int | None = None,
                controls: Sequence[tuple[int, bool]] = ()) -> Circuit:
    """Fourier-basis adder: ``a <- a + b * 2**shift (mod 2**len(a))``.

    ``a_register`` must already be in Fourier form and ``b_register`` in a basis
    state. ``b`` may be narrower than ``a`` (its missing high bits are zero).
    Qubit ``a_j`` receives ``R_k`` controlled by ``b_m`` with
    ``k = len(a) - len(b) - shift + m - j + 1``; gates with ``k <= 0`` would add
    a whole turn and are omitted. With ``negate`` every ``R_k`` becomes
    ``-R_k`` (subtraction). ``max_k`` drops the finest rotations (approximate
    adder); ``None`` keeps full precision. Extra ``controls`` are attached to
    every gate.
    """
    a = _check_register(a_register, "adder")
    b = _check_register(b_register, "adder")
    if shift < 0:
        raise CircuitError("shift must be non-negative")
    if len(b) > len(a):
        raise CircuitError(f"width mismatch: b has {len(b)} qubits, a only {len(a)}")
    if set(a) & set(b):
        raise CircuitError("adder registers overlap")
    na, nb = len(a), len(b)
    gates = []
    for j in range(1, na + 1):
        for m in range(1, nb + 1):
            k = na - nb - shift + m - j + 1
            if k < 1 or (max_k is not None and k > max_k):
                continue
            gates.append(rk(k, a[j - 1], (b[m - 1], True), *controls, negative=negate))
    return Circuit(tuple(gates))


def build_subtractor(a_register, b_register, **kw) -> Circuit:
    return build_adder(a_register, b_register, negate=True, **kw)


def build_add_constant(register: Sequence[int], value: int, *,
                       controls: Sequence[tuple[int, bool]] = ()) -> Circuit:
    """Add an integer constant to a Fourier-form register (mod 2**n).

    Negative ``value`` subtracts, using ``-R_k`` gates.
    """
    qs = _check_register(register, "constant adder")
    n = len(qs)
    negate = value < 0
    value = abs(value) % (1 << n)
    gates = []
    for j in range(1, n + 1):
        # qubit j gets value / 2**(n-j+1); split into single-bit rotations
        for bit in range(n):
            if not (value >> bit) & 1:
                continue
            k = n - j + 1 - bit
            if k >= 1:
                gates.append(rk(k, qs[j - 1], *controls, negative=negate))
    return Circuit(tuple(gates))


def schedule_parallel(adder: Circuit) -> Circuit:
    """Regroup a pure controlled-phase circuit into rounds, one per ``k``.

    All gates are diagonal and therefore commute, so every ``R_k`` can run in
    the same round: within an adder ladder the ``R_k`` gates touch distinct
    target and control qubits.
    """
    if any(g.kind not in PHASE_KINDS for g in adder.gates):
        raise CircuitError("schedule_parallel only accepts commuting phase gates")
    if any(g.kind not in (R, NEG_R) for g in adder.gates):
        raise CircuitError("schedule_parallel groups R_k ladders only")
    ks = sorted({g.k for g in adder.gates})
    index = {k: i for i, k in enumerate(ks)}
    ordered = sorted(adder.gates, key=lambda g: g.k)
    rounds = tuple(index[g.k] for g in ordered)
    return Circuit(tuple(ordered), rounds)


def fourier_phases(value: int, width: int) -> list[Fraction]:
    """Per-qubit phases (MSB first) of the QFT of ``|value>``: classical reference."""
    return [wrap(Fraction(value, 1 << (width - j))) for j in range(width)]


__all__ = [
    "GateOp", "Circuit", "CircuitError", "H", "R", "NEG_R", "CPHASE", "NEG_CPHASE",
    "CNOT", "MCX", "SWAP", "PHASE_KINDS", "dyadic", "dyadic_str", "parse_dyadic",
    "wrap", "hadamard", "rk", "cphase", "cnot", "mcx", "swap", "build_qft",
    "build_inv_qft", "build_adder", "build_subtractor", "build_add_constant",
    "schedule_parallel", "fourier_phases", "TRACE_SCHEMA",
]
