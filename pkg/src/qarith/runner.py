"""Execute circuits on a backend and collect readouts and snapshots."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

import numpy as np

from .gates import Circuit, dyadic_str
from .layout import RegisterLayout
from .product import ProductState, init_product
from .statevec import DenseState, NotDeterministic, SimulationError, init_basis

BACKENDS = ("dense", "product")
DENSE_AUTO_LIMIT = 14
EQUIVALENCE_TOL = 1e-10


class BackendMismatch(SimulationError):
    """The dense and product backends disagree."""


def make_state(backend: str, layout: RegisterLayout, assignments: Mapping[str, int]):
    if backend == "dense":
        return init_basis(layout, assignments)
    if backend == "product":
        return init_product(layout, assignments)
    raise ValueError(f"unknown backend {backend!r}")


def run_circuit(circuit: Circuit, state, observer: Callable[[str, object], None] | None = None):
    """Apply every gate in order; call ``observer(label, state)`` at each mark."""
    marks = circuit.marks if observer is not None else ()
    mi = 0
    apply = state.apply
    for i, gate in enumerate(circuit.gates):
        while mi < len(marks) and marks[mi][0] == i:
            observer(marks[mi][1], state)
            mi += 1
        apply(gate)
    while mi < len(marks):
        observer(marks[mi][1], state)
        mi += 1
    return state


def describe_register(state, qubits) -> int | list[str] | None:
    """Integer value if the register is in a basis state.

    On the product backend a Fourier-form register is described by its per-qubit
    phases (``"num/2^d"``). Anything else is ``None``.
    """
    if isinstance(state, ProductState):
        if all(state.is_basis(q) for q in qubits):
            return state.read(qubits)
        if not any(state.is_basis(q) for q in qubits):
            return [dyadic_str(p) for p in state.phases(qubits)]
        return None
    try:
        return state.read(qubits)
    except NotDeterministic:
        return None


@dataclass
class RunResult:
    backend: str
    state: object
    registers: dict[str, int]
    snapshots: list[dict] = field(default_factory=list)


def simulate(circuit: Circuit, layout: RegisterLayout, assignments: Mapping[str, int],
             backend: str, *, read: Iterable[str] | None = None,
             snapshots: bool = False, snapshot_filter: Callable[[str], bool] | None = None
             ) -> RunResult:
    """Prepare a basis state, run ``circuit`` and read registers deterministically."""
    state = make_state(backend, layout, assignments)
    snaps: list[dict] = []
    observer = None
    if snapshots:
        def observer(label, st):
            if snapshot_filter is None or snapshot_filter(label):
                snaps.append({"label": label, "registers": {
                    r.name: describe_register(st, r.qubits) for r in layout}})
    run_circuit(circuit, state, observer)
    names = [r.name for r in layout] if read is None else list(read)
    registers = {name: state.read(layout[name].qubits) for name in names}
    return RunResult(backend, state, registers, snaps)


def choose_backends(choice: str | None, num_qubits: int) -> tuple[str, ...]:
    if choice is None or choice == "auto":
        return ("dense", "product") if num_qubits <= DENSE_AUTO_LIMIT else ("product",)
    if choice == "both":
        return ("dense", "product")
    if choice not in BACKENDS:
        raise ValueError(f"unknown backend {choice!r}")
    return (choice,)


def max_deviation(dense: DenseState, product: ProductState) -> float:
    embedded = product.embed_dense()
    return float(np.max(np.abs(dense.amplitudes - embedded.amplitudes)))


def simulate_backends(circuit: Circuit, layout: RegisterLayout, assignments: Mapping[str, int],
                      backends: Iterable[str], *, read: Iterable[str] | None = None,
                      snapshots: bool = False, tol: float = EQUIVALENCE_TOL
                      ) -> dict[str, RunResult]:
    """Run on each backend; with both, require identical readouts and matching states."""
    results = {b: simulate(circuit, layout, assignments, b, read=read, snapshots=snapshots)
               for b in backends}
    if "dense" in results and "product" in results:
        d, p = results["dense"], results["product"]
        if d.registers != p.registers:
            raise BackendMismatch(f"readouts differ: dense {d.registers} vs product {p.registers}")
        dev = max_deviation(d.state, p.state)
        if dev > tol:
            raise BackendMismatch(f"states differ by {dev:.3e} > {tol:g}")
    return results
