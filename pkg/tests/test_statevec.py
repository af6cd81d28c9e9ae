import cmath

import numpy as np
import pytest

from qarith.gates import GateOp, build_adder, build_inv_qft, build_qft, cnot, cphase, hadamard, mcx, rk, swap
from qarith.layout import RegisterLayout
from qarith.runner import run_circuit
from qarith.statevec import DenseState, NotDeterministic, apply_gate, init_basis, read_register

from oracles import random_state


def test_init_basis_three_qubit_register():
    layout = RegisterLayout()
    reg = layout.add("m", 3)
    state = init_basis(layout, {"m": 2})
    assert state.amplitudes[0b010] == 1
    assert np.count_nonzero(state.amplitudes) == 1
    assert read_register(state, reg) == 2


def test_init_basis_single_qubit_ground():
    layout = RegisterLayout()
    layout.add("q", 1)
    state = init_basis(layout, {"q": 0})
    np.testing.assert_array_equal(state.amplitudes, [1, 0])


def test_init_basis_two_registers_concatenate():
    layout = RegisterLayout()
    layout.add("a", 2)
    layout.add("b", 2)
    state = init_basis(layout, {"a": 3, "b": 1})
    assert state.amplitudes[0b1101] == 1


def test_init_basis_rejects_overflow():
    layout = RegisterLayout()
    layout.add("a", 2)
    with pytest.raises(ValueError):
        init_basis(layout, {"a": 4})


def test_overlapping_registers_rejected():
    from qarith.layout import Register
    layout = RegisterLayout()
    layout.add("a", 2)
    with pytest.raises(ValueError):
        layout.adopt(Register("b", (1, 2)))


def test_qubit_cap():
    with pytest.raises(ValueError):
        DenseState(25)
    DenseState(3, max_qubits=3)
    with pytest.raises(ValueError):
        DenseState(4, max_qubits=3)


def test_hadamard_on_zero():
    state = apply_gate(DenseState(1), hadamard(0))
    np.testing.assert_allclose(state.amplitudes, [2 ** -0.5, 2 ** -0.5], atol=1e-15)


def test_r1_on_one_is_minus_one():
    state = DenseState.basis([1])
    apply_gate(state, rk(1, 0))
    np.testing.assert_allclose(state.amplitudes, [0, -1], atol=1e-15)


def test_neg_r2_phase():
    state = DenseState.basis([1])
    apply_gate(state, rk(2, 0, negative=True))
    assert abs(state.amplitudes[1] - cmath.exp(-2j * cmath.pi / 4)) < 1e-15


def test_out_of_range_qubit():
    with pytest.raises(IndexError):
        DenseState(2).apply(hadamard(2))


def test_collision_rejected():
    with pytest.raises(ValueError):
        GateOp("CNOT", (0,), ((0, True),))


def test_read_register_values():
    layout = RegisterLayout()
    reg = layout.add("r", 3)
    assert read_register(init_basis(layout, {"r": 4}), reg) == 4
    assert read_register(init_basis(layout, {"r": 0}), reg) == 0


def test_read_register_after_adder():
    layout = RegisterLayout()
    a = layout.add("a", 3)
    b = layout.add("b", 3)
    circuit = build_qft(a) + build_adder(a, b) + build_inv_qft(a)
    state = run_circuit(circuit, init_basis(layout, {"a": 1, "b": 2}))
    assert read_register(state, a) == 3


def test_read_register_not_deterministic():
    state = apply_gate(DenseState(2), hadamard(1))
    assert state.read([0]) == 0
    with pytest.raises(NotDeterministic):
        state.read([1])


def test_read_register_respects_register_order():
    state = DenseState.basis([1, 0, 0])
    assert state.read([0, 1, 2]) == 4
    assert state.read([2, 1, 0]) == 1
    assert state.read([1, 0]) == 1


GATES = [
    hadamard(1), rk(3, 0, (2, True)), rk(2, 2, (0, False), negative=True),
    cphase("3/8", 1, (0, True)), cnot(0, 2), mcx(1, [(0, False), (2, True)]), swap(0, 2),
    swap(0, 1, (2, False)), GateOp("H", (0,), ((1, True),)),
]


@pytest.mark.parametrize("gate", GATES, ids=str)
def test_norm_preserved_per_gate(gate, rng):
    state = DenseState(3, random_state(rng, 3))
    before = state.norm()
    state.apply(gate)
    assert abs(state.norm() - before) < 1e-12


@pytest.mark.parametrize("gate", GATES, ids=str)
def test_gate_then_inverse_is_identity(gate, rng):
    psi = random_state(rng, 3)
    state = DenseState(3, psi)
    state.apply(gate).apply(gate.inverse())
    np.testing.assert_allclose(state.amplitudes, psi, atol=1e-12, rtol=0)


@pytest.mark.parametrize("gate", GATES, ids=str)
def test_linearity(gate, rng):
    u, v = random_state(rng, 3), random_state(rng, 3)
    alpha, beta = 0.6, 0.8j
    combined = DenseState(3, alpha * u + beta * v).apply(gate).amplitudes
    separate = (alpha * DenseState(3, u).apply(gate).amplitudes
                + beta * DenseState(3, v).apply(gate).amplitudes)
    np.testing.assert_allclose(combined, separate, atol=1e-12, rtol=0)


def test_gate_matches_explicit_matrix(rng):
    # controlled phase on qubits (control 0, target 2) of a 3-qubit state
    psi = random_state(rng, 3)
    theta = 5 / 16
    diag = np.ones(8, dtype=complex)
    for idx in range(8):
        if (idx >> 2) & 1 and idx & 1:
            diag[idx] = cmath.exp(2j * cmath.pi * theta)
    got = DenseState(3, psi).apply(cphase("5/16", 2, (0, True))).amplitudes
    np.testing.assert_allclose(got, diag * psi, atol=1e-15)
