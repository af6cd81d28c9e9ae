from collections import Counter

import pytest

from qarith.arith import (MultiplierLayout, build_decrement, build_multiplier,
                          build_zero_check, multiplier_registers)
from qarith.gates import MCX, CircuitError
from qarith.layout import RegisterLayout
from qarith.runner import simulate, simulate_backends


def _run_dec(y, n, backend="product"):
    layout = RegisterLayout()
    reg = layout.add("y", n)
    return simulate(build_decrement(reg), layout, {"y": y}, backend).registers["y"]


def test_decrement_three_to_two():
    assert _run_dec(0b11, 2) == 0b10


def test_decrement_one_to_zero():
    assert _run_dec(0b001, 3) == 0


def test_decrement_wraps():
    assert _run_dec(0, 2) == 3


@pytest.mark.parametrize("n", [1, 2, 3, 4])
@pytest.mark.parametrize("backend", ["dense", "product"])
def test_decrement_exhaustive(n, backend):
    for y in range(1 << n):
        assert _run_dec(y, n, backend) == (y - 1) % (1 << n)


@pytest.mark.parametrize("ctrl", [0, 1])
def test_controlled_decrement_enabled_on_zero(ctrl):
    layout = RegisterLayout()
    y = layout.add("y", 3)
    c = layout.add("c", 1)
    res = simulate_backends(build_decrement(y, c[0]), layout, {"y": 5, "c": ctrl},
                            ["dense", "product"])
    assert res["dense"].registers["y"] == (4 if ctrl == 0 else 5)


@pytest.mark.parametrize("y,ctrl,expected", [(0, 0, 1), (0b010, 0, 0), (0, 1, 0)])
def test_zero_check(y, ctrl, expected):
    layout = RegisterLayout()
    ry = layout.add("y", 3)
    rc = layout.add("c", 1)
    res = simulate_backends(build_zero_check(ry, rc[0]), layout, {"y": y, "c": ctrl},
                            ["dense", "product"])
    assert res["product"].registers["c"] == expected
    assert res["product"].registers["y"] == y


def test_zero_check_is_one_negative_mcx():
    c = build_zero_check([0, 1, 2], 3)
    assert len(c) == 1 and c.gates[0].kind == MCX
    assert all(not pol for _, pol in c.gates[0].controls)


def _mul(x, y, n_x=3, n_y=3, n_acc=6, backend="product", **kw):
    layout, mul = multiplier_registers(n_x, n_y, n_acc, **kw)
    return simulate(build_multiplier(mul), layout, {"x": x, "y": y}, backend).registers


def test_mul_two_by_two_tight():
    regs = _mul(2, 2, n_acc=3, max_x=2, max_y=2)
    assert regs["acc"] == 4 and regs["y"] == 0 and regs["control"] == 1 and regs["x"] == 2


def test_mul_by_zero():
    regs = _mul(5, 0)
    assert regs["acc"] == 0 and regs["control"] == 1


def test_mul_three_by_two():
    assert _mul(3, 2)["acc"] == 6


@pytest.mark.parametrize("backend", ["product", "dense"])
def test_mul_exhaustive(backend):
    layout, mul = multiplier_registers(3, 3, 6)
    circuit = build_multiplier(mul, snapshots=False)
    for x in range(8):
        for y in range(8):
            regs = simulate(circuit, layout, {"x": x, "y": y}, backend).registers
            assert regs["acc"] == x * y
            assert regs["y"] == 0 and regs["control"] == 1 and regs["x"] == x
            assert regs["counter"] == mul.blocks - 1 - y


def test_mul_final_state_is_basis_state():
    layout, mul = multiplier_registers(2, 2, 4)
    res = simulate(build_multiplier(mul), layout, {"x": 3, "y": 3}, "dense")
    probs = abs(res.state.amplitudes) ** 2
    assert probs.max() >= 1 - 1e-9


def test_unroll_count_is_two_to_the_ny():
    layout, mul = multiplier_registers(3, 3, 6)
    c = build_multiplier(mul)
    checks = [g for g in c.gates if g.kind == MCX and g.targets == (mul.control,)]
    assert len(checks) == 8 == mul.blocks


def test_fewer_blocks_fail_for_largest_y():
    layout, mul = multiplier_registers(2, 3, 5)
    short = build_multiplier(mul, blocks=mul.blocks - 1)
    regs = simulate(short, layout, {"x": 1, "y": 7}, "product").registers
    assert regs["control"] == 0  # loop never terminated
    full = simulate(build_multiplier(mul), layout, {"x": 1, "y": 7}, "product").registers
    assert full["control"] == 1 and full["acc"] == 7


def test_narrow_accumulator_rejected():
    with pytest.raises(CircuitError):
        build_multiplier(multiplier_registers(3, 3, 5)[1])
    with pytest.raises(CircuitError):
        build_multiplier(multiplier_registers(3, 3, 3, max_x=3, max_y=3)[1])


def test_multiplier_allocates_on_existing_layout():
    layout = RegisterLayout()
    x = layout.add("a", 2)
    y = layout.add("b", 2)
    acc = layout.add("p", 4)
    mul = MultiplierLayout.allocate(layout, x, y, acc, prefix="m/")
    assert "m/control" in layout and "m/counter" in layout
    regs = simulate(build_multiplier(mul), layout, {"a": 3, "b": 2}, "product").registers
    assert regs["p"] == 6


def test_multiplier_intermediate_fourier_states():
    layout, mul = multiplier_registers(3, 3, 3, max_x=2, max_y=2)
    res = simulate(build_multiplier(mul), layout, {"x": 2, "y": 2}, "product",
                   snapshots=True)
    snaps = {s["label"]: s["registers"] for s in res.snapshots}
    assert snaps["acc fourier"]["acc"] == ["0/2^0"] * 3
    assert snaps["block 1/summed"]["acc"] == ["1/2^2", "1/2^1", "0/2^0"]
    assert snaps["block 2/summed"]["acc"] == ["1/2^1", "0/2^0", "0/2^0"]
    assert snaps["block 1/y decremented"]["y"] == ["1/2^3", "1/2^2", "1/2^1"]
    assert snaps["block 2/y decremented"]["y"] == ["0/2^0"] * 3
    assert snaps["block 3/checked"]["control"] == 1
    counts = Counter(lbl.split("/")[0] for lbl in snaps if lbl.startswith("block"))
    assert len(counts) == mul.blocks
