"""Command-line driver.

Examples::

    qarith add --a 3 --b 5 --n 4 --parallel
    qarith mul --x 2 --y 2 --n 3 --json
    qarith eval --x 2 --order 2 --t 1
    qarith trace-e2
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .arith import build_decrement, build_multiplier, multiplier_registers
from .gates import (Circuit, CircuitError, build_adder, build_inv_qft, build_qft,
                    schedule_parallel)
from .layout import RegisterLayout, bit_length
from .product import WouldEntangle
from .runner import choose_backends, simulate, simulate_backends
from .series import (SeriesSpec, WeightPhase, build_power_chain, build_series,
                     build_weight_eraser, build_weight_loader)
from .statevec import DEFAULT_MAX_QUBITS, NotDeterministic, SimulationError

REPORT_SCHEMA = 1


@dataclass
class RunReport:
    command: str
    inputs: dict
    widths: dict
    backends: list[str]
    registers: dict
    gate_count: int
    depth: int
    result: dict = field(default_factory=dict)
    snapshots: list | None = None
    wall_time: float = 0.0
    schema: int = REPORT_SCHEMA

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, default=str)


class Usage(Exception):
    """Bad user input detected after argument parsing (exit code 2)."""


def _check_fits(name: str, value: int, width: int) -> None:
    if value < 0 or value >= 1 << width:
        raise Usage(f"--{name} {value} does not fit in {width} qubits")


def _execute(args, command: str, circuit: Circuit, layout: RegisterLayout, inputs: dict,
             *, read=None, snapshots_filter=None):
    backends = choose_backends(args.backend, layout.num_qubits)
    if "dense" in backends and layout.num_qubits > DEFAULT_MAX_QUBITS:
        raise SimulationError(f"{layout.num_qubits} qubits exceed the dense backend cap "
                              f"of {DEFAULT_MAX_QUBITS}; use --backend product")
    if args.trace:
        Path(args.trace).write_text(circuit.dumps(command=command, widths=layout.widths()))
    t0 = time.perf_counter()
    results = simulate_backends(circuit, layout, inputs, backends, read=read,
                                snapshots=args.snapshots)
    wall = time.perf_counter() - t0
    main = results["product"] if "product" in results else results["dense"]
    snaps = None
    if args.snapshots:
        snaps = [s for s in main.snapshots
                 if snapshots_filter is None or snapshots_filter(s["label"])]
    depth = circuit.depth()
    report = RunReport(command, dict(inputs), layout.widths(), list(backends),
                       main.registers, len(circuit), depth, snapshots=snaps, wall_time=wall)
    return report, main


def _emit(args, report: RunReport, summary: str) -> None:
    if args.json:
        print(report.to_json())
        return
    print(summary)
    print(f"  backends: {', '.join(report.backends)}   gates: {report.gate_count}   "
          f"depth: {report.depth}   time: {report.wall_time:.3f}s")
    if report.snapshots:
        for snap in report.snapshots:
            print(f"  [{snap['label']}] {_fmt_regs(snap['registers'])}")


def _fmt_regs(regs: dict) -> str:
    out = []
    for name, val in regs.items():
        if isinstance(val, list):
            val = "(" + ", ".join(val) + ")"
        out.append(f"{name}={val}")
    return " ".join(out)


# -- subcommands ---------------------------------------------------------------


def cmd_add(args) -> int:
    n = args.n
    _check_fits("a", args.a, n)
    _check_fits("b", args.b, n)
    layout = RegisterLayout()
    a = layout.add("a", n)
    b = layout.add("b", n)
    adder = build_adder(a, b, max_k=args.max_k)
    if args.parallel:
        adder = schedule_parallel(adder)
    circuit = build_qft(a) + Circuit.label("a fourier") + adder + Circuit.label("summed") \
        + build_inv_qft(a)
    report, _ = _execute(args, "add", circuit, layout, {"a": args.a, "b": args.b})
    report.result = {"sum": report.registers["a"], "adder_gates": len(adder),
                     "adder_rounds": adder.num_rounds if adder.rounds else None}
    _emit(args, report, f"{args.a} + {args.b} mod 2^{n} = {report.registers['a']}")
    return 0


def cmd_dec(args) -> int:
    _check_fits("y", args.y, args.n)
    layout = RegisterLayout()
    y = layout.add("y", args.n)
    circuit = build_decrement(y)
    report, _ = _execute(args, "dec", circuit, layout, {"y": args.y})
    report.result = {"value": report.registers["y"]}
    _emit(args, report, f"{args.y} - 1 mod 2^{args.n} = {report.registers['y']}")
    return 0


def cmd_mul(args) -> int:
    n_y = args.n_y or args.n
    n_acc = args.n_acc or args.n + n_y
    _check_fits("x", args.x, args.n)
    _check_fits("y", args.y, n_y)
    layout, mul = multiplier_registers(args.n, n_y, n_acc)
    circuit = build_multiplier(mul)
    report, _ = _execute(args, "mul", circuit, layout, {"x": args.x, "y": args.y})
    report.result = {"product": report.registers["acc"], "blocks": mul.blocks}
    _emit(args, report, f"{args.x} * {args.y} = {report.registers['acc']}")
    return 0


def cmd_pow(args) -> int:
    max_x = args.max_x if args.max_x is not None else args.x
    if args.x > max_x:
        raise Usage("--x exceeds --max-x")
    if args.k < 2:
        raise Usage("--k must be at least 2")
    layout = RegisterLayout()
    x = layout.add("x", bit_length(max_x))
    circuit, chain = build_power_chain(x, args.k, layout=layout, max_x=max_x)
    powers: dict[int, int] = {}

    report, main = _execute(args, "pow", circuit, layout, {"x": args.x},
                            read=["x", "p1", "p3"])
    # replay on the product backend to collect every intermediate power
    res = simulate(circuit, layout, {"x": args.x}, "product", snapshots=True,
                   snapshot_filter=lambda lbl: lbl.endswith("/done") and lbl.startswith("pow")
                   and lbl.count("/") == 1)
    for snap in res.snapshots:
        k = int(snap["label"][3:].split("/")[0])
        powers[k] = snap["registers"][chain.register_for(k).name]
    report.result = {"powers": powers,
                     "final_register": chain.register_for(args.k).name}
    lines = ", ".join(f"x^{k}={v}" for k, v in sorted(powers.items()))
    _emit(args, report, f"x={args.x}: {lines}")
    return 0


def cmd_weight(args) -> int:
    w = WeightPhase.truncated(args.k, args.t)
    if w.is_unit:
        raise Usage("weights for k=0 and k=1 are exactly one; nothing to load")
    layout = RegisterLayout()
    phi = layout.add("phi", args.t)
    eigen = layout.add("eigen", 1)
    loader = build_weight_loader(args.k, args.t, phi, eigen[0])
    circuit = loader + Circuit.label("loaded")
    if not args.no_erase:
        circuit = circuit + build_weight_eraser(args.k, args.t, phi, eigen[0])
    report, main = _execute(args, "weight", circuit, layout, {"eigen": 1})
    # the loaded value is read from the product backend at the "loaded" mark
    res = simulate(circuit, layout, {"eigen": 1}, "product", snapshots=True,
                   snapshot_filter=lambda lbl: lbl == "loaded")
    loaded = res.snapshots[-1]["registers"]["phi"]
    exact = 1 / math.factorial(args.k)
    approx = loaded / (1 << args.t)
    report.result = {"numerator": loaded, "t": args.t, "value": approx,
                     "relative_error": abs(approx - exact) / exact,
                     "erased": None if args.no_erase else report.registers["phi"] == 0}
    _emit(args, report,
          f"1/{args.k}! ~ {loaded}/2^{args.t} = {approx:.7f} "
          f"(rel. error {report.result['relative_error']:.3e})")
    return 0


def _series_spec(args) -> SeriesSpec:
    if args.config:
        return SeriesSpec.load(args.config)
    if args.order is None or args.t is None:
        raise Usage("eval needs --order and --t (or --config)")
    return SeriesSpec.exponential(args.order, args.t)


def _format_fixed(mantissa: int, exponent: int) -> str:
    value = mantissa * 2.0 ** exponent
    shown = f"{int(value)}" if value == int(value) else f"{value:.10g}"
    return f"{mantissa} × 2^{exponent} = {shown}"


def cmd_eval(args) -> int:
    spec = _series_spec(args)
    max_x = args.max_x if args.max_x is not None else args.x
    if args.x < 0 or args.x > max_x:
        raise Usage("--x must lie in [0, --max-x]")
    plan = build_series(spec, max_x)
    report, _ = _execute(args, "eval", plan.circuit, plan.layout, plan.initial(args.x),
                         read=["acc"],
                         snapshots_filter=lambda lbl: lbl.endswith("/done"))
    mant = report.registers["acc"]
    report.inputs = {"x": args.x, "max_x": max_x, **spec.to_config()}
    report.result = {"mantissa": mant, "exponent": plan.exponent,
                     "value": mant * 2.0 ** plan.exponent,
                     "reference": math.exp(args.x)}
    _emit(args, report, _format_fixed(mant, plan.exponent))
    return 0


_E2_LABELS = {
    "term1/done": "x^0 and x^1 terms accumulated (mantissa 6 = 3 x 2)",
    "pow2/acc fourier": "power module: accumulator after QFT",
    "pow2/block 1/summed": "power module: multiplicand added once",
    "pow2/block 1/y decremented": "power module: multiplier decremented in Fourier form",
    "pow2/block 1/done": "power module: multiplier reads 1",
    "pow2/block 2/summed": "power module: multiplicand added twice",
    "pow2/block 2/y decremented": "power module: multiplier decremented again",
    "pow2/block 2/done": "power module: multiplier reads 0",
    "pow2/done": "power module: x^2 computed",
    "term2/loaded": "phase estimation loaded the 1/2 weight",
    "term2/acc fourier": "weighting: accumulator after QFT",
    "term2/block 1/summed": "weighting: first sum",
    "term2/block 1/done": "weighting: multiplier decremented",
    "term2/block 2/summed": "weighting: second sum",
    "term2/block 2/done": "weighting: multiplier decremented",
    "term2/block 3/summed": "weighting: third sum",
    "term2/block 3/done": "weighting: multiplier decremented",
    "term2/block 4/summed": "weighting: fourth sum",
    "term2/block 4/done": "weighting: multiplier reaches zero",
    "term2/multiplied": "weighting: accumulator back in the computational basis",
    "term2/done": "weight register erased",
}

_E2_REGS = ("x", "p1", "p3", "w1", "phi", "eigen", "acc")


def cmd_trace_e2(args) -> int:
    """Replay exp(2) at order 2 (t=1) step by step, then report order 4 (t=15)."""
    spec = SeriesSpec.exponential(2, 1)
    plan = build_series(spec, 2)
    args.snapshots = True
    report, main = _execute(args, "trace-e2", plan.circuit, plan.layout, plan.initial(2),
                            read=["acc"], snapshots_filter=lambda lbl: lbl in _E2_LABELS)
    steps = []
    for snap in report.snapshots:
        regs = {k: v for k, v in snap["registers"].items() if k in _E2_REGS}
        steps.append({"label": snap["label"], "description": _E2_LABELS[snap["label"]],
                      "registers": regs})
    report.snapshots = steps
    mant = report.registers["acc"]

    spec4 = SeriesSpec.exponential(4, 15)
    plan4 = build_series(spec4, 2)
    r4 = simulate_backends(plan4.circuit, plan4.layout, plan4.initial(2), ("product",),
                           read=["acc"])["product"]
    m4 = r4.registers["acc"]
    report.result = {
        "order2": {"mantissa": mant, "exponent": plan.exponent,
                   "value": mant * 2.0 ** plan.exponent},
        "order4": {"mantissa": m4, "exponent": plan4.exponent,
                   "value": m4 * 2.0 ** plan4.exponent},
        "exp2": math.exp(2),
    }
    if args.json:
        print(report.to_json())
        return 0
    print("exp(2), order 2, weight precision t=1")
    for step in steps:
        print(f"  {step['description']:<58} {_fmt_regs(step['registers'])}")
    print(f"  result: {_format_fixed(mant, plan.exponent)}")
    print(f"exp(2), order 4, t=15: {_format_fixed(m4, plan4.exponent)} "
          f"(~{m4 * 2.0 ** plan4.exponent:.4f}; exp(2) = {math.exp(2):.4f})")
    return 0


# -- parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--backend", choices=("dense", "product", "both"), default=None,
                        help="simulation backend (default: both up to 14 qubits, else product)")
    common.add_argument("--json", action="store_true", help="emit a JSON run report")
    common.add_argument("--snapshots", action="store_true",
                        help="include register states at every checkpoint")
    common.add_argument("--trace", metavar="PATH", help="write the gate trace as JSON")

    parser = argparse.ArgumentParser(prog="qarith", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("add", parents=[common], help="Fourier adder a + b mod 2^n")
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--b", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--max-k", type=int, default=None, help="drop rotations finer than R_k")
    p.add_argument("--parallel", action="store_true", help="group the adder into rounds")
    p.set_defaults(func=cmd_add)

    p = sub.add_parser("dec", parents=[common], help="decrement y mod 2^n")
    p.add_argument("--y", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_dec)

    p = sub.add_parser("mul", parents=[common], help="repeated-addition multiplier")
    p.add_argument("--x", type=int, required=True)
    p.add_argument("--y", type=int, required=True)
    p.add_argument("--n", type=int, required=True, help="width of x (and y by default)")
    p.add_argument("--n-y", type=int, default=None)
    p.add_argument("--n-acc", type=int, default=None)
    p.set_defaults(func=cmd_mul)

    p = sub.add_parser("pow", parents=[common], help="snake power chain x^2..x^k")
    p.add_argument("--x", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--max-x", type=int, default=None)
    p.set_defaults(func=cmd_pow)

    p = sub.add_parser("weight", parents=[common], help="load (and erase) a 1/k! weight")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--no-erase", action="store_true")
    p.set_defaults(func=cmd_weight)

    p = sub.add_parser("eval", parents=[common], help="evaluate the truncated series")
    p.add_argument("--x", type=int, required=True)
    p.add_argument("--order", type=int, default=None)
    p.add_argument("--t", type=int, default=None)
    p.add_argument("--max-x", type=int, default=None)
    p.add_argument("--config", metavar="PATH", help="JSON series description (order, t, weights)")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("trace-e2", parents=[common], help="step-by-step exp(2) worked example")
    p.set_defaults(func=cmd_trace_e2)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Usage as exc:
        parser.error(str(exc))
    except (NotDeterministic, WouldEntangle, SimulationError, CircuitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
