import json

import pytest

from qarith.cli import main
from qarith.gates import Circuit


def _json(capsys, argv):
    assert main(argv + ["--json"]) == 0
    return json.loads(capsys.readouterr().out)


def test_mul_two_by_two(capsys):
    report = _json(capsys, ["mul", "--x", "2", "--y", "2", "--n", "3"])
    assert report["result"]["product"] == 4
    assert report["schema"] == 1
    assert report["registers"]["y"] == 0 and report["registers"]["control"] == 1


def test_eval_summary_line(capsys):
    assert main(["eval", "--x", "2", "--order", "2", "--t", "1"]) == 0
    assert "10 × 2^-1 = 5" in capsys.readouterr().out


def test_add_zero(capsys):
    report = _json(capsys, ["add", "--a", "0", "--b", "0", "--n", "3"])
    assert report["result"]["sum"] == 0
    assert report["backends"] == ["dense", "product"]


def test_add_parallel_depth(capsys):
    report = _json(capsys, ["add", "--a", "5", "--b", "6", "--n", "4", "--parallel"])
    assert report["result"]["sum"] == 11
    assert report["result"]["adder_rounds"] == 4


@pytest.mark.parametrize("argv", [
    ["add", "--a", "3", "--b", "7", "--n", "4"],
    ["dec", "--y", "0", "--n", "3"],
    ["mul", "--x", "7", "--y", "7", "--n", "3"],
    ["pow", "--x", "2", "--k", "3"],
    ["weight", "--k", "2", "--t", "1"],
    ["weight", "--k", "3", "--t", "4"],
])
def test_backend_both_exits_zero(argv, capsys):
    assert main(argv + ["--backend", "both"]) == 0
    capsys.readouterr()


def test_weight_report(capsys):
    report = _json(capsys, ["weight", "--k", "3", "--t", "11", "--backend", "product"])
    assert report["result"]["numerator"] == 341
    assert report["result"]["relative_error"] <= 1.1e-3
    assert report["result"]["erased"] is True


def test_pow_reports_every_power(capsys):
    report = _json(capsys, ["pow", "--x", "2", "--k", "4"])
    assert report["result"]["powers"] == {"2": 4, "3": 8, "4": 16}


def test_dec_wraps(capsys):
    assert _json(capsys, ["dec", "--y", "0", "--n", "2"])["result"]["value"] == 3


def test_eval_config(tmp_path, capsys):
    path = tmp_path / "spec.json"
    path.write_text(json.dumps({"order": 2, "t": 2, "weights": ["1", "1", "2/2^2"]}))
    report = _json(capsys, ["eval", "--x", "2", "--config", str(path)])
    assert report["result"]["value"] == 1 + 2 + 2


def test_snapshots_included(capsys):
    report = _json(capsys, ["mul", "--x", "1", "--y", "1", "--n", "2", "--snapshots"])
    labels = [s["label"] for s in report["snapshots"]]
    assert "acc fourier" in labels and "acc basis" in labels


def test_trace_file_roundtrip(tmp_path, capsys):
    path = tmp_path / "trace.json"
    assert main(["add", "--a", "1", "--b", "2", "--n", "3", "--parallel",
                 "--trace", str(path)]) == 0
    capsys.readouterr()
    data = json.loads(path.read_text())
    assert data["schema"] == 1 and data["command"] == "add"
    circuit = Circuit.from_json(data)
    assert circuit.count("R") == 6 + 3


@pytest.mark.parametrize("argv", [
    ["add", "--a", "8", "--b", "0", "--n", "3"],
    ["mul", "--x", "1"],
    ["frobnicate"],
    ["eval", "--x", "2"],
    ["weight", "--k", "1", "--t", "3"],
])
def test_usage_errors_exit_2(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2
    capsys.readouterr()


def test_simulation_error_exits_1(capsys):
    # a 30-qubit multiplier cannot run on the dense backend
    assert main(["mul", "--x", "1", "--y", "1", "--n", "8", "--backend", "dense"]) == 1
    assert "error" in capsys.readouterr().err


def test_trace_e2(capsys):
    report = _json(capsys, ["trace-e2"])
    assert report["result"]["order2"] == {"mantissa": 10, "exponent": -1, "value": 5.0}
    assert report["result"]["order4"]["mantissa"] == 229368
    descriptions = [s["description"] for s in report["snapshots"]]
    assert len(descriptions) == 21
    assert report["snapshots"][-1]["registers"]["acc"] == 10


def test_trace_e2_text(capsys):
    assert main(["trace-e2"]) == 0
    out = capsys.readouterr().out
    assert "result: 10 × 2^-1 = 5" in out
