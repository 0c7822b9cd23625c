import json

import pytest

from cli_runs import OUTPUTS, run_all, write_inputs
from ifsx.cli import EXIT_FAIL, EXIT_INPUT, EXIT_OK, main


@pytest.fixture(scope="module")
def two_runs(tmp_path_factory):
    a, b = tmp_path_factory.mktemp("run1"), tmp_path_factory.mktemp("run2")
    return (a, run_all(a)), (b, run_all(b))


def test_all_commands_succeed(two_runs):
    (_, codes), _ = two_runs
    assert codes == dict.fromkeys(codes, EXIT_OK) and len(codes) == 6


@pytest.mark.parametrize("name", OUTPUTS)
def test_outputs_are_byte_identical(two_runs, name):
    (a, _), (b, _) = two_runs
    assert (a / name).read_bytes() == (b / name).read_bytes()


def test_output_contents(two_runs):
    (d, _), _ = two_runs
    assert (d / "hausdorff.txt").read_text().splitlines()[0] == "distance=0.25"
    assert (d / "study.csv").read_text().splitlines()[:2] == ["k,lipschitz_max,hausdorff", "1,0.5,0.0625"]
    report = json.loads((d / "search.json").read_text())
    assert report["seed"] == 42 and report["violated"] is False
    assert report["inversion_distance"] <= 2 * (1e-6 + 1e-4)
    wit = json.loads((d / "ladder.json").read_text())
    assert wit["kind"] == "ladder" and all(item["pass"] for item in wit["audit"])
    assert (d / "cantor.svg").read_text().startswith("<?xml")


def test_input_errors(tmp_path, capsys):
    write_inputs(tmp_path)
    p = str(tmp_path)
    (tmp_path / "empty.csv").write_text("# nothing\n")
    (tmp_path / "plane.csv").write_text("0.1,0.2\n")
    (tmp_path / "cube.csv").write_text("0.1,0.2,0.3\n")
    (tmp_path / "bad.json").write_text('{"maps": [{"type": "affine", "a": 2, "b": 0}]}')
    (tmp_path / "extra.json").write_text('{"maps": [{"type": "logistic"}], "colour": 1}')
    assert main(["hausdorff", f"{p}/empty.csv", f"{p}/a.csv"]) == EXIT_INPUT
    assert main(["hausdorff", f"{p}/plane.csv", f"{p}/a.csv"]) == EXIT_INPUT
    assert main(["render", f"{p}/cube.csv", "--out", f"{p}/x.svg"]) == EXIT_INPUT
    assert main(["attractor", "--config", f"{p}/bad.json"]) == EXIT_INPUT
    assert main(["attractor", "--config", f"{p}/extra.json"]) == EXIT_INPUT
    assert main(["attractor", "--config", f"{p}/missing.json"]) == EXIT_INPUT
    assert main(["witness", "--kind", "spiral"]) == EXIT_INPUT
    assert main(["nonsense"]) == EXIT_INPUT
    assert main(["search", f"{p}/cantor.json"]) == EXIT_INPUT
    capsys.readouterr()


def test_failure_exit_codes(tmp_path, capsys):
    write_inputs(tmp_path)
    p = str(tmp_path)
    assert main(["attractor", "--config", f"{p}/cantor.json", "--max-iter", "2", "--out", f"{p}/x.csv"]) == EXIT_FAIL
    assert main(["approx", "--config", f"{p}/weak.json", "--k-schedule", "1", "--out", f"{p}/s.csv"]) == EXIT_FAIL
    assert main(["witness", "--kind", "ladder", "--n", "12"]) == EXIT_FAIL
    capsys.readouterr()


def test_search_with_no_trials(tmp_path, capsys):
    main(["witness", "--kind", "ladder", "--n", "1", "--out", str(tmp_path / "w.json")])
    assert main(["search", str(tmp_path / "w.json"), "--trials", "0"]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["best_distance"] is None and report["violated"] is False


def test_config_and_flags(tmp_path, capsys):
    write_inputs(tmp_path)
    assert main(["attractor", "--config", str(tmp_path / "cantor.json"), "--resolution", "0.01"]) == EXIT_OK
    captured = capsys.readouterr()
    assert "resolution=0.01" in captured.out and "converged=true" in captured.err
    assert main(["witness", "--kind", "prop-p", "--depth", "3"]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["kind"] == "prop_p"
