"""Tests for the `pinsker` command line interface."""

import json

import pytest
from click.testing import CliRunner

from pinskerbounds.cli import cli, main
from pinskerbounds.closed_forms import corollary_bound


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def constraints_file(tmp_path):
    def write(points):
        path = tmp_path / "constraints.json"
        path.write_text(json.dumps({"constraints": [{"pi": p, "v": v} for p, v in points]}))
        return str(path)

    return write


def test_bound_closed(runner):
    result = runner.invoke(cli, ["bound", "--divergence", "kl", "--v", "1.0"])

    assert result.exit_code == 0, result.output
    document = json.loads(result.output)
    assert document["divergence"] == "kl"
    assert document["method"] == "closed"
    assert document["argmin"] == []
    assert document["bound"] == pytest.approx(corollary_bound("kl", 1.0))


def test_bound_solver(runner):
    result = runner.invoke(
        cli, ["bound", "--divergence", "hellinger", "--v", "1.6", "--method", "solver"]
    )

    assert result.exit_code == 0, result.output
    document = json.loads(result.output)
    assert document["bound"] == pytest.approx(0.8, rel=1e-6)
    assert len(document["argmin"]) == 1


def test_bound_at_two(runner):
    finite = runner.invoke(cli, ["bound", "--divergence", "hellinger", "--v", "2"])
    infinite = runner.invoke(cli, ["bound", "--divergence", "agm_t", "--v", "2"])
    missing = runner.invoke(cli, ["bound", "--divergence", "kl", "--v", "2"])

    assert json.loads(finite.output)["bound"] == 2.0
    assert json.loads(infinite.output)["bound"] == "inf"
    assert missing.exit_code == 1


def test_bound_from_constraints(runner, constraints_file):
    path = constraints_file([(0.25, 0.15), (0.75, 0.15)])
    result = runner.invoke(cli, ["bound", "--divergence", "kl", "--constraints", path])

    assert result.exit_code == 0, result.output
    document = json.loads(result.output)
    assert document["method"] == "solver"
    assert len(document["argmin"]) == 2


def test_bound_infeasible_constraints(runner, constraints_file):
    path = constraints_file([(0.25, 0.2), (0.75, 0.05)])
    result = runner.invoke(cli, ["bound", "--divergence", "kl", "--constraints", path])

    assert result.exit_code == 2
    assert json.loads(result.output)["type"] == "InfeasibleConstraintsError"


def test_bound_rejects_unordered_constraints(runner, constraints_file):
    path = constraints_file([(0.75, 0.15), (0.25, 0.15)])
    result = runner.invoke(cli, ["bound", "--divergence", "kl", "--constraints", path])

    assert result.exit_code == 1
    assert "strictly increasing" in json.loads(result.output)["error"]


def test_bound_prints_seventeen_digits(runner):
    result = runner.invoke(cli, ["bound", "--divergence", "variational", "--v", "0.1"])

    assert result.exit_code == 0, result.output
    assert '"bound": 0.10000000000000001' in result.output
    assert json.loads(result.output)["bound"] == 0.1


def test_bound_zero_constraint_file(runner, constraints_file):
    path = constraints_file([(0.14632943493919665, 0.0), (0.5287294094822218, 0.14801748231469913)])
    result = runner.invoke(cli, ["bound", "--divergence", "hellinger", "--constraints", path])

    assert result.exit_code == 0, result.output
    assert json.loads(result.output)["bound"] >= 0.0


@pytest.mark.parametrize(
    "args",
    [
        ["bound", "--divergence", "kl"],
        ["bound", "--divergence", "kl", "--v", "1", "--constraints", "x.json"],
        ["bound", "--divergence", "renyi", "--v", "1"],
        ["bound", "--divergence", "kl", "--v", "-0.5"],
        ["bound", "--divergence", "kl", "--constraints", "does-not-exist.json"],
    ],
)
def test_bound_malformed(runner, args):
    assert runner.invoke(cli, args).exit_code == 1


def test_bound_closed_needs_symmetric_constraint(runner, constraints_file):
    path = constraints_file([(0.3, 0.1)])
    result = runner.invoke(
        cli, ["bound", "--divergence", "kl", "--constraints", path, "--method", "closed"]
    )

    assert result.exit_code == 1


def test_curve_csv(runner):
    result = runner.invoke(
        cli,
        [
            "curve",
            "--divergence", "kl",
            "--method", "explicit,fedotov,classical",
            "--v-min", "0",
            "--v-max", "1.5",
            "--steps", "4",
        ],
    )

    assert result.exit_code == 0, result.output
    lines = result.output.strip().splitlines()
    assert lines[0] == "v,explicit,fedotov,classical"
    assert len(lines) == 5
    assert lines[1] == "0,0,0,0"

    last = [float(x) for x in lines[-1].split(",")]
    assert last[0] == 1.5
    assert last[1] == pytest.approx(last[2], rel=1e-6)
    assert last[3] == pytest.approx(1.125)


def test_curve_json(runner):
    result = runner.invoke(
        cli,
        ["curve", "--divergence", "chi2", "--method", "explicit,arnold", "--steps", "3", "--format", "json"],
    )

    assert result.exit_code == 0, result.output
    document = json.loads(result.output)
    assert document["divergence"] == "chi2"
    assert document["v"] == pytest.approx([0.0, 0.95, 1.9])
    assert document["explicit"][1] == pytest.approx(0.9025)


@pytest.mark.parametrize(
    "args",
    [
        ["--method", "fedotov", "--divergence", "hellinger"],
        ["--method", "arnold", "--divergence", "kl"],
        ["--method", "symmetric", "--divergence", "kl"],
        ["--method", "nonsense", "--divergence", "kl"],
        ["--method", "explicit,explicit", "--divergence", "kl"],
        ["--method", "explicit", "--divergence", "kl", "--v-max", "2"],
        ["--method", "explicit", "--divergence", "kl", "--steps", "0"],
        ["--method", "explicit", "--divergence", "kl", "--v-min", "1.5", "--v-max", "1"],
    ],
)
def test_curve_malformed(runner, args):
    assert runner.invoke(cli, ["curve", *args]).exit_code == 1


def test_verify_duality(runner):
    result = runner.invoke(cli, ["verify", "--suite", "duality", "--trials", "5"])

    assert result.exit_code == 0, result.output
    assert result.output.strip().endswith("0 failed")


def test_divergence_command(runner):
    result = runner.invoke(
        cli, ["divergence", "--divergence", "hellinger", "--p", "[0.9, 0.1]", "--q", "[0.1, 0.9]"]
    )

    assert result.exit_code == 0, result.output
    document = json.loads(result.output)
    assert document["value"] == pytest.approx(0.8)
    assert document["variational"] == pytest.approx(1.6)
    assert document["slack"] == pytest.approx(0.0, abs=1e-12)


def test_divergence_command_malformed(runner):
    bad_json = runner.invoke(cli, ["divergence", "--divergence", "kl", "--p", "[0.5,", "--q", "[1]"])
    bad_size = runner.invoke(cli, ["divergence", "--divergence", "kl", "--p", "[1]", "--q", "[0.5, 0.5]"])

    assert bad_json.exit_code == 1
    assert bad_size.exit_code == 1


def test_main_exit_codes(capsys):
    with pytest.raises(SystemExit) as info:
        main(["bound", "--divergence", "kl", "--v", "1"])

    assert info.value.code == 0
    assert json.loads(capsys.readouterr().out)["method"] == "closed"

    with pytest.raises(SystemExit) as info:
        main(["bound", "--divergence", "kl", "--unknown-option"])

    assert info.value.code == 1

    with pytest.raises(SystemExit) as info:
        main(["verify", "--suite", "nonexistent"])

    assert info.value.code == 1
