from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any

import pytest

from hbm.cli.runner import run
from tasks.sweeps import evaluate_pair, sweep_corpus


def _json(capsys: pytest.CaptureFixture[str], *argv: str) -> dict[str, Any]:
    assert run([*argv, "--json", "--no-meta"]) == 0
    return json.loads(capsys.readouterr().out)


def test_steklov(capsys: pytest.CaptureFixture[str]) -> None:
    document = _json(capsys, "steklov", "--n", "3", "--k", "2")

    assert document["schema"] == 1
    assert document["command"] == "steklov"
    assert "meta" not in document
    assert document["result"]["eigenvalue"] == pytest.approx(2.5)
    assert document["result"]["bh_ball"] == pytest.approx(0.4)
    assert document["config"]["n"] == 3


def test_spectrum_of_the_disk(capsys: pytest.CaptureFixture[str]) -> None:
    argv = ["spectrum", "--body", "ball", "--grid", "s1:N=256", "--k", "5", "--even"]
    document = _json(capsys, *argv)
    result = document["result"]

    assert result["lambda_1e"] == pytest.approx(4.0, abs=1e-6)
    assert result["p_star"] == pytest.approx(-2.0, abs=1e-6)
    assert document["config"]["grid"] == "s1:N=256"


def test_spectrum_k_counts_multiplicity(capsys: pytest.CaptureFixture[str]) -> None:
    argv = ["spectrum", "--body", "ball", "--dim", "2", "--grid", "s1:N=512", "--even"]

    three = _json(capsys, *argv, "--k", "3")["result"]
    five = _json(capsys, *argv, "--k", "5")["result"]

    # even disk spectrum is 0, 4, 4, 16, 16: k=3 stops inside the doubled 4
    assert three["eigenvalues"] == pytest.approx([0.0, 4.0, 4.0], abs=1e-6)
    assert three["distinct"] == pytest.approx([0.0, 4.0], abs=1e-6)
    assert five["distinct"] == pytest.approx([0.0, 4.0, 16.0], abs=1e-5)


def test_mixed_volume_table(capsys: pytest.CaptureFixture[str]) -> None:
    argv = ["mixed", "--bodies", "ball;ellipsoid:a=2,b=1", "--grid", "s1:N=256"]
    document = _json(capsys, *argv)
    table = document["result"]["table"]

    assert table[0][0] == pytest.approx(math.pi, rel=1e-6)
    assert table[1][1] == pytest.approx(2 * math.pi, rel=1e-6)
    assert table[0][1] == pytest.approx(9.688448220547675 / 2, rel=1e-6)
    assert table[0][1] == pytest.approx(table[1][0], rel=1e-6)


def test_reilly(capsys: pytest.CaptureFixture[str]) -> None:
    document = _json(capsys, "reilly", "--domain", "square", "--u", "x^3*y + y^2")

    result = document["result"]
    assert result["residual"] <= 1e-10 * max(1.0, abs(result["lhs"]))


def test_boundary_closed_form(capsys: pytest.CaptureFixture[str]) -> None:
    document = _json(capsys, "boundary", "--quantity", "steklov", "--n", "2", "--k", "2")

    assert document["result"]["eigenvalue"] == pytest.approx(2 * 2 - 1 - 1)


def test_bh_upper_bound_with_its_perturbation_quotient(
    capsys: pytest.CaptureFixture[str],
) -> None:
    bound = ["boundary", "--quantity", "bh-upper", "--c-poin", "0.5", "--r", "1"]
    bound += ["--max-hess", "3"]

    plain = _json(capsys, *bound)["result"]
    paired = _json(capsys, *bound, "--w-range", "0.25")["result"]

    assert plain["value"] == pytest.approx(1.25)
    assert "Q_Kw" not in plain
    assert paired["value"] == plain["value"]
    assert paired["Q_Kw"] == pytest.approx(3 * math.exp(0.25) * 0.25)
    assert paired["Q_Kw_below_one"] is True


def test_stability_pair(capsys: pytest.CaptureFixture[str]) -> None:
    document = _json(
        capsys,
        "stability",
        "--body-k",
        "ellipsoid:a=2,b=1",
        "--body-l",
        "ball",
        "--p",
        "0",
        "--grid",
        "s1:N=256",
        "--deficits",
    )
    result = document["result"]

    assert result["p"] == 0.0
    assert result["minkowski2"] >= -1e-9
    assert result["delta"] > 0


@pytest.mark.parametrize(
    "argv",
    [
        ["steklov", "--n", "3"],
        ["spectrum", "--body", "cube"],
        ["spectrum", "--body", "ball", "--grid", "s1:N=7"],
        ["spectrum", "--body", "ball", "--grid", "s2:L=2", "--dim", "2"],
        ["boundary", "--quantity", "dk-upper"],
        ["stability", "--body-k", "ball"],
        ["stability", "--corpus", "random:count=1,size=2"],
        ["steklov", "--n", "3", "--k", "2", "--seed", "-1"],
    ],
)
def test_bad_input_exits_with_two(argv: list[str]) -> None:
    assert run(argv) == 2


def test_numerical_guard_exits_with_three() -> None:
    assert run(["spectrum", "--body", "trig:a=1,b=1,c2=0.5"]) == 3


def test_runs_without_meta_are_byte_identical(capsys: pytest.CaptureFixture[str]) -> None:
    argv = ["spectrum", "--body", "lq:q=3", "--grid", "s1:N=128", "--k", "4"]
    argv += ["--json", "--no-meta"]

    assert run(argv) == 0
    first = capsys.readouterr().out
    assert run(argv) == 0

    assert capsys.readouterr().out == first


def test_csv_output_to_a_file(tmp_path: Path) -> None:
    target = tmp_path / "steklov.csv"

    argv = ["steklov", "--n", "5", "--k", "1", "--format", "csv", "--output", str(target)]

    assert run(argv) == 0

    header, row = target.read_text(encoding="utf-8").splitlines()
    assert header.split(",")[:3] == ["n", "k", "eigenvalue"]
    assert row.split(",")[:2] == ["5", "1"]


def test_human_output(capsys: pytest.CaptureFixture[str]) -> None:
    assert run(["steklov", "--n", "3", "--k", "2"]) == 0

    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "steklov (schema 1)"
    assert "  eigenvalue: 2.5" in lines


def test_corpus_sweep_runs_eagerly() -> None:
    rows = sweep_corpus(7, 2, 0.0, grid="s1:N=128")

    assert [row["pair"] for row in rows] == [0, 1]
    assert all(row["minkowski2"] >= -1e-9 for row in rows)
    assert sweep_corpus(7, 0) == []


def test_single_pair_task() -> None:
    row = evaluate_pair.delay("ball", "ball", "s1:N=64", 0.0).get()

    assert row["Var"] == pytest.approx(0.0, abs=1e-12)
    assert row["minkowski2"] == pytest.approx(0.0, abs=1e-9)


def test_stability_corpus_uses_the_seed_flag(capsys: pytest.CaptureFixture[str]) -> None:
    argv = ["stability", "--corpus", "random:count=2", "--seed", "7"]
    argv += ["--grid", "s1:N=128"]
    document = _json(capsys, *argv)
    expected = sweep_corpus(7, 2, None, grid="s1:N=128")

    assert len(document["result"]["rows"]) == 2
    rows = document["result"]["rows"]
    assert [row["K"] for row in rows] == [row["K"] for row in expected]


def test_ball_in_space(capsys: pytest.CaptureFixture[str]) -> None:
    argv = ["spectrum", "--body", "ball", "--dim", "3", "--grid", "s2:L=4", "--k", "4"]
    document = _json(capsys, *argv, "--even")

    assert document["result"]["lambda_1e"] == pytest.approx(3.0, abs=5e-2)
