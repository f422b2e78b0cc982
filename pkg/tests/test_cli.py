import io
import json

import pytest

from riskcap.cli import main, sweep_grid


def run(argv):
    out = io.StringIO()
    code = main(argv, out=out)
    return code, out.getvalue()


def toy_args(golden, name="toy.csv"):
    return ["--scenarios", str(golden / name)]


def test_price_json(golden):
    code, text = run(["price", *toy_args(golden), "--family", "tvar", "--alpha", "0.5", "--price", "0.9"])
    assert code == 0
    rep = json.loads(text)[0]
    assert abs(rep["rho"] - 1.35) <= 1e-9 and rep["status"] == "finite" and rep["reason"] is None


def test_price_infinite_is_not_an_error(golden):
    code, text = run(["price", *toy_args(golden, "toy_stuck.csv"), "--acceptance", '{"type": "var", "alpha": 0.2}',
                      "--price", "0.9"])
    assert code == 0
    rep = json.loads(text)[0]
    assert rep["rho"] == "+inf" and rep["reason"] == "VarStuckMass"


def test_price_with_pi_and_table(golden):
    pi = '{"segments": [{"upto": 1, "slope": 0.9}, {"upto": "inf", "slope": 1.8}]}'
    code, text = run(["price", *toy_args(golden), "--family", "tvar", "--alpha", "0.5", "--price", "0.9",
                      "--pi", pi])
    assert code == 0 and abs(json.loads(text)[0]["rho_pi"] - 1.8) < 1e-8
    code, text = run(["price", *toy_args(golden), "--family", "var", "--alpha", "0.3", "--price", "0.9",
                      "--format", "table"])
    assert code == 0 and text.splitlines()[0].split()[:2] == ["position", "rho"]


def test_acceptance_from_file(golden, tmp_path):
    path = tmp_path / "acc.json"
    path.write_text('{"type": "scenario", "event": [0, 1]}')
    code, text = run(["price", *toy_args(golden), "--acceptance", str(path), "--price", "0.9"])
    assert code == 0 and json.loads(text)[0]["rho"] == pytest.approx(1.8)


@pytest.mark.parametrize("argv", [
    ["price", "--scenarios", "missing.csv", "--family", "var", "--alpha", "0.3", "--price", "1"],
    ["price", "--scenarios", "{golden}/toy.csv", "--acceptance", '{"type": "var"', "--price", "1"],
    ["price", "--scenarios", "{golden}/toy.csv", "--family", "var", "--price", "1"],
    ["price", "--scenarios", "{golden}/toy.csv", "--family", "var", "--alpha", "0.3"],
    ["price", "--scenarios", "{golden}/toy.csv", "--family", "tvar", "--alpha", "0.5", "--price", "1",
     "--pi", '{"segments": [{"upto": "inf", "slope": 0.5}]}'],
    ["sweep", "--scenarios", "{golden}/toy.csv", "--family", "var", "--price", "0.9",
     "--param", "alpha", "--from", "0.1", "--to", "0.9", "--steps", "1"],
    ["sweep", "--scenarios", "{golden}/toy.csv", "--family", "scenario", "--event", "0", "--price", "0.9",
     "--param", "alpha", "--from", "0.1", "--to", "0.9", "--steps", "3"],
    ["check", "--suite", "numeraire", "--scenarios", "{golden}/toy.csv", "--family", "var", "--alpha", "0.3",
     "--price", "0.9"],
])
def test_input_errors_exit_2(golden, argv, capsys):
    argv = [a.replace("{golden}", str(golden)) for a in argv]
    code, _ = run(argv)
    assert code == 2
    assert "error" in capsys.readouterr().err


def test_dual_too_large(tmp_path):
    n = 20
    rows = ["prob,x,s"] + [f"{1 / n!r},1,1" for _ in range(n)]
    path = tmp_path / "big.csv"
    path.write_text("\n".join(rows) + "\n")
    code, _ = run(["check", "--suite", "dual", "--scenarios", str(path), "--family", "tvar", "--alpha", "0.5",
                   "--price", "1"])
    assert code == 2


def test_check_cash_sub_no_is_success(golden):
    code, text = run(["check", "--suite", "cash-sub", *toy_args(golden, "toy_recovery.csv"),
                      "--family", "tvar", "--alpha", "0.5", "--price", "0.8"])
    assert code == 0 and json.loads(text)["verdict"] == "No"


def test_check_dual_and_quasiconvex(golden):
    code, text = run(["check", "--suite", "dual", *toy_args(golden), "--family", "tvar", "--alpha", "0.5",
                      "--price", "0.9"])
    assert code == 0 and json.loads(text)["passed"]
    code, text = run(["check", "--suite", "quasiconvex", *toy_args(golden), "--family", "var", "--alpha", "0.25",
                      "--price", "0.9"])
    rep = json.loads(text)
    assert code == 0 and not rep["claimed"] and rep["witness"] is not None


def test_check_numeraire(golden, tmp_path):
    path = tmp_path / "dagger.csv"
    path.write_text("prob,x,s\n0.25,-2,2\n0.25,-1,1\n0.25,1,1\n0.25,3,0.5\n")
    code, text = run(["check", "--suite", "numeraire", "--scenarios", str(path), "--family", "var",
                      "--alpha", "0.3", "--price", "1"])
    assert code == 0 and json.loads(text)["passed"]


def test_check_axioms(golden):
    code, text = run(["check", "--suite", "axioms", *toy_args(golden), "--family", "tvar", "--alpha", "0.5",
                      "--price", "0.9"])
    assert code == 0 and json.loads(text)["passed"]


def test_inline_shortfall(golden):
    code, text = run(["price", *toy_args(golden), "--family", "shortfall", "--utility", "exp", "--alpha", "0.5",
                      "--price", "0.9"])
    assert code == 0 and json.loads(text)[0]["status"] == "finite"


def test_sweep_is_deterministic(golden):
    argv = ["sweep", *toy_args(golden), "--family", "var", "--price", "0.9", "--param", "alpha",
            "--from", "0.1", "--to", "0.9", "--steps", "9"]
    assert run(argv) == run(argv)


def test_sweep_grid_rounding():
    assert sweep_grid(0.7, 0.8, 11)[5] == 0.75


def test_round_trip_of_reports(golden):
    from riskcap import TVaR, load_scenarios, rho
    from riskcap.scenario import EligibleAsset

    _, text = run(["price", *toy_args(golden), "--family", "tvar", "--alpha", "0.5", "--price", "0.9"])
    rep = json.loads(text)[0]
    data = load_scenarios(golden / "toy.csv")
    again = rho(TVaR(0.5), data.space, data.positions[0].x, EligibleAsset(0.9, data.payoff))
    assert again.tag.value == rep["status"] and abs(again.value.value - rep["rho"]) <= 1e-9
