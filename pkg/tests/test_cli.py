import json
import math

import pytest

import tauber_games as tg
from tauber_games.cli import load_experiment, run


def write_config(tmp_path, **overrides):
    doc = {
        "game": "swap2",
        "tail_eps": 1e-9,
        "tol": 0.02,
        "out": "swap2.csv",
        "families": [
            {"kind": "cesaro_discrete", "grid": {"dyadic": [1, 8]}},
            {"kind": "abel", "grid": [0.5, 0.0625, 0.00390625]},
            {"kind": "power_shift", "grid": [1, 16, 256], "base": "power:1,1,2",
             "tail_eps": 0.01},
            {"kind": "scaled", "grid": [0.25, 0.015625], "base": "exp:1",
             "approximate": 16, "label": "pc16"},
        ],
    }
    doc.update(overrides)
    path = tmp_path / "experiment.json"
    path.write_text(json.dumps(doc))
    return path


def table_rows(text):
    return [line.split() for line in text.strip().splitlines()[2:]]


def test_value_swap2(capsys):
    assert run(["value", "--game", "swap2", "--density", "exp:0.6931471805599453"]) == 0
    rows = table_rows(capsys.readouterr().out)
    lo, hi = float(rows[0][1]), float(rows[0][2])
    assert lo <= 2.0 / 3.0 <= hi
    assert hi - lo <= 1e-9


def test_value_exact_for_compact_support(capsys):
    assert run(["value", "--game", "swap2", "--density", "uniform:4", "--tail-eps", "0"]) == 0
    rows = table_rows(capsys.readouterr().out)
    assert [float(r[1]) for r in rows] == pytest.approx([0.5, 0.5], abs=1e-15)


def test_bad_density_exits_two(capsys):
    assert run(["value", "--game", "swap2", "--density", "exp:0"]) == 2
    assert "exp:0" in capsys.readouterr().err


def test_value_needs_a_game(capsys):
    assert run(["value", "--density", "exp:1"]) == 2


def test_unknown_verb_and_game(capsys):
    assert run(["frobnicate"]) == 2
    assert run(["validate", "--game", "no_such_game"]) == 2


def test_validate(tmp_path, capsys):
    assert run(["validate", "--game", "matching_game"]) == 0
    doc = json.loads(tg.serialize(tg.builtin("swap2")))
    doc["kernel"][0][0][0] = [0.9, 0.0]
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    assert run(["validate", "--game", str(path)]) == 1
    assert "sums to" in capsys.readouterr().err


def test_demo_round_trips(tmp_path, capsys):
    assert run(["demo", "ergodic3"]) == 0
    assert tg.deserialize(capsys.readouterr().out) == tg.builtin("ergodic3")
    out = tmp_path / "random.json"
    assert run(["demo", "random", "--seed", "5", "--states", "4", "--out", str(out)]) == 0
    assert tg.deserialize(out.read_text()) == tg.random_game(5, 4, 2, 2)
    assert run(["demo", "nope"]) == 2


def test_audit(tmp_path, capsys):
    out = tmp_path / "audit.json"
    status = run(["audit", "--density", "uniform:1", "--epsilon", "0.09", "--M", "1.5",
                  "--r0", "0.25", "--n", "10", "--out", str(out)])
    assert status == 0
    report = json.loads(out.read_text())
    assert report["step_one_holds"]
    assert report["regularized_l1"] <= report["regularized_l1_bound"] + 1e-9
    assert report["pc_l1"] <= report["pc_l1_bound"]
    assert "incorrect_count" in capsys.readouterr().out


def test_audit_rejects_large_epsilon(capsys):
    status = run(["audit", "--density", "exp:1", "--epsilon", "0.5", "--M", "2",
                  "--r0", "0.25"])
    assert status == 2


def test_load_experiment(tmp_path):
    exp = load_experiment(str(write_config(tmp_path)))
    assert exp.game == tg.builtin("swap2")
    assert [f.label for f in exp.families] == ["cesaro_discrete", "abel", "power_shift",
                                                "pc16"]
    assert exp.families[0].grid == tuple(float(2 ** k) for k in range(1, 9))
    assert exp.families[3].base.kind == "pc"
    assert exp.out == str(tmp_path / "swap2.csv")


def test_sweep_writes_tables(tmp_path, capsys):
    path = write_config(tmp_path)
    assert run(["sweep", "--config", str(path)]) == 0
    lines = (tmp_path / "swap2.csv").read_text().splitlines()
    assert lines[0] == "family,grid_point,state,lo,hi,deviation"
    assert len(lines) == 1 + 2 * (8 + 3 + 3 + 2)
    for line in lines[1:]:
        _, _, _, lo, hi, _ = line.split(",")
        assert float(lo) <= float(hi)
    summary = json.loads((tmp_path / "swap2.json").read_text())
    assert set(summary["families"]) == {"cesaro_discrete", "abel", "power_shift", "pc16"}
    assert "np." not in (tmp_path / "swap2.json").read_text()
    dat = (tmp_path / "swap2.abel.dat").read_text().splitlines()
    assert dat[0].startswith("# abel")
    assert len(dat) == 4
    assert "u_star" in capsys.readouterr().out


def test_sweep_does_not_depend_on_workers(tmp_path):
    path = write_config(tmp_path)
    assert run(["sweep", "--config", str(path), "--out", str(tmp_path / "serial.csv")]) == 0
    assert run(["sweep", "--config", str(path), "--out", str(tmp_path / "pool.csv"),
                "--jobs", "2"]) == 0
    assert (tmp_path / "serial.csv").read_bytes() == (tmp_path / "pool.csv").read_bytes()


def test_equivalence_verdicts(tmp_path, capsys):
    path = write_config(tmp_path)
    assert run(["equivalence", "--config", str(path)]) == 0
    out = capsys.readouterr().out
    assert "PASS" in out and "FAIL" not in out
    summary = json.loads((tmp_path / "swap2.json").read_text())
    assert all(math.isclose(u, 0.5, abs_tol=0.01) for u in summary["u_star"])
    assert not list(tmp_path.glob("*.dat"))


def test_equivalence_fails_on_a_short_horizon(tmp_path, capsys):
    families = [{"kind": "cesaro_discrete", "grid": [1024]},
                {"kind": "cesaro_discrete", "grid": [1], "label": "n1"}]
    path = write_config(tmp_path, families=families)
    assert run(["equivalence", "--config", str(path)]) == 1
    assert "FAIL" in capsys.readouterr().out


@pytest.mark.parametrize("overrides", [
    {"tol": None},
    {"families": []},
    {"families": [{"kind": "abel"}]},
    {"families": [{"kind": "abel", "grid": {"dyadic": [1]}}]},
    {"families": [{"kind": "power_shift", "grid": [1, 2], "base": "power:1,1,2"}]},
    {"game": "no_such_game"},
])
def test_bad_experiments_exit_two(tmp_path, overrides, capsys):
    path = write_config(tmp_path, **overrides)
    if overrides.get("tol", 0) is None:
        doc = json.loads(path.read_text())
        del doc["tol"]
        path.write_text(json.dumps(doc))
    assert run(["equivalence", "--config", str(path)]) == 2


def test_missing_config_file(tmp_path, capsys):
    assert run(["sweep", "--config", str(tmp_path / "absent.json")]) == 2


def test_jobs_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("TAUBER_JOBS", "many")
    path = write_config(tmp_path)
    assert run(["sweep", "--config", str(path)]) == 2


def write_game(tmp_path, name, mutate):
    doc = json.loads(tg.serialize(tg.builtin("swap2")))
    mutate(doc)
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return path


def test_value_refuses_payoff_outside_unit_interval(tmp_path, capsys):
    path = write_game(tmp_path, "big.json", lambda d: d.update(g=[5.0, 0.0]))
    assert run(["value", "--game", str(path), "--density", "uniform:2",
                "--tail-eps", "0"]) == 1
    captured = capsys.readouterr()
    assert "payoff out of [0,1]" in captured.err
    assert captured.out == ""


def test_value_refuses_nan_payoff_and_short_rows(tmp_path, capsys):
    path = write_game(tmp_path, "nan.json", lambda d: d.update(g=[float("nan"), 0.0]))
    assert run(["value", "--game", str(path), "--density", "exp:1"]) == 1
    assert "payoff" in capsys.readouterr().err

    def short_row(doc):
        doc["kernel"][1][0][0] = [0.5, 0.0]
    path = write_game(tmp_path, "short.json", short_row)
    assert run(["value", "--game", str(path), "--density", "exp:1"]) == 1
    assert "sums to" in capsys.readouterr().err


def test_sweep_refuses_an_ill_formed_game(tmp_path, capsys):
    write_game(tmp_path, "big.json", lambda d: d.update(g=[5.0, 0.0]))
    path = write_config(tmp_path, game="big.json")
    assert run(["sweep", "--config", str(path)]) == 1
    assert "payoff out of [0,1]" in capsys.readouterr().err
    assert not (tmp_path / "swap2.csv").exists()
    assert run(["equivalence", "--config", str(path)]) == 1
