import csv
import dataclasses
import json

import pytest

from invest_eq import cli, nash
from invest_eq.cli import EXIT_CONFIG, EXIT_EMPTY, EXIT_FAIL, EXIT_OK, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestSolve:
    def test_nash(self, capsys):
        code, out, _ = run(capsys, "solve", "--model", "nash", "--psi", "2,1.5", "--b", "1,1")
        doc = json.loads(out)
        assert code == EXIT_OK
        assert doc["Q"] == 0.5 and doc["M"] == [1]
        assert doc["q"] == [0.5, 0.0]
        assert doc["status"] == "ok"

    def test_centralized(self, capsys):
        code, out, _ = run(capsys, "solve", "--model", "centralized", "--psi", "4", "--b", "1")
        doc = json.loads(out)
        assert code == EXIT_OK
        assert doc["Q"] == pytest.approx(2.5, abs=1e-9)
        assert doc["gamma"] == pytest.approx(10, abs=1e-6)

    def test_cooperative_infeasible(self, capsys):
        code, out, _ = run(capsys, "solve", "--model", "cooperative", "--psi", "7,7", "--b", "1,1")
        doc = json.loads(out)
        assert code == EXIT_EMPTY
        assert doc["status"] == "infeasible"
        assert doc["binding_constraints"] == [{"cp": 1, "deviation": [2]}, {"cp": 2, "deviation": [1]}]

    def test_cooperative_feasible(self, capsys):
        code, out, _ = run(capsys, "solve", "--model", "cooperative", "--psi", "7,5")
        doc = json.loads(out)
        assert code == EXIT_OK and doc["status"] == "ok"
        assert sum(doc["q"]) == pytest.approx(doc["Q"], abs=1e-9)

    def test_bargaining_degenerate(self, capsys):
        code, out, _ = run(capsys, "solve", "--model", "bargaining", "--psi", "0.3,0.3", "--b", "2,2")
        doc = json.loads(out)
        assert code == EXIT_EMPTY
        assert doc["status"] == "degenerate" and doc["beta"] == "undefined"

    def test_bargaining_alpha_unbounded(self, capsys):
        code, out, _ = run(capsys, "solve", "--model", "bargaining", "--psi", "2,2", "--b", "2,2")
        assert code == EXIT_OK
        assert json.loads(out)["alpha"] == "unbounded"

    def test_r_and_a(self, capsys):
        _, out, _ = run(capsys, "solve", "--model", "centralized", "--r", "8", "--a", "0.5")
        assert json.loads(out)["Q"] == pytest.approx(2.5, abs=1e-9)

    def test_writes_out(self, capsys, tmp_path):
        path = tmp_path / "sol.json"
        code, out, _ = run(capsys, "solve", "--model", "nash", "--psi", "2,2", "--out", str(path))
        assert code == EXIT_OK
        assert json.loads(path.read_text()) == json.loads(out)

    @pytest.mark.parametrize(
        "argv,field",
        [
            (["--psi", "2,x"], "psi"),
            (["--psi", "2,2", "--b", "1"], "b"),
            (["--psi", "2,2", "--b", "1,0.5"], "market[1]"),
            (["--psi", "2,-1"], "market[1]"),
            (["--r", "2"], "a"),
            (["--psi", "2", "--tol", "0"], "tol"),
            ([], "market"),
        ],
    )
    def test_config_errors(self, capsys, argv, field):
        code, _, err = run(capsys, "solve", "--model", "nash", *argv)
        assert code == EXIT_CONFIG
        assert f"config error: {field}" in err

    def test_missing_model(self, capsys):
        code, _, err = run(capsys, "solve", "--psi", "2")
        assert code == EXIT_CONFIG and "model" in err


class TestConfigFiles:
    def test_dump_roundtrip(self, capsys, tmp_path):
        argv = ["solve", "--model", "bargaining", "--r", "3,2", "--a", "1,0.75", "--b", "1,1.5", "--tol", "1e-9"]
        code, dumped, _ = run(capsys, *argv, "--dump-config")
        assert code == EXIT_OK
        path = tmp_path / "run.json"
        path.write_text(dumped)
        _, direct, _ = run(capsys, *argv)
        _, from_file, _ = run(capsys, "solve", "--config", str(path))
        assert direct == from_file
        _, again, _ = run(capsys, "solve", "--config", str(path), "--dump-config")
        assert json.loads(again) == json.loads(dumped)

    def test_runconfig_dict_roundtrip(self):
        cfg = cli.RunConfig(market=[{"psi": 2.0, "b": 1.0}], model="nash", tol=1e-8)
        assert cli.RunConfig.from_dict(cfg.to_dict()) == cfg

    def test_flags_override_file(self, capsys, tmp_path):
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"market": [{"psi": 3}, {"psi": 2.5}], "model": "centralized"}))
        _, out, _ = run(capsys, "solve", "--config", str(path), "--model", "nash")
        assert json.loads(out)["model"] == "nash"
        assert json.loads(out)["M"] == [1]
        _, out, _ = run(capsys, "solve", "--config", str(path), "--model", "nash", "--b", "2,1")
        assert json.loads(out)["M"] == [2]

    def test_missing_file(self, capsys):
        code, _, err = run(capsys, "solve", "--config", "missing.json")
        assert code == EXIT_CONFIG and "config" in err

    @pytest.mark.parametrize(
        "data,field",
        [
            ({"market": [{"psi": 2, "rate": 1}], "model": "nash"}, "market[0].rate"),
            ({"market": [{"psi": "2"}], "model": "nash"}, "market[0].psi"),
            ({"market": [{"r": 2}], "model": "nash"}, "market[0]"),
            ({"market": [{"psi": 2}], "model": "nash", "colour": 1}, "colour"),
            ({"market": [{"psi": 2}], "model": "nash", "preset": "fig2"}, "market"),
        ],
    )
    def test_bad_fields_named(self, capsys, tmp_path, data, field):
        path = tmp_path / "run.json"
        path.write_text(json.dumps(data))
        code, _, err = run(capsys, "solve", "--config", str(path))
        assert code == EXIT_CONFIG
        assert f"config error: {field}:" in err

    def test_invalid_json(self, capsys, tmp_path):
        path = tmp_path / "run.json"
        path.write_text("{")
        code, _, _ = run(capsys, "solve", "--config", str(path))
        assert code == EXIT_CONFIG


class TestSweep:
    def test_fig2(self, capsys, tmp_path):
        path = tmp_path / "fig2.csv"
        code, out, _ = run(capsys, "sweep", "--preset", "fig2", "--out", str(path))
        assert code == EXIT_OK
        rows = list(csv.DictReader(path.open()))
        assert len(rows) == 248
        assert "248" in out

    def test_fig8_unbounded_alpha(self, capsys, tmp_path):
        path = tmp_path / "fig8.csv"
        assert run(capsys, "sweep", "--preset", "fig8", "--out", str(path))[0] == EXIT_OK
        alphas = [r["alpha"] for r in csv.DictReader(path.open())]
        assert "unbounded" in alphas and "0" in alphas

    def test_json_format(self, capsys, tmp_path):
        path = tmp_path / "fig3.json"
        assert run(capsys, "sweep", "--preset", "fig3", "--out", str(path))[0] == EXIT_OK
        rows = json.loads(path.read_text())
        assert {r["status"] for r in rows} == {"ok", "infeasible"}

    def test_custom_config(self, capsys, tmp_path):
        cfg = tmp_path / "sweep.json"
        cfg.write_text(json.dumps({"kind": "delta", "N": 2, "c": 2, "delta_grid": [0, 1], "models": ["nash"]}))
        code, out, err = run(capsys, "sweep", "--config", str(cfg))
        assert code == EXIT_OK
        assert out.splitlines()[0].startswith("model,b1,b2")
        assert len(out.splitlines()) == 3 and "2 rows" in err

    def test_custom_config_bad_field(self, capsys, tmp_path):
        cfg = tmp_path / "sweep.json"
        cfg.write_text(json.dumps({"kind": "delta", "delta_grid": [0, -1]}))
        code, _, err = run(capsys, "sweep", "--config", str(cfg))
        assert code == EXIT_CONFIG and "delta_grid[1]" in err

    def test_missing_config(self, capsys):
        assert run(capsys, "sweep", "--config", "missing.json")[0] == EXIT_CONFIG

    def test_unknown_preset(self, capsys):
        assert run(capsys, "sweep", "--preset", "fig9")[0] == EXIT_CONFIG

    def test_unwritable_out(self, capsys, tmp_path):
        code, _, err = run(capsys, "sweep", "--preset", "fig2", "--out", str(tmp_path / "no" / "x.csv"))
        assert code == EXIT_CONFIG and "x.csv" in err


class TestVerify:
    def test_fixed_set_only(self, capsys):
        code, out, _ = run(capsys, "verify", "--seed", "42", "--random", "0")
        assert code == EXIT_OK
        assert "FAIL" not in out and "random=0" in out

    def test_seeded_report_is_reproducible(self, capsys):
        _, first, _ = run(capsys, "verify", "--seed", "7", "--random", "3")
        _, second, _ = run(capsys, "verify", "--seed", "7", "--random", "3")
        assert first == second

    def test_corrupted_solver_fails(self, capsys, monkeypatch):
        real = nash.solve_nash

        def corrupted(market):
            sol = real(market)
            return dataclasses.replace(sol, q=tuple(x + 0.3 for x in sol.q))

        monkeypatch.setattr(nash, "solve_nash", corrupted)
        code, out, _ = run(capsys, "verify", "--seed", "42", "--random", "0")
        assert code == EXIT_FAIL
        assert "FAIL nash" in out

    def test_negative_random(self, capsys):
        assert run(capsys, "verify", "--random", "-1")[0] == EXIT_CONFIG
