import csv
import json

import numpy as np
import pytest

from copgof import copulas
from copgof.cli import main
from copgof.copulas import CopulaModel, Family


@pytest.fixture(scope="module")
def data_csv(tmp_path_factory):
    path = tmp_path_factory.mktemp("data") / "pairs.csv"
    gen = np.random.default_rng(55)
    theta = copulas.tau_to_theta(Family.CLAYTON, 0.5)
    u1, u2 = copulas.sample_pairs(CopulaModel(Family.CLAYTON, theta), gen, 120)
    t1, t2 = -np.log(u1), -np.log(u2)
    c = gen.exponential(4.0, 120)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x1", "x2", "d1", "d2"])
        for a, b, cc in zip(t1, t2, c):
            w.writerow([f"{min(a, cc):.10g}", f"{min(b, cc):.10g}",
                        int(a <= cc), int(b <= cc)])
    return str(path)


def test_cmd_test_json_schema(data_csv, capsys):
    rc = main(["test", "--input", data_csv, "--family", "clayton",
               "--b", "30", "--seed", "4"])
    assert rc == 0
    report = json.loads(capsys.readouterr().out)
    assert report["family"] == "clayton"
    assert report["statistic"]["kind"] == "ir"
    assert report["statistic"]["null_mean"] == 1.0
    assert 0.0 <= report["p_value"] <= 1.0
    assert report["b"] == 30
    assert report["seed"] == 4
    assert report["n"] == 120
    assert len(report["censoring_rates"]) == 2
    assert report["decision_at"]["alpha"] == 0.05
    assert isinstance(report["decision_at"]["reject"], bool)
    assert isinstance(report["degenerate"], bool)


def test_cmd_test_deterministic_output(data_csv, capsys):
    main(["test", "--input", data_csv, "--family", "frank", "--b", "25", "--seed", "1"])
    first = capsys.readouterr().out
    main(["test", "--input", data_csv, "--family", "frank", "--b", "25", "--seed", "1"])
    assert capsys.readouterr().out == first


def test_cmd_test_output_file(data_csv, tmp_path):
    out = tmp_path / "report.json"
    rc = main(["test", "--input", data_csv, "--family", "clayton",
               "--b", "20", "--output", str(out)])
    assert rc == 0
    assert json.loads(out.read_text())["family"] == "clayton"


def test_cmd_select(data_csv, capsys):
    rc = main(["select", "--input", data_csv, "--families", "clayton,joe",
               "--b", "30", "--seed", "2"])
    assert rc == 0
    result = json.loads(capsys.readouterr().out)
    assert result["selected"] in ("clayton", "joe")
    assert len(result["ranking"]) == 2
    ps = [e["p_value"] for e in result["ranking"]]
    assert ps == sorted(ps, reverse=True)


def test_cmd_select_warns_on_duplicates(data_csv, capsys):
    rc = main(["select", "--input", data_csv, "--families", "clayton,clayton",
               "--b", "20"])
    assert rc == 0
    captured = capsys.readouterr()
    assert "duplicate" in captured.err
    assert len(json.loads(captured.out)["ranking"]) == 1


def test_cmd_fit(data_csv, capsys):
    rc = main(["fit", "--input", data_csv, "--family", "clayton"])
    assert rc == 0
    result = json.loads(capsys.readouterr().out)
    assert result["converged"] is True
    assert 0.0 < result["tau_hat"] < 1.0
    assert result["n"] == 120


def test_cmd_fit_config_initial_theta(data_csv, capsys):
    rc = main(["fit", "--input", data_csv, "--family", "clayton",
               "--config", "initial_theta=1.5"])
    assert rc == 0
    assert json.loads(capsys.readouterr().out)["converged"] is True


def test_cmd_km_schema(data_csv, capsys):
    rc = main(["km", "--input", data_csv, "--margin", "1"])
    assert rc == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "time,survival,n_at_risk"
    rows = [line.split(",") for line in lines[1:]]
    surv = [float(r[1]) for r in rows]
    assert all(a >= b for a, b in zip(surv, surv[1:]))
    assert int(rows[0][2]) == 120


def test_cmd_simulate_rejection(capsys):
    rc = main(["simulate", "--true-family", "clayton", "--tau", "0.5",
               "--n", "60", "--replications", "3", "--b", "15",
               "--tests", "ir", "--seed", "6"])
    assert rc == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == ("true_family,null_family,test,tau,n,censoring,"
                        "rejection_rate,selection_rate,replications")
    assert lines[1].startswith("clayton,clayton,ir,0.5,60,none,")


def test_cmd_simulate_null_mode(capsys, tmp_path):
    out = tmp_path / "qq.csv"
    rc = main(["simulate", "--mode", "null", "--true-family", "gaussian",
               "--n", "50", "--replications", "3", "--b", "15",
               "--tests", "ir", "--seed", "6", "--output", str(out)])
    assert rc == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "statistic,normal_quantile"
    assert len(lines) == 4


# --- error paths ---------------------------------------------------------

def test_usage_unknown_family(data_csv, capsys):
    rc = main(["test", "--input", data_csv, "--family", "vine", "--b", "20"])
    assert rc == 64
    assert "unknown copula family" in capsys.readouterr().err


def test_usage_b_too_small(data_csv, capsys):
    rc = main(["test", "--input", data_csv, "--family", "clayton", "--b", "1"])
    assert rc == 64


def test_usage_bad_config_key(data_csv, capsys):
    rc = main(["test", "--input", data_csv, "--family", "clayton",
               "--b", "20", "--config", "shrinkage=3"])
    assert rc == 64
    assert "valid keys" in capsys.readouterr().err


def test_usage_missing_subcommand(capsys):
    assert main([]) == 64


def test_input_missing_file(capsys):
    rc = main(["fit", "--input", "/nonexistent/x.csv", "--family", "clayton"])
    assert rc == 1


def test_input_bad_header(tmp_path, capsys):
    p = tmp_path / "bad.csv"
    p.write_text("a,b,c,d\n1,2,1,1\n")
    rc = main(["fit", "--input", str(p), "--family", "clayton"])
    assert rc == 1
    assert "line 1" in capsys.readouterr().err


def test_input_bad_row_reports_line(tmp_path, capsys):
    p = tmp_path / "bad.csv"
    p.write_text("x1,x2,d1,d2\n1.0,2.0,1,1\n1.0,oops,1,1\n")
    rc = main(["fit", "--input", str(p), "--family", "clayton"])
    assert rc == 1
    assert "line 3" in capsys.readouterr().err


def test_statistical_failure_exit_code(tmp_path, capsys):
    # 9 rows: below the minimum sample size for fitting -> exit 2,
    # not a traceback
    p = tmp_path / "deg.csv"
    rows = ["x1,x2,d1,d2"] + [f"{i}.0,{i}.5,1,1" for i in range(1, 10)]
    p.write_text("\n".join(rows) + "\n")
    rc = main(["test", "--input", str(p), "--family", "clayton", "--b", "20"])
    assert rc == 2
    assert "statistical failure" in capsys.readouterr().err
