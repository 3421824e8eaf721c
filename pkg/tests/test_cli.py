import json
import re

import numpy as np
import pytest
from conftest import make_linear_panel

import paneldml as pm
from paneldml.cli import main


def _write_config(tmp_path, **overrides):
    cfg = {
        "input": str(tmp_path / "panel.csv"),
        "columns": {"y": "y", "d": "d", "x": ["X1", "X2", "X3"],
                    "panel": "id", "time": "time"},
        "approach": "fd-exact",
        "transform_x": "no",
        "score": "orth-PO",
        "dml_procedure": "dml2",
        "n_folds": 3,
        "seed": 7,
        "output": str(tmp_path / "fit.json"),
        "learners": {"ml_l": {"kind": "ridge", "penalty": 0.0},
                     "ml_m": {"kind": "ridge", "penalty": 0.0}},
    }
    cfg.update(overrides)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(cfg))
    return path, cfg


def _simulate(tmp_path, **kw):
    args = ["simulate", "--n-subjects", str(kw.get("n", 30)),
            "--t-periods", str(kw.get("t", 3)), "--dim-x", str(kw.get("p", 3)),
            "--seed", str(kw.get("seed", 1)), "--out", str(tmp_path / "panel.csv")]
    assert main(args) == 0


def test_simulate_shape_and_header(tmp_path):
    assert main(["simulate", "--n-subjects", "10", "--t-periods", "3",
                 "--dim-x", "3", "--seed", "0", "--out", str(tmp_path / "d.csv")]) == 0
    lines = (tmp_path / "d.csv").read_text().strip().split("\n")
    assert lines[0] == "id,time,y,d,X1,X2,X3"
    assert len(lines) == 31


def test_simulate_deterministic_bytes(tmp_path):
    for name in ("a.csv", "b.csv"):
        main(["simulate", "--n-subjects", "8", "--t-periods", "3", "--dim-x", "3",
              "--seed", "5", "--out", str(tmp_path / name)])
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_simulate_paper_scale_row_count(tmp_path):
    main(["simulate", "--n-subjects", "1000", "--t-periods", "10", "--dim-x", "20",
          "--seed", "3", "--out", str(tmp_path / "big.csv")])
    n_lines = sum(1 for _ in open(tmp_path / "big.csv"))
    assert n_lines == 10001


def test_estimate_summary_and_result_file(tmp_path, capsys):
    _simulate(tmp_path)
    cfg_path, cfg = _write_config(tmp_path)
    assert main(["estimate", "--config", str(cfg_path)]) == 0
    out = capsys.readouterr().out
    row = next(line for line in out.split("\n") if re.match(r"^d\s+-?\d", line))
    assert re.search(r"Pr\(>\|t\|\)", out)
    assert "Signif. codes:  0 '***' 0.001 '**' 0.01 '*' 0.05 '.' 0.1 ' ' 1" in out

    record = json.loads((tmp_path / "fit.json").read_text())
    for key in ("theta_hat", "se_theta", "t_stat", "p_value", "model_rmse",
                "rmse_l", "rmse_m", "n_obs", "n_subjects", "n_groups",
                "approach", "score", "dml_procedure", "n_folds", "seed",
                "ci_lower", "ci_upper", "moment_residual_rel"):
        assert key in record
    half = 1.959964 * record["se_theta"]
    assert record["ci_lower"] == pytest.approx(record["theta_hat"] - half,
                                               abs=1e-6 * record["se_theta"])
    assert record["ci_upper"] == pytest.approx(record["theta_hat"] + half,
                                               abs=1e-6 * record["se_theta"])
    # printed estimate matches the stored one at 5 significant digits
    assert f"{record['theta_hat']:.5g}" in row


def test_estimate_stars_for_strong_effect(tmp_path, capsys):
    _simulate(tmp_path, n=60)
    cfg_path, _ = _write_config(tmp_path)
    main(["estimate", "--config", str(cfg_path)])
    out = capsys.readouterr().out
    row = next(line for line in out.split("\n") if re.match(r"^d\s", line))
    assert row.rstrip().endswith("***")  # theta=0.7 at N=60 is overwhelming


def test_estimate_unknown_approach_exit_2(tmp_path, capsys):
    _simulate(tmp_path)
    cfg_path, _ = _write_config(tmp_path, approach="fe")
    assert main(["estimate", "--config", str(cfg_path)]) == 2
    err = capsys.readouterr().err
    assert "approach" in err and "fe" in err


def test_estimate_missing_input_exit_3(tmp_path, capsys):
    cfg_path, _ = _write_config(tmp_path, input=str(tmp_path / "absent.csv"))
    assert main(["estimate", "--config", str(cfg_path)]) == 3
    assert "data error" in capsys.readouterr().err


def test_estimate_bad_data_exit_3(tmp_path, capsys):
    (tmp_path / "panel.csv").write_text(
        "id,time,y,d,X1,X2,X3\na,1,1,1,1,1,1\na,1,2,2,2,2,2\n"
    )
    cfg_path, _ = _write_config(tmp_path, n_folds=2)
    assert main(["estimate", "--config", str(cfg_path)]) == 3
    assert "duplicate" in capsys.readouterr().err.lower()


def test_estimate_numerical_failure_exit_4(tmp_path, capsys):
    # constant treatment makes the moment condition degenerate
    data = make_linear_panel(n_subjects=6, t_periods=3, seed=0)
    fixed = pm.PanelDataset.from_arrays(
        data.y, np.ones(data.n_obs), data.x, data.panel_id, data.time_id,
        names=pm.ColumnSpec("y", "d", ("X1", "X2", "X3"), "id", "time"),
    )
    pm.write_long_table(fixed, tmp_path / "panel.csv")
    cfg_path, _ = _write_config(tmp_path, approach="pooled", n_folds=2)
    assert main(["estimate", "--config", str(cfg_path)]) == 4
    assert "numerical failure" in capsys.readouterr().err


def test_estimate_flag_overrides_config(tmp_path):
    _simulate(tmp_path)
    cfg_path, cfg = _write_config(tmp_path, approach="fd-exact")
    assert main(["estimate", "--config", str(cfg_path), "--approach", "wg-approx",
                 "--seed", "11"]) == 0
    record = json.loads((tmp_path / "fit.json").read_text())
    assert record["approach"] == "wg-approx"
    assert record["seed"] == 11


def test_estimate_n_folds_one_needs_flag(tmp_path, capsys):
    _simulate(tmp_path)
    cfg_path, _ = _write_config(tmp_path, n_folds=1)
    assert main(["estimate", "--config", str(cfg_path)]) == 2
    cfg_path2, _ = _write_config(tmp_path, n_folds=1, apply_cross_fitting=False)
    assert main(["estimate", "--config", str(cfg_path2)]) == 0


def test_estimate_tab_delimited_input(tmp_path):
    data = make_linear_panel(n_subjects=10, t_periods=3, seed=2)
    renamed = pm.PanelDataset.from_arrays(
        data.y, data.d, data.x, data.panel_id, data.time_id,
        names=pm.ColumnSpec("y", "d", ("X1", "X2", "X3"), "id", "time"),
    )
    pm.write_long_table(renamed, tmp_path / "panel.csv", delimiter="\t")
    cfg_path, _ = _write_config(tmp_path, delimiter="tab")
    assert main(["estimate", "--config", str(cfg_path)]) == 0


def test_confint_round_trip_exact(tmp_path, capsys):
    _simulate(tmp_path)
    cfg_path, _ = _write_config(tmp_path)
    main(["estimate", "--config", str(cfg_path)])
    capsys.readouterr()
    record = json.loads((tmp_path / "fit.json").read_text())

    assert main(["confint", "--result", str(tmp_path / "fit.json"),
                 "--level", "0.95"]) == 0
    out = capsys.readouterr().out
    from scipy.stats import norm
    z = float(norm.ppf(0.975))
    lo = record["theta_hat"] - z * record["se_theta"]
    hi = record["theta_hat"] + z * record["se_theta"]
    assert f"{lo:.7f}" in out and f"{hi:.7f}" in out


def test_confint_monotone_in_level(tmp_path, capsys):
    result = tmp_path / "r.json"
    result.write_text(json.dumps({"theta_hat": 1.0, "se_theta": 0.1, "treatment": "d"}))

    def bounds(level):
        main(["confint", "--result", str(result), "--level", str(level)])
        line = capsys.readouterr().out.strip().split("\n")[-1]
        lo, hi = map(float, line.split()[1:3])
        return lo, hi

    lo95, hi95 = bounds(0.95)
    lo50, hi50 = bounds(0.50)
    assert hi50 - lo50 < hi95 - lo95
    lo68, hi68 = bounds(0.6827)
    assert hi68 - lo68 == pytest.approx(2 * 0.1, rel=1e-3)  # ~ +/- 1 se


def test_confint_missing_result_exit_3(tmp_path, capsys):
    assert main(["confint", "--result", str(tmp_path / "none.json")]) == 3


def test_round_trip_simulate_estimate_consumes_own_output(tmp_path):
    main(["simulate", "--n-subjects", "40", "--t-periods", "4", "--dim-x", "5",
          "--seed", "9", "--out", str(tmp_path / "panel.csv")])
    cfg = {
        "input": str(tmp_path / "panel.csv"),
        "columns": {"y": "y", "d": "d", "x": [f"X{j}" for j in range(1, 6)],
                    "panel": "id", "time": "time"},
        "approach": "cre",
        "n_folds": 4,
        "seed": 2,
        "output": str(tmp_path / "fit.json"),
        "learners": {"ml_l": {"kind": "tree", "max_depth": 3},
                     "ml_m": {"kind": "tree", "max_depth": 3}},
    }
    (tmp_path / "c.json").write_text(json.dumps(cfg))
    assert main(["estimate", "--config", str(tmp_path / "c.json")]) == 0
    assert (tmp_path / "fit.json").exists()
