import json
import subprocess
import sys

import pytest

from effortbench import cli, report

SMALL_CONFIG = {
    "datasets": ["albrecht", "kemerer"],
    "learners": [
        {"kind": "LM"},
        {"kind": "ELM", "grid": {"hidden_width": [4, 8], "ridge": [0.01]}},
        {"kind": "RF", "grid": {"n_trees": [5], "mtry": [2], "min_leaf": [2]}},
    ],
    "seed": 20190101,
    "inner_folds": 5,
    "metrics": ["RMSE", "MMRE"],
}


def write_config(tmp_path, overrides=None, **kwargs):
    cfg = {**SMALL_CONFIG, **(overrides or {}), **kwargs}
    path = tmp_path / "config.json"
    path.write_text(json.dumps(cfg))
    return path


class TestParseConfig:
    def test_round_trips(self):
        cfg = report.parse_config(SMALL_CONFIG)
        assert cfg.seed == 20190101
        assert cfg.datasets == ("albrecht", "kemerer")
        assert cfg.learners[1].grid_override == {"hidden_width": [4, 8],
                                                 "ridge": [0.01]}

    def test_missing_seed_rejected(self):
        with pytest.raises(report.ConfigError, match="seed"):
            report.parse_config({k: v for k, v in SMALL_CONFIG.items()
                                 if k != "seed"})

    def test_unknown_learner_rejected_before_compute(self):
        bad = {**SMALL_CONFIG, "learners": [{"kind": "XGBOOST"}]}
        with pytest.raises(report.ConfigError, match="XGBOOST"):
            report.parse_config(bad)

    def test_unknown_dataset_rejected(self):
        with pytest.raises(report.ConfigError, match="nonesuch"):
            report.parse_config({**SMALL_CONFIG, "datasets": ["nonesuch"]})

    def test_unknown_grid_param_rejected(self):
        bad = {**SMALL_CONFIG,
               "learners": [{"kind": "LM", "grid": {"slope": [1]}}]}
        with pytest.raises(report.ConfigError, match="slope"):
            report.parse_config(bad)

    def test_unknown_metric_rejected(self):
        with pytest.raises(report.ConfigError, match="PRED25"):
            report.parse_config({**SMALL_CONFIG, "metrics": ["PRED25"]})


class TestRunCommand:
    def test_writes_three_agreeing_files(self, tmp_path):
        cfg = write_config(tmp_path)
        out = tmp_path / "out"
        assert cli.main(["run", str(cfg), "--out", str(out)]) == 0
        payload = json.loads((out / "report.json").read_text())
        md = (out / "report.md").read_text()
        csv_text = (out / "chart.csv").read_text()

        table_rows = [l for l in md.splitlines() if l.startswith("| ") and
                      not l.startswith("| Learner")]
        assert len(table_rows) == 3  # one per learner
        assert len(csv_text.strip().splitlines()) == 1 + 3 * 2  # header + cells
        for kind in ("LM", "ELM", "RF"):
            for ds in ("albrecht", "kemerer"):
                printed = report.fmt4(payload["cells"][kind][ds]["rmse"])
                assert f"{kind},{ds},{printed}" in csv_text
                assert f" {printed} " in md

    def test_provenance_embedded(self, tmp_path):
        cfg = write_config(tmp_path)
        out = tmp_path / "out"
        cli.main(["run", str(cfg), "--out", str(out)])
        payload = json.loads((out / "report.json").read_text())
        assert payload["seed"] == 20190101
        assert payload["config_hash"]
        assert set(payload["datasets"]) == {"albrecht", "kemerer"}
        for meta in payload["datasets"].values():
            assert len(meta["checksum"]) == 64
        assert payload["grids"]["ELM"]["albrecht"]["hidden_width"] == [4, 8]
        n_records = len(payload["cells"]["LM"]["albrecht"]["records"])
        assert n_records == payload["datasets"]["albrecht"]["rows"]

    def test_reruns_byte_identical_and_parallel_equals_sequential(self, tmp_path):
        cfg = write_config(tmp_path)
        outs = []
        for name, jobs in (("a", 1), ("b", 1), ("c", 2)):
            out = tmp_path / name
            assert cli.main(["run", str(cfg), "--out", str(out),
                             "--jobs", str(jobs)]) == 0
            outs.append((out / "report.json").read_bytes())
        assert outs[0] == outs[1]
        assert outs[0] == outs[2]

    def test_seed_flag_overrides_config(self, tmp_path):
        cfg = write_config(tmp_path)
        a, b = tmp_path / "a", tmp_path / "b"
        cli.main(["run", str(cfg), "--out", str(a)])
        cli.main(["run", str(cfg), "--out", str(b), "--seed", "7"])
        pa = json.loads((a / "report.json").read_text())
        pb = json.loads((b / "report.json").read_text())
        assert pa["seed"] == 20190101 and pb["seed"] == 7
        assert (pa["cells"]["ELM"]["albrecht"]["rmse"]
                != pb["cells"]["ELM"]["albrecht"]["rmse"])

    def test_config_error_exit_code(self, tmp_path):
        cfg = write_config(tmp_path, overrides={"learners": [{"kind": "SVM"}]})
        assert cli.main(["run", str(cfg)]) == cli.EXIT_CONFIG
        missing = tmp_path / "missing.json"
        assert cli.main(["run", str(missing)]) == cli.EXIT_CONFIG


class TestOtherCommands:
    def test_list(self, capsys):
        assert cli.main(["list"]) == 0
        out = capsys.readouterr().out
        assert "albrecht" in out and "MARS" in out

    def test_profile_known(self, capsys):
        assert cli.main(["profile", "albrecht"]) == 0
        out = capsys.readouterr().out
        assert "verdict: pass" in out
        assert "Effort" in out and "21.8750" in out

    def test_profile_kitchenham_effort_max(self, capsys):
        assert cli.main(["profile", "kitchenham"]) == 0
        out = capsys.readouterr().out
        assert "113930" in out

    def test_profile_waived_cell_reported(self, capsys):
        assert cli.main(["profile", "kemerer"]) == 0
        out = capsys.readouterr().out
        assert "waived" in out

    def test_profile_unknown_exits_with_known_ids(self, capsys):
        assert cli.main(["profile", "bogus"]) == cli.EXIT_DATA
        err = capsys.readouterr().err
        assert "albrecht" in err  # message lists the known ids

    def test_verify_paper(self, capsys):
        assert cli.main(["verify-paper"]) == 0
        out = capsys.readouterr().out
        assert "verdict: pass" in out
        assert out.count("[ok]") == 18  # avg and rank per learner

    def test_compare_on_fresh_report(self, tmp_path, capsys):
        cfg = write_config(tmp_path, overrides={"datasets": ["albrecht"],
                                                "learners": [{"kind": "LM"}]})
        out = tmp_path / "out"
        cli.main(["run", str(cfg), "--out", str(out)])
        capsys.readouterr()
        assert cli.main(["compare", str(out / "report.json")]) == 0
        doc = capsys.readouterr().out
        assert "Not compared" in doc  # 7 datasets absent from this report
        assert "| LM | albrecht |" in doc

    def test_compare_unreadable_report(self, tmp_path):
        assert cli.main(["compare", str(tmp_path / "none.json")]) == cli.EXIT_DATA


class TestProcessRestartDeterminism:
    def test_fresh_processes_produce_identical_bytes(self, tmp_path):
        cfg = write_config(tmp_path, overrides={
            "datasets": ["kemerer"],
            "learners": [{"kind": "ELM", "grid": {"hidden_width": [4],
                                                  "ridge": [0.01]}}],
        })
        blobs = []
        for name in ("p1", "p2"):
            out = tmp_path / name
            proc = subprocess.run(
                [sys.executable, "-m", "effortbench.cli", "run", str(cfg),
                 "--out", str(out)],
                capture_output=True, text=True)
            assert proc.returncode == 0, proc.stderr
            blobs.append((out / "report.json").read_bytes())
        assert blobs[0] == blobs[1]
