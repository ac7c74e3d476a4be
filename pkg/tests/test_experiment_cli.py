import csv
import json

import numpy as np
import pytest

from edgeslice import cli
from edgeslice.experiment import (
    ROW_COLUMNS,
    ExperimentConfig,
    bound_equality_frequency,
    run_shapes,
    run_sweep,
    statistics_report,
)
from edgeslice.comm_graph import CommGraph
from edgeslice.errors import MatchingError, ModelFormatError
from edgeslice.zoo import fixture_path

SMALL = dict(node_counts=[5, 10], class_counts=[2, 5], capacities_mb=[64, 512], trials=2, seed=3)


def read_csv(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


class TestConfig:
    def test_defaults(self):
        c = ExperimentConfig()
        assert c.node_counts == [5, 10, 15, 20, 50]
        assert c.class_counts == [2, 5, 8, 11, 14, 17, 20]
        assert c.capacities_mb == [64, 128, 256, 512]
        assert c.trials == 50
        assert set(c.algorithms) == {"kpath", "joint", "random"}

    @pytest.mark.parametrize("bad", [dict(trials=0), dict(node_counts=[]), dict(algorithms=["magic"]), dict(class_counts=[1])])
    def test_invalid(self, bad):
        with pytest.raises(ValueError):
            ExperimentConfig(**bad)

    def test_round_trip(self, tmp_path):
        c = ExperimentConfig(**SMALL)
        c.save(tmp_path / "c.json")
        assert ExperimentConfig.load(tmp_path / "c.json") == c

    def test_wrong_format(self, tmp_path):
        (tmp_path / "c.json").write_text('{"format": "nope"}')
        with pytest.raises(ModelFormatError):
            ExperimentConfig.load(tmp_path / "c.json")


class TestSweep:
    def test_row_count_and_schema(self, tmp_path):
        c = ExperimentConfig(**SMALL)
        res = run_sweep(c, tmp_path)
        rows = read_csv(tmp_path / "rows.csv")
        assert len(rows) == 2 * 2 * 2 * 2 * 3 * 2
        assert tuple(rows[0]) == ROW_COLUMNS
        assert all(r["seed"] for r in rows)
        assert res.summary["format"] == "edgeslice-sweep/1"
        assert res.summary["bound_violations"] == 0

    def test_infeasible_cells_are_blank(self, tmp_path):
        c = ExperimentConfig(models=["inception_resnet_v2_like"], node_counts=[5], class_counts=[2],
                             capacities_mb=[64], trials=2)
        run_sweep(c, tmp_path)
        rows = read_csv(tmp_path / "rows.csv")
        assert {r["status"] for r in rows} == {"infeasible"}
        assert all(r["beta_s"] == "" for r in rows)
        cells = read_csv(tmp_path / "cells.csv")
        assert all(cell["mean_beta_s"] == "" for cell in cells)

    def test_byte_identical_reruns(self, tmp_path):
        c = ExperimentConfig(**SMALL)
        run_sweep(c, tmp_path / "a")
        run_sweep(c, tmp_path / "b")
        for name in ("rows.csv", "cells.csv", "ratios.csv", "summary.json"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_workers_do_not_change_output(self, tmp_path):
        c = ExperimentConfig(**{**SMALL, "models": ["resnet50_like"]})
        run_sweep(c, tmp_path / "a", workers=1)
        run_sweep(c, tmp_path / "b", workers=2)
        assert (tmp_path / "a" / "rows.csv").read_bytes() == (tmp_path / "b" / "rows.csv").read_bytes()

    def test_paired_graphs(self, tmp_path):
        rows = run_sweep(ExperimentConfig(**SMALL)).rows
        seeds = {(r["n_nodes"], r["trial"]): set() for r in rows}
        for r in rows:
            seeds[(r["n_nodes"], r["trial"])].add(r["seed"])
        assert all(len(s) == 1 for s in seeds.values())


def test_bound_equality_frequency_small():
    eq, bad, n = bound_equality_frequency(trials=20)
    assert bad == 0 and n == 20


class TestShapes:
    def test_nine_nodes_three_rows(self):
        rows = run_shapes([(s, 9) for s in ("ring", "grid", "cluster")], batches=200)
        assert [r["shape"] for r in rows] == ["ring", "grid", "cluster"]

    def test_grid_beats_ring_at_five(self):
        rows = {r["shape"]: r for r in run_shapes([("ring", 5), ("grid", 5)], batches=500)}
        assert rows["grid"]["throughput_hz"] > rows["ring"]["throughput_hz"]


class TestStats:
    def test_report(self):
        r = statistics_report()
        assert r["mean_bandwidth_mbps"] == pytest.approx(4.766, rel=0.01)
        assert r["cluster_coefficient"] == pytest.approx(0.587, rel=0.01)
        assert r["largest_cluster_fraction"] == pytest.approx({"10": 1.0, "50": 1.0})

    def test_cli_output(self, capsys):
        assert cli.main(["stats"]) == 0
        out = capsys.readouterr().out
        assert "4.766" in out and "0.586" in out
        assert "N=10" in out and "N=50" in out and "1.000000" in out


class TestCli:
    def test_partition_and_place(self, tmp_path, capsys):
        assert cli.main(["partition", "resnet50_like", "--capacity-mb", "64", "--out", str(tmp_path / "s.json")]) == 0
        assert cli.main(["gen-comm", "--nodes", "10", "--seed", "2", "--out", str(tmp_path / "c.json")]) == 0
        assert cli.main(["place", str(tmp_path / "s.json"), str(tmp_path / "c.json"), "--out", str(tmp_path / "p.json")]) == 0
        report = json.loads((tmp_path / "p.json").read_text())
        assert report["latency"]["beta_s"] >= report["latency"]["bound_s"]
        assert len(report["placement"]["nodes"]) == 4

    def test_partition_report_to_stdout(self, capsys):
        assert cli.main(["partition", str(fixture_path("diamond")), "--capacity-mb", "1"]) == 0
        data = json.loads(capsys.readouterr().out)
        assert data["candidate_points"] == ["a", "d"]

    def test_unpartitionable_exit_code(self):
        assert cli.main(["partition", "nasnet_like", "--capacity-mb", "64"]) == cli.EXIT_INFEASIBLE

    def test_infeasible_capacity(self):
        assert cli.main(["partition", "resnet50_like", "--capacity-mb", "1"]) == cli.EXIT_INFEASIBLE

    def test_parse_error(self, tmp_path):
        (tmp_path / "bad.json").write_text("{")
        assert cli.main(["partition", str(tmp_path / "bad.json"), "--capacity-mb", "64"]) == cli.EXIT_PARSE

    def test_invalid_model(self, tmp_path):
        data = {"format": "edgeslice-model/1", "name": "x",
                "layers": [{"id": v, "output_elements": 1, "memory_bytes": 1} for v in "ab"],
                "edges": [{"from": "a", "to": "b"}, {"from": "b", "to": "a"}]}
        (tmp_path / "m.json").write_text(json.dumps(data))
        assert cli.main(["partition", str(tmp_path / "m.json"), "--capacity-mb", "64"]) == cli.EXIT_INVALID_MODEL

    def test_zero_link_comm_file_rejected(self, tmp_path):
        assert cli.main(["partition", "resnet50_like", "--capacity-mb", "64", "--out", str(tmp_path / "s.json")]) == 0
        bw = np.zeros((6, 6))
        bw[:3, :3] = bw[3:, 3:] = 5.0
        np.fill_diagonal(bw, 0)
        (tmp_path / "c.json").write_text(json.dumps(CommGraph(np.zeros((6, 2)), bw).to_dict()))
        assert cli.main(["place", str(tmp_path / "s.json"), str(tmp_path / "c.json")]) == cli.EXIT_PARSE

    def test_matching_failure_exit_code(self, tmp_path, monkeypatch):
        assert cli.main(["partition", "resnet50_like", "--capacity-mb", "64", "--out", str(tmp_path / "s.json")]) == 0
        assert cli.main(["gen-comm", "--nodes", "6", "--out", str(tmp_path / "c.json")]) == 0

        def fail(*args, **kwargs):
            raise MatchingError(1, 0, 2)

        monkeypatch.setattr(cli, "place_with_retry", fail)
        assert cli.main(["place", str(tmp_path / "s.json"), str(tmp_path / "c.json")]) == cli.EXIT_MATCHING

    def test_oracle_guard(self, tmp_path):
        assert cli.main(["gen-comm", "--nodes", "12", "--out", str(tmp_path / "c.json")]) == 0
        assert cli.main(["oracle", "chain", str(tmp_path / "c.json"), "--capacity-mb", "1"]) == cli.EXIT_TOO_LARGE

    def test_oracle_small(self, tmp_path, capsys):
        assert cli.main(["gen-comm", "--nodes", "5", "--shape", "ring", "--out", str(tmp_path / "c.json")]) == 0
        assert cli.main(["oracle", "chain", str(tmp_path / "c.json"), "--capacity-mb", "1"]) == 0
        assert json.loads(capsys.readouterr().out)["latency"]["ratio"] >= 1

    def test_sweep_and_shapes(self, tmp_path, capsys):
        args = ["sweep", "--out", str(tmp_path / "sw"), "--model", "resnet50_like", "--nodes", "5",
                "--classes", "2", "--capacity-mb", "64", "--trials", "2", "--seed", "1"]
        assert cli.main(args) == 0
        assert len(read_csv(tmp_path / "sw" / "rows.csv")) == 6
        assert cli.main(["shapes", "--nodes", "5", "--batches", "100", "--out", str(tmp_path / "sh.csv")]) == 0
        assert len(read_csv(tmp_path / "sh.csv")) == 3

    def test_usage_error(self):
        with pytest.raises(SystemExit) as err:
            cli.main(["partition"])
        assert err.value.code == cli.EXIT_PARSE
