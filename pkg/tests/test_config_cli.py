import json
import math

import numpy as np
import pytest

from wristmrac import cli, mrac, nn
from wristmrac.config import Config
from wristmrac.errors import ConfigError
from wristmrac.loop import TRACE_HEADER, SimTrace, write_trace


class TestConfig:
    def test_defaults(self):
        cfg = Config()
        assert cfg["nn"]["layers"] == [2, 5, 5, 7, 1]
        assert cfg["reference"]["den"] == [1.0, 3.0, 5.0]
        assert cfg["metrics"]["band"] == 0.02

    def test_unknown_key_named(self):
        with pytest.raises(ConfigError, match="stiffness"):
            Config.from_string("[beam]\nstiffness = 3\n")

    def test_unknown_section(self):
        with pytest.raises(ConfigError, match="solver"):
            Config.from_string("[solver]\nx = 1\n")

    def test_bad_value(self):
        with pytest.raises(ConfigError, match="gamma"):
            Config.from_string("[mrac]\ngamma = fast\n")

    def test_round_trip(self):
        cfg = Config.from_string("[mrac]\ngamma = 12.5\n[nn]\nlayers = 2, 4, 1\n[loop]\nonline = yes\n")
        assert cfg["mrac"]["gamma"] == 12.5 and cfg["nn"]["layers"] == [2, 4, 1] and cfg["loop"]["online"]
        again = Config.from_string(cfg.to_string())
        assert again == cfg and again.digest() == cfg.digest()

    def test_digest_tracks_values(self):
        a, b = Config(), Config()
        assert a.digest() == b.digest() and len(a.digest()) == 16
        b.set("nn", "seed", 1)
        assert a.digest() != b.digest()


def run(*argv):
    return cli.main([str(a) for a in argv])


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    out = tmp_path_factory.mktemp("cli")
    assert run("--out", out, "dataset") == 0
    assert run("--out", out, "train") == 0
    assert run("--out", out, "simulate") == 0
    return out


def first_line(path):
    with open(path) as fh:
        return fh.readline()


class TestDataset:
    def test_header_and_rows(self, tmp_path):
        (tmp_path / "c.ini").write_text("[mrac]\nduration = 10\n")
        assert run("--config", tmp_path / "c.ini", "--out", tmp_path, "dataset") == 0
        lines = (tmp_path / "dataset.csv").read_text().splitlines()
        assert lines[0].startswith("# config_digest=")
        assert lines[1] == ",".join(mrac.DATASET_HEADER)
        assert len(lines) - 2 == 10_001

    def test_gamma_zero_constant_theta(self, tmp_path):
        (tmp_path / "c.ini").write_text("[mrac]\ngamma = 0\nduration = 2\n")
        assert run("--config", tmp_path / "c.ini", "--out", tmp_path, "dataset") == 0
        theta = mrac.dataset_arrays(mrac.read_dataset(tmp_path / "dataset.csv"))["theta"]
        assert np.all(theta == theta[0])

    def test_divergence_exit_code(self, tmp_path):
        (tmp_path / "c.ini").write_text("[mrac]\ngamma = 1e12\nduration = 5\n")
        assert run("--config", tmp_path / "c.ini", "--out", tmp_path, "dataset") == 1


class TestTrain:
    def test_report(self, workdir):
        report = json.loads((workdir / "train_report.json").read_text())
        assert report["epochs"] <= 1000
        for key in ("gradient", "training_loss", "validation_loss", "r_value", "mu"):
            assert math.isfinite(report[key])

    def test_same_seed_same_weights(self, workdir, tmp_path):
        assert run("--out", tmp_path, "train", "--dataset", workdir / "dataset.csv") == 0
        assert (tmp_path / "weights.txt").read_bytes() == (workdir / "weights.txt").read_bytes()

    def test_goal_infinite_stops_at_limit(self, workdir, tmp_path):
        # any loss meets an infinite goal, so training stops before its first epoch
        (tmp_path / "c.ini").write_text("[nn]\ngoal_sse = inf\n")
        assert run("--config", tmp_path / "c.ini", "--out", tmp_path, "train", "--dataset", workdir / "dataset.csv") == 0
        report = json.loads((tmp_path / "train_report.json").read_text())
        assert report["stop_reason"] == "goal_sse" and report["epochs"] == 0

    def test_epoch_limit(self, workdir, tmp_path):
        (tmp_path / "c.ini").write_text("[nn]\nmax_epochs = 3\n")
        assert run("--config", tmp_path / "c.ini", "--out", tmp_path, "train", "--dataset", workdir / "dataset.csv") == 0
        report = json.loads((tmp_path / "train_report.json").read_text())
        assert report["stop_reason"] == "max_epochs" and report["epochs"] == 3

    def test_schema_mismatch(self, tmp_path):
        (tmp_path / "dataset.csv").write_text("t,x\n0,1\n")
        assert run("--out", tmp_path, "train") == 2


class TestSimulate:
    def test_four_traces(self, workdir):
        for name in ("radial", "ulnar", "flexion", "extension"):
            lines = (workdir / f"trace_{name}.csv").read_text().splitlines()
            assert lines[1] == ",".join(TRACE_HEADER)
            assert f"direction={name}" in lines[0]
        assert (workdir / "plot_data.csv").exists()

    def test_single_direction(self, workdir, tmp_path):
        assert run("--out", tmp_path, "simulate", "--weights", workdir / "weights.txt", "--direction", "ulnar") == 0
        assert sorted(p.name for p in tmp_path.glob("trace_*.csv")) == ["trace_ulnar.csv"]

    def test_layer_mismatch(self, workdir, tmp_path):
        (tmp_path / "c.ini").write_text("[nn]\nlayers = 2, 3, 1\n")
        assert run("--config", tmp_path / "c.ini", "--out", tmp_path, "simulate", "--weights", workdir / "weights.txt") == 2

    def test_every_output_carries_digest(self, workdir):
        digest = Config().digest()
        for path in workdir.iterdir():
            if path.suffix == ".json":
                assert json.loads(path.read_text())["config_digest"] == digest
            else:
                assert first_line(path).startswith(f"# config_digest={digest}")


class TestEvaluate:
    def test_default_traces(self, workdir, capsys):
        paths = sorted(workdir.glob("trace_*.csv"))
        assert run("evaluate", *paths) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "direction,rmse_m,settling_s,ss_error_m"
        assert len(lines) == 6 and lines[-1].startswith("average,")

    def test_perfect_trace(self, tmp_path, capsys):
        tr = SimTrace.from_signals(np.full(3000, 0.02), 0.02, 0.02)
        write_trace(tr, tmp_path / "p.csv")
        assert run("evaluate", tmp_path / "p.csv") == 0
        row = capsys.readouterr().out.splitlines()[1].split(",")
        assert row[1:] == ["0", "0", "0"]

    def test_unsettled(self, tmp_path, capsys):
        y = np.full(3000, 0.02)
        y[-1] = 0.05
        write_trace(SimTrace.from_signals(y, 0.02, 0.02), tmp_path / "u.csv")
        assert run("evaluate", tmp_path / "u.csv") == 1
        assert "not_settled" in capsys.readouterr().out

    def test_malformed(self, tmp_path, caplog):
        path = tmp_path / "m.csv"
        path.write_text(",".join(TRACE_HEADER) + "\n0,0,0\n")
        assert run("evaluate", path) == 2
        assert "m.csv:2:" in caplog.text

    def test_missing_file(self, tmp_path):
        assert run("evaluate", tmp_path / "nope.csv") == 2


class TestGradcheck:
    def test_default(self, capsys):
        assert run("gradcheck", "--draws", 10) == 0
        assert "pass" in capsys.readouterr().out

    def test_trained_weights(self, workdir):
        assert run("gradcheck", "--weights", workdir / "weights.txt", "--draws", 5) == 0

    def test_nan_weights(self, tmp_path):
        net = nn.Network.initialize((2, 5, 5, 7, 1))
        p = net.params
        p[3] = np.nan
        nn.save_weights(net.with_params(p), tmp_path / "w.txt")
        assert run("gradcheck", "--weights", tmp_path / "w.txt", "--draws", 3) == 1

    def test_linear_net_tight_tolerance(self, tmp_path):
        (tmp_path / "w.txt").write_text("1 1\n1.0\n1.0\n")
        assert run("gradcheck", "--weights", tmp_path / "w.txt", "--tol", "1e-12") == 0


def test_usage_error():
    with pytest.raises(SystemExit) as info:
        cli.main(["frobnicate"])
    assert info.value.code == 2


def test_rerun_is_byte_identical(workdir, tmp_path):
    assert run("--out", tmp_path, "dataset") == 0
    assert run("--out", tmp_path, "train") == 0
    assert run("--out", tmp_path, "simulate") == 0
    for path in workdir.iterdir():
        assert (tmp_path / path.name).read_bytes() == path.read_bytes(), path.name
