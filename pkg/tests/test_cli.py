import json

import pytest

from minicolumn.cli import main
from minicolumn.experiments import ConfigError, ExperimentConfig


BASE_CONFIG = {
    "seed": 7,
    "encoder": {"type": "category", "universe_size": 256, "active_bits": 12},
    "layer": {"n_columns": 64, "cells_per_column": 4, "n_active": 4},
    "sequences": [{"tokens": ["A", "B", "C"], "repeats": 5}],
}


def write_config(tmp_path, overrides=None, name="config.json"):
    raw = json.loads(json.dumps(BASE_CONFIG))
    if overrides:
        raw.update(overrides)
    path = tmp_path / name
    path.write_text(json.dumps(raw))
    return path


class TestConfigValidation:
    def test_valid_config_parses(self):
        config = ExperimentConfig.from_dict(BASE_CONFIG)
        assert config.seed == 7
        assert config.sequences[0].tokens == ["A", "B", "C"]

    def test_errors_reported_all_at_once(self):
        raw = {
            "seed": "nope",
            "encoder": {"type": "bogus"},
            "layer": {"n_columns": "x"},
            "sequences": [],
            "typo_key": 1,
        }
        with pytest.raises(ConfigError) as err:
            ExperimentConfig.from_dict(raw)
        messages = err.value.errors
        assert len(messages) >= 5
        joined = "\n".join(messages)
        assert "seed" in joined
        assert "encoder.type" in joined
        assert "n_columns" in joined
        assert "sequences" in joined
        assert "typo_key" in joined

    def test_empty_sequences_rejected(self):
        raw = dict(BASE_CONFIG, sequences=[])
        with pytest.raises(ConfigError, match="non-empty"):
            ExperimentConfig.from_dict(raw)

    def test_short_sequence_rejected(self):
        raw = dict(BASE_CONFIG, sequences=[{"tokens": ["A"], "repeats": 1}])
        with pytest.raises(ConfigError):
            ExperimentConfig.from_dict(raw)

    def test_unknown_layer_key_rejected(self):
        raw = json.loads(json.dumps(BASE_CONFIG))
        raw["layer"]["columns"] = 64
        with pytest.raises(ConfigError, match="columns"):
            ExperimentConfig.from_dict(raw)


class TestCapacityCommand:
    def test_prints_published_values(self, capsys):
        assert main(["capacity", "--columns", "2048", "--active", "40", "--cells", "32"]) == 0
        out = capsys.readouterr().out
        assert "2.37178e+84" in out
        assert "1.60694e+60" in out
        assert "3.8113" in out and "e+144" in out


class TestSequenceCommand:
    def test_smoke_run_writes_reports(self, tmp_path, capsys):
        config = write_config(tmp_path)
        out_dir = tmp_path / "out"
        code = main(["sequence", "--config", str(config), "--out", str(out_dir)])
        assert code == 0
        assert (out_dir / "sequence_records.jsonl").exists()
        summary = json.loads((out_dir / "sequence_summary.json").read_text())
        assert "anomaly" in summary
        assert "eval_accuracy" in summary
        record = json.loads(
            (out_dir / "sequence_records.jsonl").read_text().splitlines()[0]
        )
        for field in ("t", "active_columns", "pred_cells", "burst_cells", "anomaly"):
            assert field in record

    def test_seed_reproducibility_byte_identical(self, tmp_path):
        config = write_config(tmp_path)
        outs = []
        for name in ("a", "b"):
            out_dir = tmp_path / name
            main(["sequence", "--config", str(config), "--seed", "3", "--out", str(out_dir)])
            outs.append(
                (out_dir / "sequence_records.jsonl").read_bytes()
                + (out_dir / "sequence_summary.json").read_bytes()
            )
        assert outs[0] == outs[1]

    def test_invalid_config_fails_cleanly(self, tmp_path, capsys):
        config = write_config(tmp_path, {"sequences": []})
        assert main(["sequence", "--config", str(config)]) == 2
        assert "sequences" in capsys.readouterr().err

    def test_snapshot_and_resume(self, tmp_path):
        config = write_config(tmp_path)
        snap = tmp_path / "model.json"
        assert main(["sequence", "--config", str(config), "--snapshot", str(snap)]) == 0
        assert snap.exists()
        assert main(["sequence", "--config", str(config), "--resume", str(snap)]) == 0


class TestAnomalyCommand:
    def test_stream_run(self, tmp_path, capsys):
        config = write_config(tmp_path)
        stream = tmp_path / "stream.txt"
        stream.write_text("\n".join(["A", "B", "C"] * 10) + "\n")
        out_dir = tmp_path / "out"
        assert main(["anomaly", "--config", str(config), "--out", str(out_dir), str(stream)]) == 0
        records = (out_dir / "anomaly_records.jsonl").read_text().splitlines()
        assert len(records) == 30
        assert json.loads(records[0])["anomaly"] == 1.0

    def test_unparseable_scalar_line_reports_number(self, tmp_path, capsys):
        config = write_config(
            tmp_path,
            {
                "encoder": {
                    "type": "scalar",
                    "universe_size": 256,
                    "active_bits": 12,
                    "min_value": 0,
                    "max_value": 1,
                }
            },
        )
        stream = tmp_path / "stream.txt"
        stream.write_text("0.5\n0.6\nbogus\n")
        assert main(["anomaly", "--config", str(config), str(stream)]) == 2
        assert "line 3" in capsys.readouterr().err


class TestPoolCommand:
    def test_pool_run_reports_stability(self, tmp_path, capsys):
        config = write_config(
            tmp_path,
            {
                "pool": {"n_columns": 64, "n_active": 4, "potential_fraction": 1.0},
                "sequences": [{"tokens": ["A", "B", "C", "D"], "repeats": 10}],
                "eval_cycles": 3,
            },
        )
        assert main(["pool", "--config", str(config)]) == 0
        out = capsys.readouterr().out
        assert "stability pooled" in out
        assert "stability l4" in out

    def test_pool_requires_pool_section(self, tmp_path, capsys):
        config = write_config(tmp_path)
        assert main(["pool", "--config", str(config)]) == 2
        assert "pool" in capsys.readouterr().err


class TestInspectCommand:
    def test_inspect_snapshot(self, tmp_path, capsys):
        config = write_config(tmp_path)
        snap = tmp_path / "model.json"
        main(["sequence", "--config", str(config), "--snapshot", str(snap)])
        assert main(["inspect", "--snapshot", str(snap)]) == 0
        out = capsys.readouterr().out
        assert "SequenceModel" in out

    def test_inspect_missing_file(self, tmp_path, capsys):
        assert main(["inspect", "--snapshot", str(tmp_path / "none.json")]) == 2
