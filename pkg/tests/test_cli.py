"""CLI behavior: stage commands, exit codes, and manifest replay."""

import json

import numpy as np
import pytest

from eegpref.augment import TransformKind, nonlinear_transform
from eegpref.cli import main
from eegpref.dataio import read_canonical_csv
from eegpref.mlp import load_model
from eegpref.smoothing import SmootherConfig, smooth_whittaker

PIPELINE_KNOBS = [
    "--length", "32",
    "--input-dim", "8",
    "--hidden1", "6",
    "--hidden2", "3",
    "--epochs", "2",
    "--boot-mult", "2",
    "--patience", "0",
]


def synth_csv(tmp_path, n=12, seed=5, name="input.csv"):
    path = tmp_path / name
    code = main(
        ["synth", "--n", str(n), "--seed", str(seed), "--length", "32",
         "--out", str(path)]
    )
    assert code == 0
    return path


class TestSynth:
    def test_writes_requested_number_of_signals(self, tmp_path, capsys):
        path = synth_csv(tmp_path, n=9)
        assert "wrote 9 signals" in capsys.readouterr().out
        ds = read_canonical_csv(path)
        assert len(ds) == 9
        assert len(ds.signals[0]) == 32

    def test_same_seed_same_bytes(self, tmp_path):
        a = synth_csv(tmp_path, name="a.csv")
        b = synth_csv(tmp_path, name="b.csv")
        assert a.read_bytes() == b.read_bytes()

    def test_missing_out_is_usage_error(self, capsys):
        assert main(["synth", "--n", "5"]) == 2
        capsys.readouterr()


class TestIngest:
    def test_manifest_to_canonical(self, tmp_path, capsys):
        rng = np.random.default_rng(0)
        lines = ["id,label,file"]
        for i in range(4):
            fname = f"s{i}.txt"
            samples = rng.normal(size=20)
            (tmp_path / fname).write_text(
                "\n".join(repr(float(v)) for v in samples)
            )
            label = "like" if i % 2 == 0 else "dislike"
            lines.append(f"s{i},{label},{fname}")
        manifest = tmp_path / "manifest.csv"
        manifest.write_text("\n".join(lines) + "\n")

        out = tmp_path / "canon.csv"
        code = main(
            ["ingest", "--in", str(manifest), "--out", str(out), "--length", "16"]
        )
        assert code == 0
        ds = read_canonical_csv(out)
        assert len(ds) == 4
        assert all(len(s) == 16 for s in ds)
        capsys.readouterr()


class TestFilter:
    def test_output_is_the_smoothed_component(self, tmp_path, capsys):
        src = synth_csv(tmp_path)
        out = tmp_path / "low.csv"
        code = main(
            ["filter", "--in", str(src), "--out", str(out), "--lambda", "100.0"]
        )
        assert code == 0
        raw = read_canonical_csv(src)
        low = read_canonical_csv(out)
        np.testing.assert_array_equal(
            low.signals[0].samples,
            smooth_whittaker(raw.signals[0].samples, SmootherConfig(100.0)),
        )
        capsys.readouterr()

    def test_normalize_flag_changes_the_component(self, tmp_path, capsys):
        src = synth_csv(tmp_path)
        plain, normed = tmp_path / "plain.csv", tmp_path / "normed.csv"
        assert main(["filter", "--in", str(src), "--out", str(plain)]) == 0
        assert main(
            ["filter", "--in", str(src), "--out", str(normed), "--normalize"]
        ) == 0
        assert plain.read_bytes() != normed.read_bytes()
        capsys.readouterr()


class TestTransform:
    def test_signed_log_applied_rowwise(self, tmp_path, capsys):
        src = synth_csv(tmp_path)
        out = tmp_path / "tr.csv"
        code = main(
            ["transform", "--in", str(src), "--out", str(out),
             "--transform", "signed-log"]
        )
        assert code == 0
        raw = read_canonical_csv(src)
        got = read_canonical_csv(out)
        np.testing.assert_array_equal(
            got.signals[0].samples,
            nonlinear_transform(
                raw.signals[0].samples, TransformKind("signed-log")
            ),
        )
        capsys.readouterr()

    def test_tanh_scale_syntax(self, tmp_path, capsys):
        src = synth_csv(tmp_path)
        out = tmp_path / "tr.csv"
        assert main(
            ["transform", "--in", str(src), "--out", str(out),
             "--transform", "tanh:2.0"]
        ) == 0
        capsys.readouterr()

    def test_unknown_transform_is_usage_error(self, tmp_path, capsys):
        src = synth_csv(tmp_path)
        code = main(
            ["transform", "--in", str(src), "--out", str(tmp_path / "x.csv"),
             "--transform", "wavelet"]
        )
        assert code == 2
        capsys.readouterr()


class TestTrainEval:
    def test_train_then_eval(self, tmp_path, capsys):
        src = synth_csv(tmp_path, n=20)
        model_path = tmp_path / "model.json"
        code = main(
            ["train", "--in", str(src), "--out", str(model_path),
             "--input-dim", "8", "--hidden1", "6", "--hidden2", "3",
             "--epochs", "2", "--patience", "0"]
        )
        assert code == 0
        assert "trained 2 epochs" in capsys.readouterr().out
        model = load_model(model_path)
        assert model.weights[0].shape == (6, 8)

        code = main(["eval", "--model", str(model_path), "--in", str(src)])
        assert code == 0
        metrics = json.loads(capsys.readouterr().out)
        assert metrics["tp"] + metrics["fp"] + metrics["tn"] + metrics["fn"] == 20

    def test_eval_out_writes_file(self, tmp_path, capsys):
        src = synth_csv(tmp_path, n=20)
        model_path = tmp_path / "model.json"
        main(
            ["train", "--in", str(src), "--out", str(model_path),
             "--input-dim", "8", "--hidden1", "6", "--hidden2", "3",
             "--epochs", "1", "--patience", "0"]
        )
        metrics_path = tmp_path / "metrics.json"
        code = main(
            ["eval", "--model", str(model_path), "--in", str(src),
             "--out", str(metrics_path)]
        )
        assert code == 0
        assert "accuracy" in json.loads(metrics_path.read_text())
        capsys.readouterr()

    def test_divergence_is_internal_error(self, tmp_path, capsys, monkeypatch):
        # numeric blowups are exercised at the train() level; here only the
        # DivergenceError -> exit 1 mapping matters
        from eegpref.errors import DivergenceError

        def blow_up(*args, **kwargs):
            raise DivergenceError("non-finite training loss at epoch 0")

        monkeypatch.setattr("eegpref.cli.train", blow_up)
        src = synth_csv(tmp_path, n=20)
        code = main(
            ["train", "--in", str(src), "--out", str(tmp_path / "m.json"),
             "--input-dim", "8", "--hidden1", "6", "--hidden2", "3",
             "--epochs", "2", "--patience", "0"]
        )
        assert code == 1
        assert "error" in capsys.readouterr().err


class TestPlot:
    def test_series_csv_to_svg(self, tmp_path, capsys):
        csv_path = tmp_path / "series.csv"
        csv_path.write_text("series,x,y\na,0.0,1.0\na,1.0,2.0\n")
        out = tmp_path / "fig.svg"
        assert main(["plot", "--in", str(csv_path), "--out", str(out)]) == 0
        assert "<polyline" in out.read_text()
        capsys.readouterr()

    def test_foreign_header_is_usage_error(self, tmp_path, capsys):
        csv_path = tmp_path / "bad.csv"
        csv_path.write_text("time,volts\n0,1\n")
        code = main(
            ["plot", "--in", str(csv_path), "--out", str(tmp_path / "f.svg")]
        )
        assert code == 2
        capsys.readouterr()


class TestPipelineCommand:
    def run_pipeline(self, tmp_path, out_name="out", extra=()):
        src = synth_csv(tmp_path)
        out = tmp_path / out_name
        code = main(
            ["pipeline", "--in", str(src), "--out", str(out), "--seed", "3"]
            + PIPELINE_KNOBS
            + list(extra)
        )
        return code, out

    def test_writes_artifact_set(self, tmp_path, capsys):
        code, out = self.run_pipeline(tmp_path)
        assert code == 0
        names = sorted(p.name for p in out.iterdir())
        assert names == [
            "fig1_signals.csv",
            "fig1_signals.svg",
            "fig2_lowfreq.csv",
            "fig2_lowfreq.svg",
            "fig3_accuracy.csv",
            "fig3_accuracy.svg",
            "lowfreq.csv",
            "model.json",
            "report.json",
            "run-manifest.toml",
        ]
        stdout = capsys.readouterr().out
        assert "baseline: accuracy" in stdout
        assert "full: accuracy" in stdout

    def test_replay_from_manifest_is_byte_identical(self, tmp_path, capsys):
        code, out = self.run_pipeline(tmp_path)
        assert code == 0
        before = {p.name: p.read_bytes() for p in out.iterdir()}
        code = main(["pipeline", "--config", str(out / "run-manifest.toml")])
        assert code == 0
        after = {p.name: p.read_bytes() for p in out.iterdir()}
        assert before == after
        capsys.readouterr()

    def test_flag_overrides_config_file(self, tmp_path, capsys):
        src = synth_csv(tmp_path)
        out = tmp_path / "out"
        cfg = tmp_path / "run.toml"
        cfg.write_text(
            f'input = "{src}"\nout = "{out}"\nlength = 32\n'
            'input-dim = 8\nhidden1 = 6\nhidden2 = 3\n'
            'epochs = 2\nboot-mult = 2\npatience = 0\n'
        )
        code = main(["pipeline", "--config", str(cfg), "--epochs", "3"])
        assert code == 0
        report = json.loads((out / "report.json").read_text())
        assert report["config"]["epochs"] == 3
        assert len(report["arms"][0]["history"]["train_loss"]) == 3
        capsys.readouterr()

    def test_missing_input_is_usage_error_with_no_outputs(self, tmp_path, capsys):
        out = tmp_path / "out"
        code = main(
            ["pipeline", "--in", str(tmp_path / "absent.csv"), "--out", str(out)]
            + PIPELINE_KNOBS
        )
        assert code == 2
        assert not out.exists()
        assert not list(tmp_path.glob(".staging-*"))
        capsys.readouterr()

    def test_input_required_without_config(self, tmp_path, capsys):
        code = main(["pipeline", "--out", str(tmp_path / "out")] + PIPELINE_KNOBS)
        assert code == 2
        assert "input" in capsys.readouterr().err


class TestCompareCommand:
    def test_report_and_manifest_only(self, tmp_path, capsys):
        src = synth_csv(tmp_path)
        out = tmp_path / "cmp"
        code = main(
            ["compare", "--in", str(src), "--out", str(out), "--seed", "3"]
            + PIPELINE_KNOBS
        )
        assert code == 0
        assert sorted(p.name for p in out.iterdir()) == [
            "report.json",
            "run-manifest.toml",
        ]
        report = json.loads((out / "report.json").read_text())
        assert [arm["name"] for arm in report["arms"]] == ["baseline", "full"]
        capsys.readouterr()


class TestUsage:
    def test_no_arguments(self, capsys):
        assert main([]) == 2
        capsys.readouterr()

    def test_unknown_subcommand(self, capsys):
        assert main(["frobnicate"]) == 2
        capsys.readouterr()

    def test_bad_boot_mult_value(self, tmp_path, capsys):
        src = synth_csv(tmp_path)
        code = main(
            ["pipeline", "--in", str(src), "--out", str(tmp_path / "o"),
             "--boot-mult", "0"]
        )
        assert code == 2
        capsys.readouterr()
