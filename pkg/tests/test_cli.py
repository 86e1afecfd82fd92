"""Command-line interface, exercised in process through main()."""

import json

import numpy as np
import pytest

from tsrecon.cli import main
from tsrecon.io import read_mask_csv, read_series_csv
from tsrecon.models import TrainConfig, load_model
from tsrecon.series import WindowConfig, fill_nearest_mean
from tsrecon.synthetic import RandomSeqConfig, generate_random_sequence

FAST_FLAGS = ["--epochs", "2", "--batch-size", "16", "--hidden-dense", "6",
              "--k-back", "2", "--k-fwd", "2"]


def run(argv):
    return main([str(a) for a in argv])


def write_clean(tmp_path, n=40, seed=3):
    path = tmp_path / "clean.csv"
    assert run(["generate", "--kind", "random", "--n", n, "--seed", seed,
                "--uniform-r", "--sort-by-r", "--out", path]) == 0
    return path


def write_corrupted(tmp_path, rho=0.2, seed=5):
    clean = write_clean(tmp_path)
    data = tmp_path / "corrupted.csv"
    mask = tmp_path / "mask.csv"
    assert run(["corrupt", "--data", clean, "--rho", rho, "--seed", seed,
                "--out", data, "--mask-out", mask]) == 0
    return clean, data, mask


class TestParsing:
    def test_help_exits_zero(self, capsys):
        with pytest.raises(SystemExit) as info:
            run(["--help"])
        assert info.value.code == 0
        assert "generate" in capsys.readouterr().out

    def test_missing_command_is_usage_error(self, capsys):
        assert run([]) == 1
        assert "error:" in capsys.readouterr().err

    def test_unknown_flag_is_usage_error(self, capsys):
        assert run(["generate", "--bogus", "1"]) == 1
        assert "error:" in capsys.readouterr().err

    def test_unknown_method_is_usage_error(self, tmp_path, capsys):
        clean = write_clean(tmp_path)
        code = run(["train", "--method", "MLP", "--data", clean,
                    "--out", tmp_path / "m.tsrm"])
        assert code == 1


class TestGenerate:
    def test_writes_series_and_echo(self, tmp_path):
        out = tmp_path / "series.csv"
        assert run(["generate", "--kind", "random", "--n", 25, "--seed", 7,
                    "--out", out]) == 0
        series = read_series_csv(out)
        expected = generate_random_sequence(RandomSeqConfig(n=25, seed=7))
        np.testing.assert_array_equal(series.values, expected.values)
        echo = json.loads((tmp_path / "series.csv.config.json").read_text())
        assert echo["command"] == "generate"
        assert echo["kind"] == "random"
        assert echo["n"] == 25
        assert echo["seed"] == 7

    def test_runs_are_byte_identical(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for out in (a, b):
            assert run(["generate", "--kind", "random", "--n", 30,
                        "--seed", 1, "--out", out]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_power_kind_writes_three_channels(self, tmp_path):
        out = tmp_path / "power.csv"
        assert run(["generate", "--kind", "power", "--days", 1,
                    "--samples-per-day", 48, "--out", out]) == 0
        assert out.read_text().splitlines()[0] == "t,P_a,P_b,P_c"

    def test_missing_kind_is_config_error(self, tmp_path, capsys):
        assert run(["generate", "--out", tmp_path / "x.csv"]) == 1
        assert "kind" in capsys.readouterr().err

    def test_config_file_supplies_settings(self, tmp_path):
        cfg = tmp_path / "gen.json"
        cfg.write_text(json.dumps(
            {"kind": "random", "n": 20, "seed": 9, "out": str(tmp_path / "c.csv")}
        ))
        assert run(["generate", "--config", cfg]) == 0
        assert read_series_csv(tmp_path / "c.csv").values.shape == (20, 1)

    def test_flags_override_config_file(self, tmp_path):
        cfg = tmp_path / "gen.json"
        cfg.write_text(json.dumps({"kind": "random", "n": 20, "seed": 9}))
        out = tmp_path / "c.csv"
        assert run(["generate", "--config", cfg, "--n", 11, "--out", out]) == 0
        assert read_series_csv(out).values.shape == (11, 1)
        echo = json.loads((tmp_path / "c.csv.config.json").read_text())
        assert echo["n"] == 11

    def test_unknown_config_key_rejected(self, tmp_path, capsys):
        cfg = tmp_path / "gen.json"
        cfg.write_text(json.dumps(
            {"kind": "random", "out": str(tmp_path / "c.csv"), "bogus": 1}
        ))
        assert run(["generate", "--config", cfg]) == 1
        assert "bogus" in capsys.readouterr().err

    def test_malformed_config_file_rejected(self, tmp_path, capsys):
        cfg = tmp_path / "gen.json"
        cfg.write_text("{not json")
        assert run(["generate", "--config", cfg]) == 1
        assert "JSON" in capsys.readouterr().err

    def test_wrong_kind_parameter_rejected(self, tmp_path, capsys):
        # days belongs to the power generator, not the random one
        cfg = tmp_path / "gen.json"
        cfg.write_text(json.dumps(
            {"kind": "random", "days": 3, "out": str(tmp_path / "c.csv")}
        ))
        assert run(["generate", "--config", cfg]) == 1


class TestCorrupt:
    def test_writes_consistent_pair(self, tmp_path):
        clean_path, data_path, mask_path = write_corrupted(tmp_path, rho=0.25)
        clean = read_series_csv(clean_path)
        corrupted = read_series_csv(data_path)
        mask = read_mask_csv(mask_path)
        assert mask.corrupted_count == round(0.25 * clean.values.size)
        np.testing.assert_array_equal(corrupted.values[mask.flags], 0.0)
        np.testing.assert_array_equal(
            corrupted.values[~mask.flags], clean.values[~mask.flags]
        )

    def test_missing_rho_is_config_error(self, tmp_path, capsys):
        clean = write_clean(tmp_path)
        assert run(["corrupt", "--data", clean, "--out", tmp_path / "c.csv",
                    "--mask-out", tmp_path / "m.csv"]) == 1
        assert "rho" in capsys.readouterr().err

    def test_out_of_range_rho_is_config_error(self, tmp_path):
        clean = write_clean(tmp_path)
        assert run(["corrupt", "--data", clean, "--rho", 1.5,
                    "--out", tmp_path / "c.csv",
                    "--mask-out", tmp_path / "m.csv"]) == 1

    def test_unreadable_data_is_config_error(self, tmp_path):
        assert run(["corrupt", "--data", tmp_path / "missing.csv",
                    "--rho", 0.2, "--out", tmp_path / "c.csv",
                    "--mask-out", tmp_path / "m.csv"]) == 1


class TestTrainReconstruct:
    def test_interpolation_round_trip(self, tmp_path):
        clean_path, data_path, mask_path = write_corrupted(tmp_path)
        model_path = tmp_path / "im.tsrm"
        assert run(["train", "--method", "IM", "--data", data_path,
                    "--mask", mask_path, "--out", model_path]) == 0
        out_path = tmp_path / "rebuilt.csv"
        assert run(["reconstruct", "--model", model_path, "--data", data_path,
                    "--mask", mask_path, "--out", out_path]) == 0
        rebuilt = read_series_csv(out_path)
        corrupted = read_series_csv(data_path)
        mask = read_mask_csv(mask_path)
        expected = fill_nearest_mean(corrupted.values, mask.flags)
        np.testing.assert_array_equal(rebuilt.values, expected)
        echo = json.loads((tmp_path / "rebuilt.csv.config.json").read_text())
        assert echo["command"] == "reconstruct"

    def test_denoising_round_trip(self, tmp_path):
        clean_path, data_path, mask_path = write_corrupted(tmp_path)
        model_path = tmp_path / "dae.tsrm"
        assert run(["train", "--method", "DAE", "--data", clean_path,
                    "--out", model_path, "--seed", 4, *FAST_FLAGS]) == 0
        model = load_model(model_path)
        assert model.kind.value == "DAE"
        out_path = tmp_path / "rebuilt.csv"
        assert run(["reconstruct", "--model", model_path, "--data", data_path,
                    "--mask", mask_path, "--out", out_path]) == 0
        rebuilt = read_series_csv(out_path)
        corrupted = read_series_csv(data_path)
        mask = read_mask_csv(mask_path)
        np.testing.assert_array_equal(
            rebuilt.values[~mask.flags], corrupted.values[~mask.flags]
        )

    def test_train_echo_holds_resolved_settings(self, tmp_path):
        clean_path, _, _ = write_corrupted(tmp_path)
        model_path = tmp_path / "dae.tsrm"
        assert run(["train", "--method", "DAE", "--data", clean_path,
                    "--out", model_path, "--seed", 4, *FAST_FLAGS]) == 0
        echo = json.loads((tmp_path / "dae.tsrm.config.json").read_text())
        assert echo["method"] == "DAE"
        assert echo["train"]["epochs"] == 2
        assert echo["train"]["window"] == {"k_back": 2, "k_fwd": 2}
        defaults = TrainConfig()
        assert echo["train"]["learning_rate"] == defaults.learning_rate

    def test_mask_flag_rejected_for_clean_trainers(self, tmp_path, capsys):
        clean_path, data_path, mask_path = write_corrupted(tmp_path)
        code = run(["train", "--method", "DAE", "--data", clean_path,
                    "--mask", mask_path, "--out", tmp_path / "m.tsrm"])
        assert code == 1
        assert "mask" in capsys.readouterr().err

    def test_mismatched_mask_is_config_error(self, tmp_path):
        clean_path, data_path, mask_path = write_corrupted(tmp_path)
        other = tmp_path / "short.csv"
        assert run(["generate", "--kind", "random", "--n", 10, "--seed", 1,
                    "--out", other]) == 0
        assert run(["reconstruct", "--model", tmp_path / "m.tsrm",
                    "--data", other, "--mask", mask_path,
                    "--out", tmp_path / "r.csv"]) == 1

    def test_corrupt_model_file_is_runtime_error(self, tmp_path, capsys):
        clean_path, data_path, mask_path = write_corrupted(tmp_path)
        model_path = tmp_path / "broken.tsrm"
        model_path.write_bytes(b"this is not a model file")
        code = run(["reconstruct", "--model", model_path, "--data", data_path,
                    "--mask", mask_path, "--out", tmp_path / "r.csv"])
        assert code == 2
        assert "error:" in capsys.readouterr().err

    def test_window_flags_reach_the_model(self, tmp_path):
        clean_path, _, _ = write_corrupted(tmp_path)
        model_path = tmp_path / "elm.tsrm"
        assert run(["train", "--method", "ELM", "--data", clean_path,
                    "--out", model_path, "--k-back", 3, "--k-fwd", 1,
                    "--elm-hidden", 7, "--seed", 2]) == 0
        model = load_model(model_path)
        assert model.window == WindowConfig(3, 1)
        assert model.params.hidden_W.shape[0] == 7


def bench_config(tmp_path, name="bench.json", **overrides):
    cfg = {
        "out_dir": str(tmp_path / "report"),
        "dataset_kind": "random",
        "dataset": {"n": 40, "seed": 3, "uniform_r": True, "sort_by_r": True},
        "methods": ["IM"],
        "proportions": [0.2, 0.4],
        "repeats": 1,
        "base_seed": 11,
        "plot_rho": 0.2,
    }
    cfg.update(overrides)
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return path


class TestBench:
    def test_report_directory_contents(self, tmp_path):
        cfg = bench_config(tmp_path)
        assert run(["bench", "--config", cfg]) == 0
        report = tmp_path / "report"
        for name in ("table.txt", "table.csv", "cells.csv", "plotdata_IM.csv",
                     "fig_nmse.png", "fig_overlay_IM.png", "config.json"):
            assert (report / name).exists(), name
        assert (report / "fig_nmse.png").read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
        table = (report / "table.csv").read_text().splitlines()
        assert table[0] == "method,0.2,0.4"
        assert table[1].startswith("IM,")
        cells = (report / "cells.csv").read_text().splitlines()
        assert len(cells) == 1 + 2  # one methods x two proportions x one repeat

    def test_echo_omits_per_cell_settings(self, tmp_path):
        cfg = bench_config(tmp_path, train={"epochs": 2})
        assert run(["bench", "--config", cfg]) == 0
        echo = json.loads((tmp_path / "report" / "config.json").read_text())
        assert echo["command"] == "bench"
        assert echo["train"]["epochs"] == 2
        assert "seed" not in echo["train"]
        assert "rho_train" not in echo["train"]

    def test_runs_are_byte_identical(self, tmp_path):
        """The same plan run twice into the same directory must rewrite
        every report file with exactly the same bytes."""
        cfg = bench_config(tmp_path)
        report = tmp_path / "report"
        assert run(["bench", "--config", cfg]) == 0
        first = {p.name: p.read_bytes() for p in report.iterdir()}
        assert run(["bench", "--config", cfg]) == 0
        second = {p.name: p.read_bytes() for p in report.iterdir()}
        assert first == second

    def test_failed_cells_keep_exit_zero(self, tmp_path, capsys):
        cfg = bench_config(tmp_path, proportions=[0.2, 1.0])
        assert run(["bench", "--config", cfg]) == 0
        err = capsys.readouterr().err
        assert "warning: cell IM rho=1" in err
        cells = (tmp_path / "report" / "cells.csv").read_text().splitlines()
        failed = [l for l in cells[1:] if l.split(",")[4] != ""]
        assert len(failed) == 1

    def test_training_seed_cannot_be_pinned(self, tmp_path, capsys):
        cfg = bench_config(tmp_path, train={"seed": 3})
        assert run(["bench", "--config", cfg]) == 1
        assert "seed" in capsys.readouterr().err

    def test_missing_methods_is_config_error(self, tmp_path, capsys):
        cfg = bench_config(tmp_path)
        payload = json.loads(cfg.read_text())
        del payload["methods"]
        cfg.write_text(json.dumps(payload))
        assert run(["bench", "--config", cfg]) == 1
        assert "methods" in capsys.readouterr().err

    def test_flag_overrides_config_proportions(self, tmp_path):
        cfg = bench_config(tmp_path)
        assert run(["bench", "--config", cfg, "--proportions", "0.3",
                    "--plot-rho", "0.3"]) == 0
        table = (tmp_path / "report" / "table.csv").read_text().splitlines()
        assert table[0] == "method,0.3"
