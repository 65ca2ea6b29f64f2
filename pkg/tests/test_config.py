import dataclasses

import pytest

from freqlab.cli import main
from freqlab.config import (
    PRESETS,
    ExperimentConfig,
    apply_overrides,
    config_to_text,
    default_config,
    parse_config_text,
    preset_config,
    validate,
)
from freqlab.errors import ConfigError


class TestParsing:
    def test_roundtrip_through_text(self):
        cfg = preset_config("desk-toy-ce")
        text = config_to_text(cfg)
        parsed = apply_overrides(ExperimentConfig(), parse_config_text(text))
        assert parsed == cfg

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError, match="unknown key"):
            parse_config_text("learning_rate = 0.1")

    def test_bad_value_type_rejected(self):
        with pytest.raises(ConfigError, match="cannot parse"):
            parse_config_text("epochs = twelve")

    def test_comments_and_blanks_ignored(self):
        values = parse_config_text("# a comment\n\nseed = 3  # trailing\n")
        assert values == {"seed": 3}

    def test_width_lists_accept_dashes_and_commas(self):
        assert parse_config_text("hidden_widths = 400-400-200-100")["hidden_widths"] == (400, 400, 200, 100)
        assert parse_config_text("hidden_widths = 64,32")["hidden_widths"] == (64, 32)

    def test_bool_forms(self):
        assert parse_config_text("svg = true")["svg"] is True
        assert parse_config_text("svg = 0")["svg"] is False

    def test_missing_equals_rejected(self):
        with pytest.raises(ConfigError, match="key = value"):
            parse_config_text("seed 3")


class TestPresets:
    def test_all_presets_validate(self):
        for name in PRESETS:
            cfg = preset_config(name)
            if cfg.experiment == "mnist_pca" and not cfg.synthetic:
                cfg = dataclasses.replace(cfg, synthetic=True)  # fig3 takes file paths at run time
            validate(cfg)

    def test_paper_scale_fig_settings(self):
        fig2 = preset_config("fig2")
        assert fig2.hidden_widths == (400, 400, 200, 100)
        assert fig2.lr == 2e-4 and fig2.init_std == 0.1 and fig2.samples == 201
        fig3 = preset_config("fig3")
        assert fig3.hidden_widths == (400, 200)
        assert fig3.batch_size == 128 and fig3.lr == 1e-5 and fig3.init_std == 0.2
        assert fig3.samples == 10_000
        fig4 = preset_config("fig4")
        assert fig4.hidden_widths == (4000, 800)
        assert fig4.lr == 5e-6 and fig4.lr_halve_every == 10_000
        assert fig4.beta == 10.0 and fig4.init_std == 0.05
        assert fig4.grid_n == 50 and fig4.record_every == 4
        fig5 = preset_config("fig5")
        assert fig5.hidden_widths == (4000, 500, 400)
        assert fig5.lr == 5e-4 and fig5.init_std == 0.02
        assert fig5.grid_n == 1000 and fig5.beta == 10.0

    def test_desk_presets_shrink_only_run_scale(self):
        desk, paper = preset_config("desk-poisson-dnn"), preset_config("fig4")
        assert desk.beta == paper.beta
        assert len(desk.hidden_widths) == len(paper.hidden_widths)
        assert desk.epochs < paper.epochs
        assert max(desk.hidden_widths) < max(paper.hidden_widths)

    def test_unknown_preset(self):
        with pytest.raises(ConfigError):
            preset_config("fig9")


class TestValidation:
    def test_beta_zero_rejected_for_energy_training(self):
        cfg = dataclasses.replace(preset_config("desk-poisson-dnn"), beta=0.0)
        with pytest.raises(ConfigError, match="beta"):
            validate(cfg)

    def test_mnist_requires_dataset_or_synthetic(self):
        cfg = default_config("mnist_pca")
        cfg.hidden_widths = (8,)
        with pytest.raises(ConfigError, match="synthetic"):
            validate(cfg)

    def test_empty_widths_rejected(self):
        cfg = dataclasses.replace(preset_config("desk-toy-ce"), hidden_widths=())
        with pytest.raises(ConfigError):
            validate(cfg)

    def test_bad_denominator_rejected(self):
        cfg = dataclasses.replace(preset_config("desk-toy-ce"), df_denominator="both")
        with pytest.raises(ConfigError):
            validate(cfg)

    def test_unknown_experiment_rejected(self):
        with pytest.raises(ConfigError):
            validate(ExperimentConfig(experiment="lattice_qcd"))


class TestCli:
    def test_config_error_exit_code(self, tmp_path, capsys):
        assert main(["poisson-dnn", "--set", "beta=0", "--out", str(tmp_path)]) == 2
        assert "config error" in capsys.readouterr().err

    def test_unknown_set_key_exit_code(self, tmp_path):
        assert main(["toy-ce", "--set", "bogus=1", "--out", str(tmp_path)]) == 2

    def test_preset_experiment_mismatch(self, tmp_path):
        assert main(["toy-ce", "--preset", "fig4", "--out", str(tmp_path)]) == 2

    def test_divergence_exit_code(self, tmp_path):
        code = main([
            "poisson-dnn", "--out", str(tmp_path),
            "--set", "hidden_widths=16", "--set", "grid_n=16",
            "--set", "epochs=4000", "--set", "lr=100.0", "--set", "init_std=1.0",
        ])
        assert code == 3

    def test_io_error_exit_code(self, tmp_path):
        target = tmp_path / "blocked"
        target.write_text("a file, not a directory")
        code = main(["poisson-direct", "--out", str(target / "sub"), "--set", "grid_n=8"])
        assert code == 4

    def test_successful_run_and_flag_override(self, tmp_path, capsys):
        code = main(["poisson-direct", "--out", str(tmp_path), "--set", "grid_n=8", "--seed", "5"])
        assert code == 0
        assert (tmp_path / "solution.csv").exists()
        snapshot = (tmp_path / "config.txt").read_text()
        assert "seed = 5" in snapshot
        assert "grid_n = 8" in snapshot

    def test_config_file_plus_flag_precedence(self, tmp_path):
        cfg_file = tmp_path / "run.cfg"
        cfg_file.write_text("grid_n = 8\nseed = 1\n")
        out = tmp_path / "out"
        code = main(["poisson-direct", "--config", str(cfg_file), "--seed", "2", "--out", str(out)])
        assert code == 0
        assert "seed = 2" in (out / "config.txt").read_text()

    def test_snapshot_reruns_identically(self, tmp_path):
        out1 = tmp_path / "a"
        assert main(["toy-ce", "--preset", "desk-toy-ce", "--out", str(out1),
                     "--set", "epochs=50", "--set", "record_every=10"]) == 0
        # rerun from the emitted snapshot into a fresh directory
        out2 = tmp_path / "b"
        snapshot = out1 / "config.txt"
        assert main(["toy-ce", "--config", str(snapshot), "--out", str(out2)]) == 0
        assert (out1 / "trace.csv").read_bytes() == (out2 / "trace.csv").read_bytes()
        assert (out1 / "first_passage.csv").read_bytes() == (out2 / "first_passage.csv").read_bytes()

    def test_multi_seed_runs_write_subdirectories(self, tmp_path):
        code = main(["poisson-direct", "--out", str(tmp_path), "--set", "grid_n=8",
                     "--seeds", "2", "--seed", "7"])
        assert code == 0
        assert (tmp_path / "seed7" / "solution.csv").exists()
        assert (tmp_path / "seed8" / "solution.csv").exists()
