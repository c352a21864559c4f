"""Tests for the psg command-line interface."""

import json

import pytest

from producer_scrounger.cli import EXIT_DEGENERATE, EXIT_OK, EXIT_USAGE, build_parser, main
from producer_scrounger.export import parse_output


GAMMA0 = 0.25 / (0.5 * 0.7 * 0.5)


class TestParser:
    """Test argument parsing."""

    def test_subcommands(self):
        parsed = build_parser().parse_args(["sweep", "--n", "3", "--gamma-range", "0:1:0.1"])
        assert parsed.command == "sweep"
        assert parsed.n == 3
        assert parsed.gamma_range == "0:1:0.1"
        assert parsed.s is None

    def test_no_command_prints_help(self, capsys):
        assert main([]) == EXIT_OK
        assert "usage: psg" in capsys.readouterr().out

    def test_unknown_flag(self, capsys):
        assert main(["ess", "--colour", "blue"]) == EXIT_USAGE
        assert "Error:" in capsys.readouterr().err

    def test_bad_choice(self):
        assert main(["ess", "--game", "chess"]) == EXIT_USAGE


class TestEss:
    """Test the ess command."""

    def test_all_producer(self, capsys):
        assert main(["ess", "--game", "foraging", "--n", "2", "--s", "0.5", "--gamma", "1"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "AllProducer p★=1 π★=2" in out
        assert "verified: yes" in out
        assert "(agrees)" in out

    def test_degenerate_company(self, capsys):
        code = main([
            "ess", "--game", "company", "--utility", "linear",
            "--s", "0.7", "--c", "0.25", "--gamma", repr(GAMMA0),
        ])
        assert code == EXIT_DEGENERATE
        assert "Degenerate" in capsys.readouterr().out

    def test_negative_gamma(self, capsys):
        assert main(["ess", "--gamma=-1"]) == EXIT_USAGE
        assert "Error:" in capsys.readouterr().err

    def test_rejects_gamma_range(self):
        assert main(["ess", "--gamma-range", "0:1:0.1"]) == EXIT_USAGE


class TestSweep:
    """Test the sweep command."""

    def test_zero_step(self, capsys):
        assert main(["sweep", "--gamma-range", "0:3:0"]) == EXIT_USAGE
        assert "Error:" in capsys.readouterr().err

    def test_needs_range(self):
        assert main(["sweep"]) == EXIT_USAGE

    def test_writes_csv(self, tmp_path, capsys):
        out = tmp_path / "sweep.csv"
        code = main(["sweep", "--n", "2", "--s", "0.5", "--gamma-range", "0:5:0.01", "--out", str(out)])
        assert code == EXIT_OK
        table = parse_output(out.read_text(), "csv")
        assert len(table) == 501
        assert table.metadata["config"]["n"] == 2
        assert table.metadata["rc_intervals"]["pi_star"][0]["drop"] == pytest.approx(0.98)
        assert "RC intervals (pi_star): [2.99, 3.01] drop 0.98" in capsys.readouterr().err

    def test_json_to_stdout(self, capsys):
        code = main(["sweep", "--n", "3", "--s", "0.4", "--gamma-range", "0:2:0.1", "--format", "json"])
        assert code == EXIT_OK
        data = json.loads(capsys.readouterr().out)
        assert len(data["rows"]) == 21
        assert data["metadata"]["extrapolated"] is False

    def test_second_axis(self, tmp_path):
        out = tmp_path / "shares.json"
        code = main([
            "sweep", "--n", "4", "--gamma-range", "0:2:0.05",
            "--second-axis", "s:0.2:0.6:0.2", "--out", str(out), "--format", "json",
        ])
        assert code == EXIT_OK
        table = parse_output(out.read_text(), "json")
        assert table.second_name == "s"
        assert len(table.blocks()) == 3
        assert table.metadata["second_axis"]["values"] == pytest.approx([0.2, 0.4, 0.6])
        for block in table.blocks():
            shares = [row.p_star for row in block]
            assert all(b <= a + 1e-9 for a, b in zip(shares, shares[1:]))
        assert table.blocks()[0][-1].p_star == 0.0
        assert table.blocks()[-1][0].p_star == 1.0

    def test_cost_axis_rejected_for_foraging(self, capsys):
        code = main([
            "sweep", "--game", "foraging", "--n", "3", "--s", "0.4",
            "--gamma-range", "0:1:0.5", "--second-axis", "c:0:0.2:0.1",
        ])
        assert code == EXIT_USAGE
        assert "Error:" in capsys.readouterr().err

    def test_modified_game_has_no_rc(self, capsys):
        code = main(["sweep", "--game", "foraging-modified", "--n", "3", "--gamma-range", "0:2:0.1"])
        assert code == EXIT_OK
        out = capsys.readouterr().out
        assert "RC intervals (pi_star): none" in out

    def test_config_file(self, tmp_path, capsys):
        config = tmp_path / "run.json"
        config.write_text(json.dumps({"n": 3, "s": 0.4, "gamma-range": "0:1:0.5", "format": "csv"}))
        assert main(["sweep", "--config", str(config), "--n", "4"]) == EXIT_OK
        table = parse_output(capsys.readouterr().out, "csv")
        assert table.metadata["config"]["n"] == 4
        assert [row.gamma for row in table] == [0.0, 0.5, 1.0]

    def test_bad_config_file(self, tmp_path):
        config = tmp_path / "run.json"
        config.write_text(json.dumps({"colour": "blue"}))
        assert main(["sweep", "--config", str(config)]) == EXIT_USAGE


class TestVerify:
    """Test the verify command."""

    def test_linear_company(self, capsys):
        code = main(["verify", "--game", "company", "--utility", "linear", "--s", "0.7", "--c", "0.25"])
        out = capsys.readouterr().out
        assert "RC intervals: none" in out
        assert code == EXIT_OK

    def test_modified_foraging(self, capsys):
        code = main(["verify", "--game", "foraging-modified", "--n", "3", "--s", "0.5", "--gamma-range", "0:2:0.05"])
        assert code == EXIT_OK
        assert "properties passed" in capsys.readouterr().out
