"""Settings, configuration resolution, report rendering and the entry point."""

import argparse
from fractions import Fraction

import pytest

import main
from cli import RunConfig, load_settings, resolve_config, run, save_settings
from cli.report import format_value, render, to_csv, to_human, to_text
from cli.settings import CATALOG_ENV, DEFAULT_SETTINGS
from core.checks import CheckRecord, CheckStatus, VerifyReport
from core.corollaries import CONJECTURE_BANNER


def _report():
    report = VerifyReport("sample")
    report.add(CheckRecord("cor:4.1", "(1^4,2) n=1 arg=1", 8, 8, CheckStatus.PASS))
    report.add(CheckRecord("cor:4.1", "(1^3,2^2) n=2 arg=4", 58, 58, CheckStatus.ERRATUM,
                           note="printed reading gives 50"))
    report.add(CheckRecord("conj:formula", "(1,2,4^5) m=1", 2, 3, CheckStatus.FAIL, "conjectural"))
    return report


class TestSettings:

    def test_defaults_without_file(self, tmp_path):
        """A missing file gives the defaults."""
        assert load_settings(str(tmp_path / "none.json")) == DEFAULT_SETTINGS

    def test_save_and_load(self, tmp_path):
        """Saved values overlay the defaults."""
        path = str(tmp_path / "s.json")
        save_settings({"format": "csv", "p_max": 50}, path)
        settings = load_settings(path)
        assert settings["format"] == "csv"
        assert settings["p_max"] == 50
        assert settings["lambda_max"] == DEFAULT_SETTINGS["lambda_max"]

    def test_unreadable_file_ignored(self, tmp_path):
        """Malformed JSON falls back to the defaults."""
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        assert load_settings(str(path)) == DEFAULT_SETTINGS


class TestResolveConfig:

    def test_flags_override_settings(self, monkeypatch):
        """Command-line values win over saved settings."""
        monkeypatch.delenv(CATALOG_ENV, raising=False)
        args = argparse.Namespace(command="verify", format="csv", pmax=7, jobs=None, scope="cor:4.1")
        config = resolve_config(args, dict(DEFAULT_SETTINGS, p_max=50, max_concurrent=3))
        assert config.fmt == "csv"
        assert config.p_max == 7
        assert config.max_concurrent == 3
        assert config.scope == "cor:4.1"
        assert config.catalog is None

    def test_catalog_from_environment(self, monkeypatch):
        """The environment supplies the catalog when no flag does."""
        monkeypatch.setenv(CATALOG_ENV, "/tmp/other.txt")
        args = argparse.Namespace(command="expand", catalog=None)
        config = resolve_config(args, dict(DEFAULT_SETTINGS, catalog="/tmp/saved.txt"))
        assert config.catalog == "/tmp/other.txt"

    def test_bad_format(self):
        """An unknown saved format is rejected."""
        args = argparse.Namespace(command="verify")
        with pytest.raises(ValueError):
            resolve_config(args, dict(DEFAULT_SETTINGS, format="xml"))

    def test_quiet_disables_progress(self):
        """-q turns the progress bar off."""
        args = argparse.Namespace(command="verify", quiet=True)
        assert resolve_config(args, dict(DEFAULT_SETTINGS)).progress is False

    def test_zero_upto_kept(self):
        """--upto 0 asks for the constant term only; only a missing flag takes the default."""
        assert resolve_config(argparse.Namespace(command="expand", upto=0), dict(DEFAULT_SETTINGS)).upto == 0
        assert resolve_config(argparse.Namespace(command="expand", upto=None), dict(DEFAULT_SETTINGS)).upto == 20


class TestReport:

    def test_format_value(self):
        """Integral fractions print as integers; sequences in parentheses."""
        assert format_value(Fraction(4, 2)) == "2"
        assert format_value(Fraction(1, 3)) == "1/3"
        assert format_value([Fraction(1, 30), 0]) == "(1/30, 0)"
        assert format_value(None) == "-"

    def test_csv(self):
        """Header plus one line per record."""
        lines = to_csv(_report()).splitlines()
        assert lines[0] == "check_id,inputs,expected,got,status,section,claim,note"
        assert len(lines) == 4
        assert lines[1].startswith('cor:4.1,"(1^4,2) n=1 arg=1",8,8,PASS,proved')

    def test_text(self):
        """Tab-separated key=value fields; empty notes are omitted."""
        lines = to_text(_report()).splitlines()
        assert lines[0].split("\t")[0] == "check_id=cor:4.1"
        assert "note=" not in lines[0]
        assert "note=printed reading gives 50" in lines[1]

    def test_human(self):
        """Sections, the conjecture banner and the overall result."""
        text = to_human(_report())
        assert "[proved]" in text
        assert CONJECTURE_BANNER in text
        assert "ERRATUM" in text
        assert text.rstrip().endswith("result: ok")

    def test_claim_shown(self):
        """A row's lift claim travels into every format."""
        report = VerifyReport("tables")
        report.add(CheckRecord("table:T3", "(1^4,2)", [1], [2], CheckStatus.FAIL, "empirical",
                               claim="character_extension"))
        assert "(character_extension)" in to_human(report)
        assert "claim=character_extension" in to_text(report)
        assert to_csv(report).splitlines()[1].endswith("FAIL,empirical,character_extension,")
        assert to_human(report).rstrip().endswith("result: ok")

    def test_render_dispatch(self):
        """render picks the formatter by name."""
        report = _report()
        assert render(report, "csv") == to_csv(report)
        assert render(report, "text") == to_text(report)
        assert render(report, "human") == to_human(report)


class TestMain:

    def test_expand_theta_product(self, capsys, tmp_path, monkeypatch):
        """expand --qf prints n, r(n)."""
        monkeypatch.setattr("cli.settings.SETTINGS_PATH", str(tmp_path / "s.json"))
        assert main.main(["expand", "--qf", "1^4,2", "--upto", "4"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines == ["0, 1", "1, 8", "2, 26", "3, 48", "4, 72"]

    def test_expand_catalog_form(self, capsys, tmp_path, monkeypatch):
        """Bare E4 means E4@1."""
        monkeypatch.setattr("cli.settings.SETTINGS_PATH", str(tmp_path / "s.json"))
        assert main.main(["expand", "--form", "E4", "--upto", "2"]) == 0
        assert capsys.readouterr().out.splitlines() == ["0, 1", "1, 240", "2, 2160"]

    def test_expand_zero_terms(self, capsys, tmp_path, monkeypatch):
        """--upto 0 prints the constant term alone."""
        monkeypatch.setattr("cli.settings.SETTINGS_PATH", str(tmp_path / "s.json"))
        assert main.main(["expand", "--qf", "1^5", "--upto", "0"]) == 0
        assert capsys.readouterr().out.splitlines() == ["0, 1"]

    def test_expand_to_file(self, tmp_path, monkeypatch):
        """--out writes to a file."""
        monkeypatch.setattr("cli.settings.SETTINGS_PATH", str(tmp_path / "s.json"))
        out = tmp_path / "out.txt"
        assert main.main(["--out", str(out), "expand", "--qf", "1^5", "--upto", "2"]) == 0
        assert out.read_text().splitlines() == ["0, 1", "1, 10", "2, 40"]

    def test_lift_reports_lambdas(self, capsys, tmp_path, monkeypatch):
        """lift solves in the image basis."""
        monkeypatch.setattr("cli.settings.SETTINGS_PATH", str(tmp_path / "s.json"))
        assert main.main(["lift", "--qf", "1^4,2", "--upto", "4"]) == 0
        out = capsys.readouterr().out
        assert "lambda (1/30, 0, -8/15)" in out

    def test_engine_errors_exit_two(self, tmp_path, monkeypatch):
        """Engine failures become exit code 2."""
        monkeypatch.setattr("cli.settings.SETTINGS_PATH", str(tmp_path / "s.json"))
        assert main.main(["lift", "--qf", "1^6,2", "--twist", "1"]) == 2
        assert main.main(["expand", "--form", "nope"]) == 2

    def test_verify_exit_code(self, tmp_path, monkeypatch):
        """A passing scope exits 0."""
        monkeypatch.setattr("cli.settings.SETTINGS_PATH", str(tmp_path / "s.json"))
        out = tmp_path / "report.csv"
        code = main.main(["-q", "--format", "csv", "--out", str(out), "verify", "--scope", "cor:4.2", "--nmax", "3"])
        assert code == 0
        assert out.read_text().startswith("check_id,")

    def test_run_unknown_scope(self):
        """Unknown verification scopes give one ERROR record and exit 1."""
        config = RunConfig(command="verify", scope="bogus", fmt="csv", progress=False)
        assert run(config) == 1
