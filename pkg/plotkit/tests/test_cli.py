"""CLI tests, including an end-to-end pass over real solver artifacts."""

import shutil
import subprocess

import pytest

from plotkit.cli import main


class TestCli:
    def test_conservation_command(self, equilibrium_run, tmp_path, capsys):
        code = main(["conservation", "--run", str(equilibrium_run),
                     "--out", str(tmp_path / "fig")])
        assert code == 0
        printed = capsys.readouterr().out.strip()
        assert printed.endswith("_conservation.png")

    def test_snapshots_command_with_field(self, equilibrium_run, tmp_path):
        code = main(["snapshots", "--run", str(equilibrium_run), "--field", "mach",
                     "--out", str(tmp_path / "fig"), "--format", "svg"])
        assert code == 0
        assert (tmp_path / "fig_mach.svg").exists()

    def test_convergence_command(self, sweep_dir, tmp_path):
        code = main(["convergence", "--run", str(sweep_dir), "--out", str(tmp_path / "fig")])
        assert code == 0

    def test_missing_run_dir_fails_cleanly(self, tmp_path, capsys):
        code = main(["conservation", "--run", str(tmp_path / "nope"),
                     "--out", str(tmp_path / "fig")])
        assert code == 1
        assert "run.meta" in capsys.readouterr().err

    def test_unknown_field_rejected_by_parser(self, equilibrium_run, tmp_path):
        with pytest.raises(SystemExit):
            main(["snapshots", "--run", str(equilibrium_run), "--field", "banana",
                  "--out", str(tmp_path / "fig")])


@pytest.mark.skipif(shutil.which("slabflow") is None,
                    reason="solver CLI not installed")
class TestEndToEnd:
    def test_figures_from_real_run(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        out = tmp_path / "run"
        cfg.write_text(
            f"alpha=0.85\norder=2\ndt=0.01\nt_final=0.05\n"
            f"resolution=8\nsnapshots=0,0.05\nout_dir={out}\n"
        )
        proc = subprocess.run(["slabflow", "solve", "--config", str(cfg)],
                              capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
        for args in (["conservation", "--run", str(out), "--out", str(tmp_path / "f")],
                     ["snapshots", "--run", str(out), "--field", "pressure",
                      "--out", str(tmp_path / "f")],
                     ["snapshots", "--run", str(out), "--field", "flowmap",
                      "--out", str(tmp_path / "f")]):
            assert main(args) == 0
        assert (tmp_path / "f_conservation.png").exists()
        assert (tmp_path / "f_pressure.png").exists()
        assert (tmp_path / "f_flowmap.png").exists()
