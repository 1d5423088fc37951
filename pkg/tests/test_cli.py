"""Tests for configuration parsing and the command-line driver."""

import numpy as np
import pytest

from slabflow.cli import (
    EXIT_CONFIG,
    EXIT_NO_CONVERGENCE,
    EXIT_OK,
    main,
)
from slabflow.config import load_config, parse_config_file
from slabflow.errors import ConfigError


def write_config(tmp_path, text, name="run.cfg"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


class TestConfigParsing:
    def test_defaults_with_alpha(self, tmp_path):
        cfg = load_config(write_config(tmp_path, "alpha=0.85\n"))
        assert cfg.alpha == 0.85
        assert cfg.order == 5
        assert cfg.t_order == 1
        assert cfg.dt == 0.01
        assert cfg.t_final == 7.0
        assert cfg.gamma == 1.4
        assert cfg.rho0 == 1.25
        assert cfg.p_ref == 1.0
        assert cfg.tol == 1e-12
        assert cfg.n_slabs == 700
        assert cfg.p_env == pytest.approx(0.85)

    def test_alpha_required(self, tmp_path):
        with pytest.raises(ConfigError, match="alpha"):
            load_config(write_config(tmp_path, "order=3\n"))

    def test_comments_and_blanks(self, tmp_path):
        path = write_config(tmp_path, "# header\n\nalpha = 1.15  # compression\norder=3\n")
        cfg = load_config(path)
        assert cfg.alpha == 1.15
        assert cfg.order == 3

    def test_flag_overrides_file(self, tmp_path):
        path = write_config(tmp_path, "alpha=0.85\norder=5\n")
        cfg = load_config(path, {"order": 3})
        assert cfg.order == 3
        assert cfg.alpha == 0.85

    def test_unknown_key(self, tmp_path):
        with pytest.raises(ConfigError, match="unknown config key: speed"):
            load_config(write_config(tmp_path, "alpha=1\nspeed=3\n"))

    def test_bad_value_names_key(self, tmp_path):
        with pytest.raises(ConfigError, match="'order'"):
            load_config(write_config(tmp_path, "alpha=1\norder=abc\n"))

    def test_non_integer_step_count(self, tmp_path):
        with pytest.raises(ConfigError, match="dt"):
            load_config(write_config(tmp_path, "alpha=1\ndt=0.03\nt_final=0.10\n"))

    def test_paper_step_count_accepted(self, tmp_path):
        cfg = load_config(write_config(tmp_path, "alpha=1\ndt=0.01\nt_final=7.0\n"))
        assert cfg.n_slabs == 700

    def test_snapshot_bounds(self, tmp_path):
        with pytest.raises(ConfigError, match="snapshots"):
            load_config(write_config(tmp_path, "alpha=1\nt_final=1.0\nsnapshots=0.5,2.0\n"))

    def test_snapshot_list(self, tmp_path):
        cfg = load_config(write_config(tmp_path, "alpha=1\nsnapshots=0.5, 1.0, 2\n"))
        assert cfg.snapshots == (0.5, 1.0, 2.0)

    def test_positivity(self, tmp_path):
        with pytest.raises(ConfigError, match="'dt'"):
            load_config(write_config(tmp_path, "alpha=1\ndt=-0.01\n"))

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="cannot read"):
            parse_config_file(str(tmp_path / "absent.cfg"))


TINY = "alpha={alpha}\norder=2\ndt=0.01\nt_final=0.05\nresolution=5\nout_dir={out}\n"


class TestSolveCommand:
    def test_equilibrium_run_artifacts(self, tmp_path):
        out = tmp_path / "eq"
        cfg_path = write_config(tmp_path, TINY.format(alpha=1.0, out=out))
        code = main(["solve", "--config", cfg_path, "--snapshots", "0,0.05"])
        assert code == EXIT_OK
        inv = (out / "invariants.csv").read_text().splitlines()
        assert inv[0] == "t,px,py,L,mass,E_kin,E_int,E_tot,picard_iters"
        assert len(inv) == 7  # header + t0 + 5 slabs
        # equilibrium: every row equals row 0 apart from time and iters
        rows = [line.split(",") for line in inv[1:]]
        for row in rows[1:]:
            for a, b in zip(row[1:8], rows[0][1:8]):
                assert float(a) == pytest.approx(float(b), abs=1e-13)
        assert (out / "snap_0.csv").exists()
        assert (out / "snap_0.05.csv").exists()
        meta = (out / "run.meta").read_text()
        assert "alpha=1" in meta
        assert "status=ok" in meta
        assert "n_slabs=5" in meta

    def test_csv_roundtrip_17_digits(self, tmp_path):
        out = tmp_path / "exp"
        cfg_path = write_config(tmp_path, TINY.format(alpha=0.85, out=out))
        assert main(["solve", "--config", cfg_path]) == EXIT_OK
        from slabflow import MaterialLaw, SlabOperators, SlabSpace, SolverConfig, time_stack
        from slabflow.assembly import initial_conditions
        from slabflow.diagnostics import InvariantTracker

        space = SlabSpace(2, 1, dt=0.01)
        law = MaterialLaw(rho0=1.25, gamma=1.4, p_ref=1.0, p_env=0.85)
        ops = SlabOperators(space, law)
        state0 = initial_conditions(space)
        tracker = InvariantTracker(space, law, *state0)
        for r in time_stack(ops, SolverConfig(), n_slabs=5, state0=state0):
            tracker.push(r)
        lines = (out / "invariants.csv").read_text().splitlines()[1:]
        for line, rec in zip(lines, tracker.records):
            vals = line.split(",")
            assert float(vals[5]) == rec.e_kin  # exact round trip
            assert float(vals[7]) == rec.e_tot
            assert int(vals[8]) == rec.picard_iters

    def test_runs_are_deterministic(self, tmp_path):
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        cfg_a = write_config(tmp_path, TINY.format(alpha=0.85, out=out_a), "a.cfg")
        cfg_b = write_config(tmp_path, TINY.format(alpha=0.85, out=out_b), "b.cfg")
        assert main(["solve", "--config", cfg_a]) == EXIT_OK
        assert main(["solve", "--config", cfg_b]) == EXIT_OK
        assert (out_a / "invariants.csv").read_bytes() == (out_b / "invariants.csv").read_bytes()

    def test_config_error_exit_code(self, tmp_path):
        cfg_path = write_config(tmp_path, "order=3\n")  # alpha missing
        assert main(["solve", "--config", cfg_path]) == EXIT_CONFIG

    def test_nonconvergence_exit_code_and_partial_output(self, tmp_path):
        out = tmp_path / "bad"
        cfg_path = write_config(
            tmp_path, TINY.format(alpha=0.85, out=out) + "max_picard=1\n"
        )
        assert main(["solve", "--config", cfg_path]) == EXIT_NO_CONVERGENCE
        # header flushed before the failure
        inv = (out / "invariants.csv").read_text().splitlines()
        assert inv[0].startswith("t,px")
        assert "status=failed" in (out / "run.meta").read_text()

    def test_override_flags(self, tmp_path):
        out = tmp_path / "o"
        cfg_path = write_config(tmp_path, TINY.format(alpha=0.85, out=out))
        code = main(["solve", "--config", cfg_path, "--alpha", "1.0",
                     "--t-final", "0.02", "--out", str(tmp_path / "o2")])
        assert code == EXIT_OK
        meta = (tmp_path / "o2" / "run.meta").read_text()
        assert "alpha=1\n" in meta
        assert "n_slabs=2" in meta


class TestExitCodeMapping:
    def test_inverted_element_maps_to_4(self, tmp_path, monkeypatch):
        import slabflow.cli as cli
        from slabflow.errors import InvertedElementError

        def boom(cfg, boundary_collector=None):
            raise InvertedElementError("element inverted", slab=3)

        monkeypatch.setattr(cli, "run", boom)
        cfg_path = write_config(tmp_path, "alpha=0.85\n")
        assert cli.main(["solve", "--config", cfg_path]) == 4

    def test_io_error_maps_to_5(self, tmp_path, monkeypatch):
        import slabflow.cli as cli

        def boom(cfg, boundary_collector=None):
            raise OSError("disk full")

        monkeypatch.setattr(cli, "run", boom)
        cfg_path = write_config(tmp_path, "alpha=0.85\n")
        assert cli.main(["solve", "--config", cfg_path]) == 5


class TestSweepCommand:
    def test_two_order_sweep(self, tmp_path):
        out = tmp_path / "sw"
        cfg_path = write_config(
            tmp_path,
            f"alpha=0.85\ndt=0.01\nt_final=0.03\nresolution=4\nout_dir={out}\nsnapshots=0.03\n",
        )
        assert main(["sweep", "--config", cfg_path, "--orders", "2,3"]) == EXIT_OK
        assert (out / "order_2" / "invariants.csv").exists()
        assert (out / "order_3" / "invariants.csv").exists()
        conv = (out / "convergence.csv").read_text().splitlines()
        assert conv[0] == "t,order_lo,order_hi,max_boundary_diff"
        assert len(conv) == 2
        t, lo, hi, diff = conv[1].split(",")
        assert (int(lo), int(hi)) == (2, 3)
        assert float(diff) > 0

    def test_identical_orders_zero_difference(self, tmp_path):
        out = tmp_path / "sw2"
        cfg_path = write_config(
            tmp_path,
            f"alpha=0.85\ndt=0.01\nt_final=0.02\nresolution=4\nout_dir={out}\n",
        )
        assert main(["sweep", "--config", cfg_path, "--orders", "3,3"]) == EXIT_OK
        conv = (out / "convergence.csv").read_text().splitlines()
        assert float(conv[1].split(",")[3]) == 0.0

    def test_single_order_no_pairs(self, tmp_path):
        out = tmp_path / "sw3"
        cfg_path = write_config(
            tmp_path, f"alpha=1.0\ndt=0.01\nt_final=0.02\nresolution=4\nout_dir={out}\n"
        )
        assert main(["sweep", "--config", cfg_path, "--orders", "2"]) == EXIT_OK
        conv = (out / "convergence.csv").read_text().splitlines()
        assert len(conv) == 1  # header only
