import json
import os

import numpy as np
import pytest

from slipscale.cli import CSV_HEADER, ConfigError, parse_config, run


def write_config(tmp_path, name, body):
    path = tmp_path / name
    path.write_text(body, encoding="utf-8")
    return str(path)


class TestParse:
    def test_unknown_command(self, tmp_path):
        path = write_config(tmp_path, "c.txt", "command=frobnicate\n")
        with pytest.raises(ConfigError, match="unknown command"):
            parse_config(path)

    def test_unknown_key(self, tmp_path):
        path = write_config(tmp_path, "c.txt", "command=q-alpha\nalphas=1.0\nwhat=1\n")
        with pytest.raises(ConfigError, match="unknown keys"):
            parse_config(path)

    def test_comments_and_blanks(self, tmp_path):
        path = write_config(tmp_path, "c.txt", "# hi\n\ncommand=q-alpha\nalphas=1.0\n")
        assert parse_config(path)["command"] == "q-alpha"

    def test_missing_file(self):
        with pytest.raises(ConfigError):
            parse_config("/nonexistent/config.txt")


class TestRun:
    def test_empty_gamma_list_exits_2(self, tmp_path):
        path = write_config(
            tmp_path, "c.txt",
            f"command=sweep-gamma\nbc=bc2\nl=1.5\ngammas=\nn=8\noutput_dir={tmp_path}\n",
        )
        assert run(path) == 2

    def test_q_alpha_record(self, tmp_path):
        out = tmp_path / "out"
        path = write_config(
            tmp_path, "c.txt", f"command=q-alpha\nalphas=1.0\noutput_dir={out}\n"
        )
        assert run(path) == 0
        lines = (out / "records.csv").read_text().splitlines()
        assert lines[0] == CSV_HEADER
        row = lines[1].split(",")
        assert float(row[0]) == 1.0           # L column carries alpha
        assert abs(float(row[4]) - 1.0) < 1e-3
        info = json.loads((out / "run.json").read_text())
        assert info["package_version"]

    def test_evaluate_crossing_bands(self, tmp_path):
        out = tmp_path / "out"
        path = write_config(
            tmp_path, "c.txt",
            "command=evaluate-construction\nname=bc2_crossing_bands\n"
            f"l=1.5\ngamma=0.1\nsigma=0.2\nn=64\noutput_dir={out}\n",
        )
        assert run(path) == 0
        row = (out / "records.csv").read_text().splitlines()[1].split(",")
        assert float(row[4]) == pytest.approx(2 * np.sqrt(2) * 0.1 * 0.2, rel=0.03)

    def test_unknown_construction_exits_2(self, tmp_path):
        path = write_config(
            tmp_path, "c.txt",
            f"command=evaluate-construction\nname=nope\nl=1\ngamma=0.1\nn=8\noutput_dir={tmp_path}\n",
        )
        assert run(path) == 2

    def test_boundary_case_and_plot(self, tmp_path):
        out = tmp_path / "out"
        path = write_config(
            tmp_path, "c.txt",
            f"command=boundary-case\ncase=BC1_L1\ngamma=0.1\nalphas=0.5,0.2\nn=16\noutput_dir={out}\n",
        )
        assert run(path) == 0
        lines = (out / "records.csv").read_text().splitlines()
        assert len(lines) == 3

    def test_minimize_deterministic_csv(self, tmp_path):
        body = (
            "command=minimize\nbc=bc2\nl=1.5\ngamma=0.1\nsigma=0.1\nn=8\n"
            "rng_seed=3\noutput_dir={}\n"
        )
        p1 = write_config(tmp_path, "c1.txt", body.format(tmp_path / "o1"))
        p2 = write_config(tmp_path, "c2.txt", body.format(tmp_path / "o2"))
        assert run(p1) == 0
        assert run(p2) == 0
        b1 = (tmp_path / "o1" / "records.csv").read_bytes()
        b2 = (tmp_path / "o2" / "records.csv").read_bytes()
        assert b1 == b2
        assert b"\r" not in b1

    def test_oracle_check(self, tmp_path):
        out = tmp_path / "out"
        path = write_config(
            tmp_path, "c.txt",
            f"command=oracle-check\ninstances=2\nrng_seed=0\noutput_dir={out}\n",
        )
        assert run(path) == 0
        lines = (out / "records.csv").read_text().splitlines()
        assert len(lines) == 3
        assert all(line.split(",")[8] == "true" for line in lines[1:])

    def test_sweep_plot_svg(self, tmp_path):
        out = tmp_path / "out"
        path = write_config(
            tmp_path, "c.txt",
            "command=sweep-gamma\nbc=bc2\nl=2.5\nsigma=0.1\ngammas=0.1,0.2,0.4,0.8\n"
            f"n=8\noutput_dir={out}\nplot=true\n",
        )
        assert run(path) == 0
        assert (out / "plot.svg").exists()
