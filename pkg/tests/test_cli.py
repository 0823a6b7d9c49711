import csv

import pytest

from isacthz.cli import ability_reference_rows, main, misalign_sweep_rows
from isacthz.config import default_deployment, default_system

SYS = default_system()
DEP = default_deployment()


def _read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


class TestAbilities:
    def test_csv_shape_and_determinism(self, tmp_path):
        out1 = tmp_path / "a1.csv"
        out2 = tmp_path / "a2.csv"
        assert main(["abilities", "--out", str(out1)]) == 0
        assert main(["abilities", "--out", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()
        rows = _read_csv(out1)
        assert rows[0] == ["signal", "U", "V", "B_s", "T_s", "f_c", "d_max_m",
                           "delta_db_m", "delta_v_mps", "vmax_kmh"]
        assert rows[1][0] == "ssb"
        assert len(rows) == 2 + 32  # header + ssb + pilot grid

    def test_grid_covers_reference_values(self):
        rows = ability_reference_rows(SYS, DEP)
        dmax = {round(float(r[6]), 1) for r in rows}
        assert {78.1, 39.1, 26.0} <= dmax


class TestPattern:
    def test_row(self, tmp_path):
        out = tmp_path / "p.csv"
        code = main(["pattern", "--d-max-req", "78.1", "--v-max-req", "19.44",
                     "--out", str(out)])
        assert code == 0
        rows = _read_csv(out)
        body = dict(zip(rows[0], rows[1]))
        assert body["U"] == "1"
        assert body["V"] == "5"
        assert float(body["alpha"]) == pytest.approx(0.3144, abs=1e-3)

    def test_infeasible_exit_code(self, tmp_path):
        code = main(["pattern", "--d-max-req", "1e9", "--v-max-req", "19.44",
                     "--out", str(tmp_path / "p.csv")])
        assert code == 2


class TestMisalign:
    def test_sweep_rows(self):
        rows = misalign_sweep_rows(SYS, DEP, "n_b", ("jsrs", "perfect"))
        assert len(rows) == 10
        for row in rows:
            assert row[3] >= 0.0 and row[5] <= 1.0

    def test_cli(self, tmp_path):
        out = tmp_path / "m.csv"
        code = main(["misalign", "--sweep", "n_rs", "--schemes", "jsrs",
                     "--out", str(out)])
        assert code == 0
        rows = _read_csv(out)
        assert rows[0] == ["sweep_var", "value", "scheme", "p_err", "p_to", "p_ms"]
        assert len(rows) == 8  # header + 7 budget points


class TestCoverage:
    def test_cli(self, tmp_path):
        out = tmp_path / "c.csv"
        code = main(["coverage", "--r1-grid", "20", "--threshold-db-grid", "5",
                     "--schemes", "perfect", "--out", str(out)])
        assert code == 0
        rows = _read_csv(out)
        body = dict(zip(rows[0], rows[1]))
        assert body["scheme"] == "perfect"
        assert 0.0 <= float(body["p_cvp"]) <= 1.0


class TestSimulate:
    def test_blockage(self, tmp_path):
        out = tmp_path / "s.csv"
        code = main(["simulate", "--what", "blockage", "--trials", "20000",
                     "--seed", "3", "--out", str(out), "--strict"])
        assert code == 0
        rows = _read_csv(out)
        body = dict(zip(rows[0], rows[1]))
        assert body["quantity"] == "blockage"
        assert abs(float(body["sigmas_off"])) < 4.0

    def test_determinism(self, tmp_path):
        a, b = tmp_path / "r1.csv", tmp_path / "r2.csv"
        for out in (a, b):
            main(["simulate", "--what", "timeout", "--trials", "20000",
                  "--seed", "9", "--out", str(out)])
        assert a.read_bytes() == b.read_bytes()


class TestCompare:
    def test_report(self, tmp_path):
        out = tmp_path / "report.md"
        code = main(["compare", "--out", str(out)])
        assert code == 0
        text = out.read_text()
        assert "Average misalignment reduction" in text
        assert "jsrs-vs-perfect" in text


class TestConfigErrors:
    def test_bad_config_exit_code(self, tmp_path):
        bad = tmp_path / "bad.cfg"
        bad.write_text("n_b = 2\n")
        assert main(["abilities", "--config", str(bad),
                     "--out", str(tmp_path / "x.csv")]) == 2
