import numpy as np
import pytest

from pseudopoly.cli import main
from pseudopoly.codes import from_alist, random_regular, to_alist
from pseudopoly.decoders import write_llr

ADVERSARIAL_HAMMING_LLR = [0.581, 0.365, 0.294, 0.028, 0.547, -0.736, -0.163]


@pytest.fixture
def hamming_alist_file(tmp_path, hamming):
    path = tmp_path / "hamming.alist"
    path.write_text(to_alist(hamming))
    return path


def _llr_file(tmp_path, values, name="g.llr"):
    path = tmp_path / name
    with open(path, "w") as fh:
        write_llr(np.asarray(values, dtype=float), fh)
    return path


class TestGen:
    def test_writes_alist(self, tmp_path, capsys):
        out = tmp_path / "c.alist"
        rc = main(["gen", "--n", "8", "--dv", "3", "--dc", "4", "--seed", "1", "--out", str(out)])
        assert rc == 0
        H = from_alist(out.read_text())
        assert (H.n, H.m) == (8, 6)

    def test_divisibility_exit_2(self, tmp_path, capsys):
        rc = main(["gen", "--n", "7", "--dv", "3", "--dc", "4", "--out", str(tmp_path / "x")])
        assert rc == 2
        assert "divisible" in capsys.readouterr().err

    def test_identical_invocations_identical_files(self, tmp_path):
        a, b = tmp_path / "a.alist", tmp_path / "b.alist"
        main(["gen", "--n", "8", "--dv", "3", "--dc", "4", "--seed", "5", "--out", str(a)])
        main(["gen", "--n", "8", "--dv", "3", "--dc", "4", "--seed", "5", "--out", str(b)])
        assert a.read_bytes() == b.read_bytes()

    def test_unknown_flag_exit_2(self, tmp_path):
        with pytest.raises(SystemExit) as exc:
            main(["gen", "--n", "8", "--dv", "3", "--dc", "4", "--out", "x", "--bogus"])
        assert exc.value.code == 2

    def test_config_echoed_to_stderr(self, tmp_path, capsys):
        main(["gen", "--n", "8", "--dv", "3", "--dc", "4", "--out", str(tmp_path / "c")])
        err = capsys.readouterr().err
        assert "gen:" in err and "seed=0" in err


class TestDecode:
    def test_positive_llr_integral_exit_0(self, tmp_path, capsys, hamming_alist_file):
        llr_path = _llr_file(tmp_path, np.ones(7))
        rc = main(["decode", "--code", str(hamming_alist_file), "--llr", str(llr_path)])
        out = capsys.readouterr().out
        assert rc == 0
        assert "status=integral" in out
        assert "point=0 0 0 0 0 0 0" in out

    def test_adversarial_lp_fractional_exit_3(self, tmp_path, capsys, hamming_alist_file):
        llr_path = _llr_file(tmp_path, ADVERSARIAL_HAMMING_LLR)
        rc = main(["decode", "--code", str(hamming_alist_file), "--llr", str(llr_path)])
        assert rc == 3
        assert "status=fractional" in capsys.readouterr().out

    def test_adversarial_efg_recovers_exit_0(self, tmp_path, capsys, hamming_alist_file):
        llr_path = _llr_file(tmp_path, ADVERSARIAL_HAMMING_LLR)
        rc = main(
            ["decode", "--code", str(hamming_alist_file), "--llr", str(llr_path), "--decoder", "efg"]
        )
        assert rc == 0
        assert "status=integral" in capsys.readouterr().out

    def test_missing_file_exit_2(self, tmp_path, capsys):
        rc = main(["decode", "--code", str(tmp_path / "none"), "--llr", str(tmp_path / "none")])
        assert rc == 2

    def test_length_mismatch_exit_2(self, tmp_path, capsys, hamming_alist_file):
        llr_path = _llr_file(tmp_path, np.ones(6))
        rc = main(["decode", "--code", str(hamming_alist_file), "--llr", str(llr_path)])
        assert rc == 2


class TestSweepCommand:
    def test_grid_and_rows(self, tmp_path, capsys):
        out = tmp_path / "sweep.csv"
        rc = main(
            [
                "sweep", "--gen-spec", "8,3,4,4", "--channel", "awgn",
                "--points", "1.0:0.5:4.0", "--trials", "20",
                "--decoders", "lp,rfg:3", "--seed", "2", "--out", str(out),
            ]
        )
        assert rc == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "# pseudopoly-csv v1"
        body = lines[2:]
        assert len(body) == 7 * 2  # 7 grid points x 2 decoders
        params = {line.split(",")[6] for line in body}
        assert params == {"1", "1.5", "2", "2.5", "3", "3.5", "4"}

    def test_byte_identical_repeat(self, tmp_path):
        args = [
            "sweep", "--gen-spec", "8,3,4,4", "--points", "2.0,3.0",
            "--trials", "30", "--decoders", "lp", "--seed", "7",
        ]
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        main(args + ["--out", str(a)])
        main(args + ["--out", str(b)])
        assert a.read_bytes() == b.read_bytes()

    def test_bad_grid_exit_2(self, tmp_path, capsys):
        rc = main(
            ["sweep", "--gen-spec", "8,3,4,4", "--points", "4.0:-1:1.0",
             "--trials", "5", "--decoders", "lp", "--out", str(tmp_path / "x.csv")]
        )
        assert rc == 2


class TestAnalyze:
    def test_constants_mode(self, capsys):
        rc = main(
            ["analyze", "--mode", "constants", "--rate", "0.25", "--dc", "4",
             "--dv", "3", "--alpha", "0.1", "--delta", "0.6"]
        )
        assert rc == 0
        out = dict(
            line.split("=", 1) for line in capsys.readouterr().out.splitlines() if "=" in line
        )
        assert float(out["gamma_cw"]) == pytest.approx(4.0)
        assert float(out["gamma_pc"]) == pytest.approx(3.54)
        assert float(out["c1_threshold"]) == pytest.approx(1.1299435, rel=1e-5)
        assert float(out["rfg_bound"]) == pytest.approx(0.0575, rel=1e-5)

    def test_active_sets_exact(self, tmp_path, capsys):
        code = tmp_path / "c.alist"
        code.write_text(to_alist(random_regular(8, 3, 4, seed=1)))
        rc = main(["analyze", "--mode", "active-sets", "--code", str(code), "--exact"])
        assert rc == 0
        out = capsys.readouterr().out
        assert "predicted_active=32" in out
        assert "all_match=true" in out
        for line in out.splitlines():
            if line.startswith("codeword_") and line.split("=")[0].endswith("_active"):
                assert line.endswith("=32")

    def test_vertices_mode(self, capsys, tmp_path, hamming):
        code = tmp_path / "h.alist"
        code.write_text(to_alist(hamming))
        rc = main(["analyze", "--mode", "vertices", "--code", str(code)])
        assert rc == 0
        out = capsys.readouterr().out
        assert "integral=16" in out
        assert "fractional=80" in out

    def test_expansion_mode(self, capsys, tmp_path):
        code = tmp_path / "c.alist"
        code.write_text(to_alist(random_regular(16, 3, 4, seed=0)))
        rc = main(
            ["analyze", "--mode", "expansion", "--code", str(code),
             "--alpha", "0.0625", "--delta", "0.99"]
        )
        assert rc == 0
        out = capsys.readouterr().out
        assert "holds=true" in out
        assert "certifies=true" in out

    def test_expansion_sampled_labeled(self, capsys, tmp_path):
        code = tmp_path / "c.alist"
        code.write_text(to_alist(random_regular(16, 3, 4, seed=0)))
        rc = main(
            ["analyze", "--mode", "expansion", "--code", str(code),
             "--alpha", "0.125", "--delta", "0.6", "--expansion-mode", "sampled",
             "--trials", "200"]
        )
        assert rc == 0
        assert "certifies=false" in capsys.readouterr().out

    def test_budget_violation_exit_2(self, capsys, tmp_path):
        code = tmp_path / "c.alist"
        code.write_text(to_alist(random_regular(40, 3, 4, seed=0)))
        rc = main(
            ["analyze", "--mode", "expansion", "--code", str(code),
             "--alpha", "0.5", "--delta", "0.6"]
        )
        assert rc == 2

    def test_missing_code_exit_2(self, capsys):
        rc = main(["analyze", "--mode", "vertices"])
        assert rc == 2


class TestVerify:
    def test_verify_passes(self, capsys):
        rc = main(["verify", "--seed", "0"])
        out = capsys.readouterr().out
        assert rc == 0
        assert "result=PASS" in out
        assert "codeword_active_sets_exact=PASS" in out
        assert "local_intersection_bound=PASS" in out
