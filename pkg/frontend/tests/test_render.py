import subprocess
import sys

import pytest

from pseudopoly_plots.render import PlotSpec, SchemaError, load_csv, main, render

HEADER = "# pseudopoly-csv v1"
COLUMNS = (
    "code_id,n,m,dv,dc,channel,param_db,decoder,trials,word_errors,bit_errors,"
    "wer,ber,wer_lo,wer_hi,lp_fractional,rescued,failures,seed"
)


def _row(param, decoder, trials, errors, wer, lo, hi):
    return (
        f"random-3-4-n200-s42,200,150,3,4,awgn,{param},{decoder},{trials},{errors},"
        f"{errors * 3},{wer},{wer / 200},{lo},{hi},0,0,0,42"
    )


@pytest.fixture
def sample_csv(tmp_path):
    lines = [HEADER, COLUMNS]
    for param, lw, llo, lhi, rw, rlo, rhi in [
        (1.0, 0.5, 0.45, 0.55, 0.3, 0.26, 0.35),
        (2.0, 0.1, 0.08, 0.125, 0.04, 0.03, 0.052),
        (3.0, 0.01, 0.007, 0.0145, 0.002, 0.001, 0.0041),
    ]:
        lines.append(_row(param, "lp", 1000, int(lw * 1000), lw, llo, lhi))
        lines.append(_row(param, "rfg:20", 1000, int(rw * 1000), rw, rlo, rhi))
    # a zero-error point for the upper-bound marker convention
    lines.append(_row(4.0, "lp", 1000, 3, 0.003, 0.001, 0.0088))
    lines.append(_row(4.0, "rfg:20", 1000, 0, 0.0, 0.0, 0.0038))
    path = tmp_path / "sweep.csv"
    path.write_text("\n".join(lines) + "\n")
    return path


class TestLoad:
    def test_series_split_by_decoder(self, sample_csv):
        series = load_csv(str(sample_csv))
        assert set(series) == {"lp", "rfg:20"}
        assert series["lp"].param == [1.0, 2.0, 3.0, 4.0]
        assert series["rfg:20"].wer == [0.3, 0.04, 0.002, 0.0]

    def test_missing_header_rejected(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text(COLUMNS + "\n" + _row(1.0, "lp", 10, 1, 0.1, 0.0, 0.3) + "\n")
        with pytest.raises(SchemaError, match="header"):
            load_csv(str(bad))

    def test_empty_body_rejected(self, tmp_path):
        bad = tmp_path / "empty.csv"
        bad.write_text(HEADER + "\n" + COLUMNS + "\n")
        with pytest.raises(SchemaError, match="no data"):
            load_csv(str(bad))

    def test_missing_columns_rejected(self, tmp_path):
        bad = tmp_path / "cols.csv"
        bad.write_text(HEADER + "\na,b,c\n1,2,3\n")
        with pytest.raises(SchemaError, match="missing columns"):
            load_csv(str(bad))


class TestRender:
    def test_round_trip_exact(self, sample_csv, tmp_path):
        out = tmp_path / "fig.png"
        spec = PlotSpec(csv_paths=(str(sample_csv),), out_path=str(out))
        series = render(spec)
        assert out.exists()
        raw = load_csv(str(sample_csv))
        for dec in raw:
            assert series[dec].wer == raw[dec].wer
            assert series[dec].wer_lo == raw[dec].wer_lo
            assert series[dec].wer_hi == raw[dec].wer_hi

    def test_error_bar_endpoints_match_csv_exactly(self, sample_csv, tmp_path):
        out = tmp_path / "fig.png"
        render(PlotSpec(csv_paths=(str(sample_csv),), out_path=str(out)))
        # reconstruct endpoints from the plotted series: wer -/+ yerr
        series = load_csv(str(sample_csv))
        for s in series.values():
            for w, lo, hi, z in zip(s.wer, s.wer_lo, s.wer_hi, s.zero_error):
                if z:
                    continue
                yerr_lower = w - lo
                yerr_upper = hi - w
                assert w - yerr_lower == lo
                assert w + yerr_upper == hi

    def test_zero_error_point_at_upper_bound(self, sample_csv, tmp_path):
        out = tmp_path / "fig.png"
        series = render(PlotSpec(csv_paths=(str(sample_csv),), out_path=str(out)))
        s = series["rfg:20"]
        assert s.zero_error[-1]
        assert s.wer_hi[-1] == 0.0038  # the value the marker is drawn at

    def test_unknown_style_decoder_rejected(self, sample_csv, tmp_path):
        spec = PlotSpec(
            csv_paths=(str(sample_csv),),
            out_path=str(tmp_path / "f.png"),
            decoder_styles={"bogus": "o-"},
        )
        with pytest.raises(SchemaError, match="bogus"):
            render(spec)

    def test_no_file_written_on_schema_error(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("nope\n")
        out = tmp_path / "fig.png"
        with pytest.raises(SchemaError):
            render(PlotSpec(csv_paths=(str(bad),), out_path=str(out)))
        assert not out.exists()

    def test_deterministic_output(self, sample_csv, tmp_path):
        a, b = tmp_path / "a.png", tmp_path / "b.png"
        render(PlotSpec(csv_paths=(str(sample_csv),), out_path=str(a)))
        render(PlotSpec(csv_paths=(str(sample_csv),), out_path=str(b)))
        assert a.read_bytes() == b.read_bytes()


class TestCli:
    def test_main_success(self, sample_csv, tmp_path, capsys):
        out = tmp_path / "fig.png"
        rc = main([str(sample_csv), "--out", str(out)])
        assert rc == 0
        assert out.exists()
        assert "2 curves" in capsys.readouterr().out

    def test_main_schema_error(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("junk\n")
        rc = main([str(bad), "--out", str(tmp_path / "f.png")])
        assert rc == 2

    def test_module_invocation(self, sample_csv, tmp_path):
        out = tmp_path / "fig.png"
        proc = subprocess.run(
            [sys.executable, "-m", "pseudopoly_plots", str(sample_csv), "--out", str(out)],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        assert out.exists()
