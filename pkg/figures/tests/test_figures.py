import json

import pytest

from figure_scripts import FigureDataError, FigureSpec, load_table, render
from figure_scripts.cli import main

SWEEP_HEADER = "index,t_hot_K,n0,n_photon,f0,p_e,mu_fit,t_fit,converged\n"
PHASE_HEADER = "t_cold_K,t_h_continuum_K,t_h_two_level_K,t_h_numeric_K,converged\n"
CURRENTS_HEADER = ("index,t_hot_K,j_hot,j_cold,work,l_incoherent,eta,"
                   "eta_carnot,sigma,sigma_bath,converged\n")


def write_sweep(path, with_manifest=True, threshold=10500.0):
    rows = [
        "0,8000,0.5,3000,0.0002,0.03,nan,nan,1",
        "1,10000,2.0,6000,0.0004,0.05,nan,nan,1",
        "2,11000,500,9000,0.05,0.06,nan,nan,1",
        "3,12000,5e4,6e4,0.8,0.07,nan,nan,1",
        "4,13000,9e4,1e5,0.9,0.07,nan,nan,0",
    ]
    path.write_text(SWEEP_HEADER + "\n".join(rows) + "\n")
    if with_manifest:
        manifest = {"config_hash": "abc", "code_version": "0.1.0",
                    "timestamp": "t", "scenario": "external",
                    "points": [], "thresholds": {"two_level": threshold}}
        path.with_suffix(".manifest.json").write_text(json.dumps(manifest))
    return path


def write_phase(path):
    rows = ["150,7747.5,4042.1,7756.0,1",
            "300,12239.3,8041.8,12315.6,1",
            "450,17080.5,12035.2,17216.7,1"]
    path.write_text(PHASE_HEADER + "\n".join(rows) + "\n")
    return path


def write_currents(path):
    rows = ["0,9000,1118.8,1114.2,4.5,0,0.004,0.967,27.4,27.4,1",
            "1,12000,2100.0,1200.0,900.0,0,0.43,0.975,55.0,55.0,1",
            "2,15000,3200.0,1100.0,2100.0,0,0.66,0.980,80.1,80.1,1"]
    path.write_text(CURRENTS_HEADER + "\n".join(rows) + "\n")
    return path


class TestLoadTable:
    def test_drops_unconverged(self, tmp_path):
        path = write_sweep(tmp_path / "s.csv")
        table = load_table(path, required=("t_hot_K", "n0"))
        assert len(table["t_hot_K"]) == 4  # last row flagged 0

    def test_missing_column(self, tmp_path):
        path = write_sweep(tmp_path / "s.csv")
        with pytest.raises(FigureDataError, match="bogus"):
            load_table(path, required=("bogus",))

    def test_missing_file(self, tmp_path):
        with pytest.raises(FigureDataError):
            load_table(tmp_path / "none.csv", required=())

    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("")
        with pytest.raises(FigureDataError):
            load_table(path, required=())

    def test_all_rows_unconverged(self, tmp_path):
        path = tmp_path / "s.csv"
        path.write_text(SWEEP_HEADER + "0,8000,1,2,0.1,0.03,nan,nan,0\n")
        with pytest.raises(FigureDataError, match="no converged rows"):
            load_table(path, required=("t_hot_K",))


class TestPumpSweepFigure:
    def test_renders_with_threshold_arrow(self, tmp_path):
        path = write_sweep(tmp_path / "s.csv", threshold=10500.0)
        fig = render(FigureSpec(kind="pump-sweep", inputs=(path,)))
        ax = fig.axes[0]
        assert ax.get_yscale() == "log"
        # arrow annotation drawn as a vertical marker at the analytic value
        vlines = [ln for ln in ax.lines if len(set(ln.get_xdata())) == 1]
        assert any(ln.get_xdata()[0] == pytest.approx(10500.0) for ln in vlines)
        # unconverged row excluded from the plotted series
        data_line = ax.lines[0]
        assert len(data_line.get_xdata()) == 4

    def test_output_file_written(self, tmp_path):
        path = write_sweep(tmp_path / "s.csv")
        out = tmp_path / "fig.png"
        render(FigureSpec(kind="pump-sweep", inputs=(path,), out=str(out)))
        assert out.exists() and out.stat().st_size > 0

    def test_arrows_toggle(self, tmp_path):
        path = write_sweep(tmp_path / "s.csv")
        fig = render(FigureSpec(kind="pump-sweep", inputs=(path,),
                                arrows=False))
        vlines = [ln for ln in fig.axes[0].lines
                  if len(set(ln.get_xdata())) == 1]
        assert not vlines


class TestPhaseDiagramFigure:
    def test_three_series(self, tmp_path):
        path = write_phase(tmp_path / "p.csv")
        fig = render(FigureSpec(kind="phase-diagram", inputs=(path,)))
        labels = [ln.get_label() for ln in fig.axes[0].lines]
        assert len(labels) == 3
        assert any("continuum" in lb for lb in labels)
        assert any("reversible" in lb for lb in labels)
        assert any("numeric" in lb for lb in labels)


class TestCurrentsFigure:
    def test_panels_and_series(self, tmp_path):
        path = write_currents(tmp_path / "c.csv")
        fig = render(FigureSpec(kind="currents", inputs=(path,)))
        assert len(fig.axes) == 3
        # four current/power series over the first two panels
        assert len(fig.axes[0].lines) + len(fig.axes[1].lines) == 4
        labels = [ln.get_label() for ln in fig.axes[2].lines]
        assert any("Carnot" in lb for lb in labels)

    def test_carnot_toggle(self, tmp_path):
        path = write_currents(tmp_path / "c.csv")
        fig = render(FigureSpec(kind="currents", inputs=(path,), carnot=False))
        assert len(fig.axes[2].lines) == 1


class TestCli:
    def test_happy_path(self, tmp_path, capsys):
        path = write_sweep(tmp_path / "s.csv")
        out = tmp_path / "fig.svg"
        assert main(["pump-sweep", "--in", str(path), "--out", str(out)]) == 0
        assert out.exists()
        assert "wrote" in capsys.readouterr().out

    def test_malformed_input_exits_nonzero(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("a,b\n1,not-a-number\n")
        out = tmp_path / "fig.png"
        code = main(["currents", "--in", str(bad), "--out", str(out)])
        assert code == 1
        assert "error" in capsys.readouterr().err
        assert not out.exists()

    def test_missing_input_exits_nonzero(self, tmp_path):
        code = main(["phase-diagram", "--in", str(tmp_path / "none.csv"),
                     "--out", str(tmp_path / "f.png")])
        assert code == 1


def test_invalid_kind_rejected(tmp_path):
    with pytest.raises(FigureDataError):
        FigureSpec(kind="scatter", inputs=("x.csv",))
    with pytest.raises(FigureDataError):
        FigureSpec(kind="currents", inputs=())
