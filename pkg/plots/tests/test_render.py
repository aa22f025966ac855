import csv
import math

import matplotlib.pyplot as plt
import pytest

from rydplots import PlotJob, SchemaError, render
from rydplots.cli import main as plot_main
from rydplots.render import sig6

SWEEP_HEADER = ["delta_mhz", "gamma_khz", "negativity", "fidelity_psi",
                "residual", "status", "wall_ms"]
TRAJ_HEADER = ["t_ms", "p_psi", "p_phi", "p_upsilon", "p_ground",
               "fidelity_target", "trace"]


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)
    return str(path)


@pytest.fixture
def sweep_csv(tmp_path):
    rows = []
    for d in (0.5, 2.75, 5.0):
        for g in (1.0, 10.0):
            neg = 1.0 - 0.01 * g / d
            rows.append([d, g, repr(neg), repr(neg + 1e-4), "1e-13", "ok",
                         "12.0"])
    return write_csv(tmp_path / "sweep.csv", SWEEP_HEADER, rows)


@pytest.fixture
def traj_csv(tmp_path):
    rows = []
    for k in range(6):
        t = 20.0 * k
        f = 1 - 0.9 * math.exp(-t / 40.0)
        rows.append([t, "nan", "nan", "nan", repr(0.99), repr(f), "1.0"])
    return write_csv(tmp_path / "traj.csv", TRAJ_HEADER, rows)


def texts_of(fig):
    out = []
    for ax in fig.axes:
        out.extend(t.get_text() for t in ax.texts)
    return out


class TestRender:
    def test_heatmap(self, sweep_csv, tmp_path):
        out = tmp_path / "fig2.png"
        fig, text = render(PlotJob(str(sweep_csv), "heatmap", str(out)))
        assert out.exists() and out.stat().st_size > 0
        # annotation must restate the best source cell at 6 significant digits
        best = max((1.0 - 0.01 * g / d) for d in (0.5, 2.75, 5.0)
                   for g in (1.0, 10.0))
        assert text == format(best, ".6g")
        assert text in texts_of(fig)
        plt.close(fig)

    def test_line(self, sweep_csv, tmp_path):
        fig, text = render(PlotJob(str(sweep_csv), "line",
                                   str(tmp_path / "fig3.png")))
        last = 1.0 - 0.01 * 10.0 / 5.0 + 1e-4
        assert text == format(last, ".6g")
        plt.close(fig)

    def test_trajectory_annotates_last_row(self, traj_csv, tmp_path):
        out = tmp_path / "fig4.png"
        fig, text = render(PlotJob(str(traj_csv), "trajectory", str(out)))
        expected = format(1 - 0.9 * math.exp(-100.0 / 40.0), ".6g")
        assert text == expected
        assert text in texts_of(fig)
        assert out.exists()
        plt.close(fig)

    def test_trajectory_skips_all_nan_series(self, traj_csv, tmp_path):
        fig, _ = render(PlotJob(str(traj_csv), "trajectory",
                                str(tmp_path / "t.png")))
        labels = [line.get_label() for ax in fig.axes for line in ax.lines]
        assert "P(psi)" not in labels
        assert "target fidelity" in labels
        plt.close(fig)

    def test_missing_column_named(self, tmp_path):
        bad = write_csv(tmp_path / "bad.csv",
                        ["delta_mhz", "gamma_khz"], [[1.0, 1.0]])
        with pytest.raises(SchemaError, match="negativity"):
            render(PlotJob(bad, "heatmap", str(tmp_path / "x.png")))

    def test_empty_csv(self, tmp_path):
        empty = write_csv(tmp_path / "empty.csv", SWEEP_HEADER, [])
        with pytest.raises(SchemaError, match="no data rows"):
            render(PlotJob(empty, "heatmap", str(tmp_path / "x.png")))

    def test_missing_file(self, tmp_path):
        with pytest.raises(SchemaError, match="not found"):
            render(PlotJob(str(tmp_path / "nope.csv"), "line",
                           str(tmp_path / "x.png")))

    def test_unknown_kind(self, sweep_csv, tmp_path):
        with pytest.raises(ValueError, match="kind"):
            PlotJob(str(sweep_csv), "pie", str(tmp_path / "x.png"))

    def test_sig6_matches_print_format(self):
        assert sig6("0.9990714283") == "0.999071"
        assert sig6("1e-13") == "1e-13"


class TestCli:
    def test_ok(self, traj_csv, tmp_path, capsys):
        out = tmp_path / "out.png"
        assert plot_main(["trajectory", str(traj_csv), "-o", str(out)]) == 0
        assert out.exists()
        assert "annotation" in capsys.readouterr().out

    def test_schema_error_exit_2(self, tmp_path, capsys):
        bad = write_csv(tmp_path / "bad.csv", ["t_ms"], [[0.0]])
        code = plot_main(["trajectory", str(bad), "-o",
                          str(tmp_path / "x.png")])
        assert code == 2
        assert "fidelity_target" in capsys.readouterr().err

    def test_bad_kind_exit_2(self, tmp_path):
        assert plot_main(["pie", "x.csv", "-o", "y.png"]) == 2
