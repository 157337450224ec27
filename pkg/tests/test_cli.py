import pytest

from twomode.cli import main, summary_line
from twomode.csvio import read_csv

FOCK = """
[state]
kind = even-fock
n = 1

[envelope]
kind = rising-exponential
bandwidth = 1.0
"""

TRANSPARENT = """
[state]
kind = coherent
nbar_r = 1
nbar_l = 1
phi = pi

[envelope]
kind = rectangular
bandwidth = 2.0
"""


def _write(tmp_path, text, name="run.ini"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_summary_line_formatting():
    assert summary_line(0.99999999, -1e-9) == "p_max=1.000 at t=0.000"
    assert summary_line(-1e-12, -0.0004) == "p_max=0.000 at t=0.000"


def test_simulate_even_fock(tmp_path, capsys):
    out = tmp_path / "p.csv"
    assert main(["simulate", _write(tmp_path, FOCK), "-o", str(out)]) == 0
    assert capsys.readouterr().out.strip() == "p_max=1.000 at t=0.000"
    header, cols = read_csv(out)
    assert list(cols) == ["t_gamma0", "p"]
    assert "kind = even-fock" in header["config"]
    assert out.read_text().splitlines()[header["config"].count("\n") + 2] == "t_gamma0,p"


def test_simulate_transparent(tmp_path, capsys):
    assert main(["simulate", _write(tmp_path, TRANSPARENT), "-o", str(tmp_path / "p.csv")]) == 0
    assert capsys.readouterr().out.startswith("p_max=0.000")


def test_default_output_next_to_cwd(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert main(["simulate", _write(tmp_path, FOCK, "single.ini")]) == 0
    assert (tmp_path / "single_trajectory.csv").exists()


def test_hidden_oracle_flag(tmp_path, capsys):
    assert main(["simulate", _write(tmp_path, FOCK), "-o", str(tmp_path / "p.csv"), "--oracle"]) == 0
    out = capsys.readouterr().out
    assert "oracle sup-norm deviation" in out
    assert float(out.split("deviation=")[1].split()[0]) < 1e-2


def test_oracle_flag_is_hidden(capsys):
    with pytest.raises(SystemExit):
        main(["simulate", "--help"])
    assert "--oracle" not in capsys.readouterr().out


def test_bad_bandwidth_exit_2(tmp_path, capsys):
    assert main(["simulate", _write(tmp_path, FOCK.replace("bandwidth = 1.0", "bandwidth = -1"))]) == 2
    assert "bandwidth" in capsys.readouterr().err


def test_capacity_exit_4(tmp_path, capsys):
    assert main(["simulate", _write(tmp_path, FOCK.replace("n = 1", "n = 13"))]) == 4
    assert "capacity" in capsys.readouterr().err


def test_numerical_exit_3(tmp_path, monkeypatch):
    from twomode import problems
    from twomode.errors import NumericalError

    def boom(self, keep_states=False):
        raise NumericalError("diverged")

    monkeypatch.setattr(problems.Problem, "run", boom)
    assert main(["simulate", _write(tmp_path, FOCK), "-o", str(tmp_path / "p.csv")]) == 3


def test_scan_bandwidth_with_optimum(tmp_path, capsys):
    cfg = FOCK + "[sweep]\nparameter = bandwidth\nvalues = log:0.1:10:5\noptimize = true\n"
    out = tmp_path / "s.csv"
    assert main(["scan", _write(tmp_path, cfg), "-o", str(out)]) == 0
    text = capsys.readouterr().out
    assert text.startswith("p_max=1.000 at t=0.000 (bandwidth=1)")
    assert "optimum bandwidth=1.00" in text
    header, cols = read_csv(out)
    assert list(cols) == ["param", "p_max", "t_at_max"]
    assert "optimum" in header and len(cols["param"]) == 5


@pytest.mark.parametrize("param, values, n", [("nbar_r", "0.5, 1, 2", 3), ("phi", "0, pi/2, pi", 3)])
def test_scan_coherent_axes(tmp_path, param, values, n):
    cfg = TRANSPARENT + f"[sweep]\nparameter = {param}\nvalues = {values}\n"
    out = tmp_path / "s.csv"
    assert main(["scan", _write(tmp_path, cfg), "-o", str(out)]) == 0
    _, cols = read_csv(out)
    assert len(cols["p_max"]) == n
    if param == "phi":
        assert cols["p_max"][-1] <= 1e-10 < cols["p_max"][0]


def test_scan_photon_number(tmp_path):
    cfg = FOCK.replace("rising-exponential", "rectangular").replace("1.0", "1.5")
    cfg += "[sweep]\nparameter = n\nvalues = 1, 2, 3\n"
    out = tmp_path / "s.csv"
    assert main(["scan", _write(tmp_path, cfg), "-o", str(out)]) == 0
    _, cols = read_csv(out)
    assert cols["p_max"].argmax() == 1


def test_scan_requires_sweep(tmp_path):
    assert main(["scan", _write(tmp_path, FOCK)]) == 2


def test_scan_phi_needs_coherent(tmp_path):
    assert main(["scan", _write(tmp_path, FOCK + "[sweep]\nparameter = phi\nvalues = 0, 1\n")]) == 2


@pytest.mark.parametrize("fig", ["9", "1", "x"])
def test_unknown_figure_exit_2(tmp_path, fig):
    assert main(["reproduce-figure", fig, "--outdir", str(tmp_path)]) == 2
