import csv
import io
import json
import os

import pytest

from tlvca import cli
from tlvca.ca_core import EroderTable


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def table(text):
    return list(csv.DictReader(io.StringIO(text)))


# ------------------------------------------------------------------ grids


def test_grid_syntax():
    assert cli.parse_grid("10,20:30:5", integer=True) == (10, 20, 25, 30)
    assert cli.parse_grid("16:784:+", integer=True) == (16, 64, 144, 256, 400, 576, 784)
    assert cli.parse_grid("0.3:0.5", integer=False) == (0.3, 0.35, 0.4, 0.45, 0.5)
    assert cli.parse_grid("0.3:0.4:+", integer=False) == (0.3, 0.325, 0.35, 0.375, 0.4)
    for bad in ("", "1,,2", "a", "1:2:3:4", "5:1:-1"):
        with pytest.raises(cli.UsageError):
            cli.parse_grid(bad, integer=True)


# ---------------------------------------------------------------- decode


def test_decode_zero_noise(capsys):
    code, out, _ = run(["decode", "--L-grid", "16,32", "--p0-grid", "0", "--trials", "10"], capsys)
    assert code == 0
    rows = table(out)
    assert list(rows[0]) == list(cli.DECODE_COLUMNS)
    assert all(float(r["p_fail"]) == 0 for r in rows)


def test_decode_is_deterministic(tmp_path, capsys):
    args = ["decode", "--L-grid", "16", "--p0-grid", "0.2", "--trials", "500", "--seed", "42"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(args + ["--out", str(a)], capsys)[0] == 0
    assert run(args + ["--out", str(b), "--threads", "2"], capsys)[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_seed_from_environment(monkeypatch, capsys):
    args = ["decode", "--L-grid", "16", "--p0-grid", "0.3", "--trials", "300"]
    monkeypatch.setenv(cli.SEED_ENV, "7")
    _, a, _ = run(args, capsys)
    _, b, _ = run(args + ["--seed", "7"], capsys)
    _, c, _ = run(args + ["--seed", "8"], capsys)
    assert a == b != c
    monkeypatch.setenv(cli.SEED_ENV, "x")
    assert run(args, capsys)[0] == 2


def test_manifest_and_replay(tmp_path, capsys):
    out = tmp_path / "d.csv"
    args = ["decode", "--L-grid", "16,24", "--p0-grid", "0.3", "--trials", "200", "--tmax", "pow:0.5"]
    assert run(args + ["--out", str(out), "--gnuplot-hints", "--plot"], capsys)[0] == 0
    man = json.loads((tmp_path / "d.manifest.json").read_text())
    assert man["subcommand"] == "decode" and man["seed"] == 0
    assert man["config"]["tmax"] == "pow:0.5"
    assert set(man["outputs"]) == {"csv", "gnuplot", "png"}
    assert (tmp_path / "d.png").read_bytes()[:4] == b"\x89PNG"
    assert "plot" in (tmp_path / "d.gp").read_text()
    again = tmp_path / "e.csv"
    assert run(["replay", str(tmp_path / "d.manifest.json"), "--out", str(again)], capsys)[0] == 0
    assert again.read_bytes() == out.read_bytes()


@pytest.mark.parametrize(
    "args",
    [
        ["decode", "--L-grid", "15"],
        ["decode", "--p0-grid", "1.5", "--trials", "5"],
        ["decode", "--tmax", "pow:3"],
        ["decode", "--trials", "0"],
        ["decode", "--nope"],
        ["circuit", "--dl", "cubic"],
        ["bounds"],
        ["fixed-points", "--L", "30"],
    ],
)
def test_usage_errors_leave_no_files(args, tmp_path, capsys):
    out = tmp_path / "x.csv"
    code, _, err = run(args + ["--out", str(out)], capsys)
    assert code == 2
    assert err
    assert os.listdir(tmp_path) == []


def test_invariant_violation_exit_code(monkeypatch, tmp_path, capsys):
    monkeypatch.setattr(cli, "measure_eroder", lambda l_max, m=1.0: EroderTable(((1, 5),), m))
    code, _, err = run(["eroder", "--lmax", "1", "--out", str(tmp_path / "e.csv")], capsys)
    assert code == 3 and "invariant" in err
    assert os.listdir(tmp_path) == []


# ------------------------------------------------------------ subcommands


def test_eroder(capsys):
    code, out, _ = run(["eroder", "--lmax", "64"], capsys)
    rows = table(out)
    assert code == 0 and len(rows) == 64
    for r in rows:
        l, t = int(r["l"]), int(r["t_dec"])
        assert t <= (3 * l) // 4 + 1 and t <= l


def test_bounds_preset(capsys):
    code, out, _ = run(["bounds", "--preset", "tlv"], capsys)
    rows = {r["quantity"]: r for r in table(out) if r["L"] == ""}
    assert code == 0
    assert rows["k"]["exact"] == "8"
    assert rows["p_tilde_c"]["exact"] == "1/313600"
    assert rows["a"]["exact"] == "1/45"
    assert rows["beta"]["exact"] == "ln(2)/ln(35)"
    per_L = [r for r in table(out) if r["L"] != ""]
    assert all(float(r["clamped"]) == min(1.0, float(r["raw"])) for r in per_L)


def test_fixed_points(capsys):
    code, out, _ = run(["fixed-points", "--L", "12", "--boundary", "mirrored"], capsys)
    states = [r["state"] for r in table(out)]
    assert code == 0 and states == ["0" * 12, "1" * 12]
    code, out, _ = run(["fixed-points", "--L", "12", "--boundary", "periodic"], capsys)
    assert len(table(out)) == 6


def test_ff(capsys):
    code, out, _ = run(["ff", "--L-grid", "10", "--trials", "50", "--mode", "none"], capsys)
    rows = table(out)
    assert code == 0 and rows[0]["mode"] == "none" and float(rows[0]["mean_tff"]) > 1


def test_circuit_with_netlist(tmp_path, capsys):
    net = tmp_path / "row.net"
    out = tmp_path / "c.csv"
    args = ["circuit", "--L-grid", "12", "--p0-grid", "0.05", "--horizon", "50", "--lanes", "4", "--dl", "sqrt"]
    code, _, _ = run(args + ["--emit-netlist", str(net), "--out", str(out)], capsys)
    assert code == 0
    rows = table(out.read_text())
    assert rows[0]["D_L"] == "3" and rows[0]["dl_policy"] == "sqrt"
    lines = net.read_text().splitlines()
    assert lines[0] == "0 IN"
    assert all(l.split()[1] in {"IN", "OUT", "AND", "OR", "XOR", "NOT"} for l in lines)


def test_sparse(capsys):
    code, out, _ = run(["sparse", "--p0", "0.05", "--windows", "30", "--lmax", "6"], capsys)
    f = [float(r["uncovered_frac"]) for r in table(out)]
    assert code == 0 and all(b <= a for a, b in zip(f, f[1:]))


@pytest.mark.parametrize("sub", ["fixed-points", "eroder", "bounds", "sparse", "ff", "circuit"])
def test_plots_render(sub, tmp_path, capsys):
    extra = {
        "fixed-points": ["--L", "8"],
        "eroder": ["--lmax", "10"],
        "bounds": ["--preset", "tlv"],
        "sparse": ["--windows", "10", "--lmax", "4"],
        "ff": ["--L-grid", "10", "--trials", "20"],
        "circuit": ["--L-grid", "10", "--horizon", "40", "--lanes", "2"],
    }[sub]
    out = tmp_path / "o.csv"
    assert run([sub, *extra, "--out", str(out), "--plot", "--gnuplot-hints"], capsys)[0] == 0
    assert (tmp_path / "o.png").stat().st_size > 1000
    assert (tmp_path / "o.gp").exists()
