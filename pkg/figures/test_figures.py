"""Tests for the orbit-ratio figure script: CLI behavior and CSV parsing."""

import pathlib
import subprocess
import sys

import pytest

FIG_DIR = pathlib.Path(__file__).resolve().parent
SCRIPT = FIG_DIR / "figures.py"
sys.path.insert(0, str(FIG_DIR))

import figures  # noqa: E402

HEADER = "p,level,orbit_count,max_orbit,fixed_points,ratio,seconds"


def write_csv(path, rows, meta=("# command=orbits-ratio",)):
    path.write_text("\n".join([*meta, HEADER, *rows]) + "\n", encoding="utf-8")
    return path


def run(*args):
    return subprocess.run([sys.executable, str(SCRIPT), *args],
                          capture_output=True, text=True)


def test_single_point_renders(tmp_path):
    csv = write_csv(tmp_path / "one.csv", ["7,1,1,12,0,0.881373,0.000"])
    out = tmp_path / "one.svg"
    done = run("--in", str(csv), "--labels", "g1", "--out", str(out))
    assert done.returncode == 0, done.stderr
    svg = out.read_text()
    assert "<svg" in svg
    assert 'id="series-g1"' in svg
    assert 'id="guide-2"' in svg


def test_three_series_legend_and_default_labels(tmp_path):
    csvs = []
    for i, name in enumerate(("g1", "g2", "g3")):
        rows = [f"{p},1,1,{p * (i + 1)},0,{0.3 * (i + 1):.6f},0.000"
                for p in (3, 5, 7, 11)]
        csvs.append(str(write_csv(tmp_path / f"{name}.csv", rows)))
    out = tmp_path / "fig.svg"
    done = run("--in", ",".join(csvs), "--labels", "g1,g2,g3", "--out", str(out))
    assert done.returncode == 0, done.stderr
    svg = out.read_text()
    for name in ("g1", "g2", "g3"):
        assert f'id="series-{name}"' in svg

    # labels default to the file names when the flag is omitted
    out2 = tmp_path / "fig2.svg"
    done = run("--in", ",".join(csvs), "--out", str(out2))
    assert done.returncode == 0, done.stderr
    assert 'id="series-g2"' in out2.read_text()


def test_empty_input_renders_bare_axes(tmp_path):
    out = tmp_path / "empty.svg"
    done = run("--in", "", "--out", str(out))
    assert done.returncode == 0, done.stderr
    svg = out.read_text()
    assert "<svg" in svg and 'id="guide-2"' in svg
    assert "series-" not in svg


def test_empty_csv_is_an_empty_series(tmp_path):
    csv = write_csv(tmp_path / "none.csv", [])
    out = tmp_path / "none.svg"
    done = run("--in", str(csv), "--labels", "g1", "--out", str(out))
    assert done.returncode == 0, done.stderr


def test_byte_stable_output(tmp_path):
    csv = write_csv(tmp_path / "s.csv",
                    [f"{p},1,1,{2 * p},0,0.5{p:02d}000,0.000"
                     for p in (3, 5, 7, 11, 13)])
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    for out in (a, b):
        done = run("--in", str(csv), "--labels", "g1", "--out", str(out))
        assert done.returncode == 0, done.stderr
    assert a.read_bytes() == b.read_bytes()


@pytest.mark.parametrize("bad_row,hint", [
    ("x,1,1,9,0,0.5,0.0", "invalid literal"),
    ("7,1,1,9,0,zero,0.0", "could not convert"),
    ("7,1,1,9,0,0.5", "7 columns"),
    ("7,1,1,9,0,-0.5,0.0", "not positive"),
])
def test_malformed_rows_report_line_number(tmp_path, bad_row, hint):
    csv = write_csv(tmp_path / "bad.csv", ["3,1,1,6,0,0.4,0.0", bad_row])
    done = run("--in", str(csv), "--labels", "g1", "--out",
               str(tmp_path / "bad.svg"))
    assert done.returncode == 2
    assert ":4:" in done.stderr  # meta + header + good row, then line 4
    assert hint in done.stderr


def test_non_increasing_primes_rejected(tmp_path):
    csv = write_csv(tmp_path / "dup.csv",
                    ["5,1,1,10,0,0.4,0.0", "5,1,1,10,0,0.4,0.0"])
    done = run("--in", str(csv), "--labels", "g1", "--out",
               str(tmp_path / "dup.svg"))
    assert done.returncode == 2
    assert ":4:" in done.stderr and "increase" in done.stderr


def test_label_count_mismatch(tmp_path):
    csv = write_csv(tmp_path / "s.csv", ["3,1,1,6,0,0.4,0.0"])
    done = run("--in", str(csv), "--labels", "a,b", "--out",
               str(tmp_path / "s.svg"))
    assert done.returncode == 2
    assert "2 labels for 1 files" in done.stderr


def test_missing_file(tmp_path):
    done = run("--in", str(tmp_path / "ghost.csv"), "--labels", "g1",
               "--out", str(tmp_path / "g.svg"))
    assert done.returncode == 2
    assert "ghost.csv" in done.stderr


def test_load_series_skips_metadata_and_header(tmp_path):
    csv = write_csv(tmp_path / "s.csv",
                    ["3,1,1,6,0,0.400000,0.000", "5,1,1,24,0,0.596284,0.013"],
                    meta=("# command=orbits-ratio", "# map=bgs-g1", ""))
    ps, ratios = figures.load_series(str(csv))
    assert ps == [3, 5]
    assert ratios == [0.4, 0.596284]
