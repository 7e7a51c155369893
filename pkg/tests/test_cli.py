"""End-to-end runs of the command-line harness via main(argv)."""

import math
from fractions import Fraction

import pytest

from padicflow.cli import main
from padicflow.orbits import max_orbit_ratio
from padicflow.surfaces import parse_map_spec
from padicflow.tate import TateMap


def _run(tmp_path, *args, name="out.txt"):
    out = tmp_path / name
    code = main(list(args) + ["--out", str(out)])
    text = out.read_text() if out.exists() else ""
    return code, text


def _meta(text):
    pairs = {}
    for ln in text.splitlines():
        if ln.startswith("# ") and "=" in ln:
            k, v = ln[2:].split("=", 1)
            pairs[k] = v
    return pairs


def _rows(text):
    return [ln for ln in text.splitlines() if ln and not ln.startswith("#")]


# -- flow -------------------------------------------------------------------------


def test_flow_dump_translation(tmp_path):
    code, text = _run(tmp_path, "flow", "--map", "elem:x+9",
                      "--p", "3", "--prec", "5")
    assert code == 0
    meta = _meta(text)
    assert meta["map"] == "elem:x+9" and meta["p"] == "3"
    assert "0: 9" in text.splitlines()  # the vector field is the constant 9
    # the dump round-trips through the text format
    theta = TateMap.from_text(text)
    assert theta.components[0].coeffs == {(0,): 9}


def test_flow_metadata_is_sorted(tmp_path):
    code, text = _run(tmp_path, "flow", "--map", "elem:x+9",
                      "--p", "3", "--prec", "4")
    assert code == 0
    keys = [ln[2:].split("=", 1)[0] for ln in text.splitlines()
            if ln.startswith("# ")]
    assert keys == sorted(keys)


def test_flow_verify_flag(tmp_path):
    code, text = _run(tmp_path, "flow", "--map", "elem:9*x^2+x+9",
                      "--p", "3", "--prec", "6", "--verify", "12")
    assert code == 0
    assert "ok=True" in text


def test_flow_rescale_path(tmp_path):
    # x + x^2 has congruence level 0; scaling by 3^2 makes it x + 9x^2
    code, text = _run(tmp_path, "flow", "--map", "elem:x^2+x",
                      "--p", "3", "--prec", "4", "--rescale", "2")
    assert code == 0
    assert _meta(text)["rescale"] == "2"
    assert TateMap.from_text(text).components[0].precision == 4
    code, _ = _run(tmp_path, "flow", "--map", "elem:x^2+x",
                   "--p", "3", "--prec", "4")
    assert code == 2  # not flowable without the rescale


def test_flow_bad_spec_is_usage_error(tmp_path):
    code, _ = _run(tmp_path, "flow", "--map", "elem:x+*9", "--p", "3",
                   "--prec", "4")
    assert code == 2
    code, _ = _run(tmp_path, "flow", "--map", "word: bgs-g1 o", "--p", "3",
                   "--prec", "4")
    assert code == 2
    code, _ = _run(tmp_path, "flow", "--map", "elem:2*x", "--p", "3",
                   "--prec", "4")
    assert code == 2  # congruence level 0: no flow


# -- orbit scans --------------------------------------------------------------------


def test_scan_oracle_rows(tmp_path):
    code, text = _run(tmp_path, "orbits", "scan", "--group", "bgs-henon",
                      "--pmax", "13", name="scan.csv")
    assert code == 0
    rows = _rows(text)
    assert rows[0] == "p,level,orbit_count,max_orbit,fixed_points,ratio,seconds"
    got = [r.split(",")[:5] for r in rows[1:]]
    assert got == [["3", "1", "1", "9", "0"],
                   ["5", "1", "2", "24", "1"],
                   ["7", "1", "1", "49", "0"],
                   ["11", "1", "1", "121", "0"],
                   ["13", "1", "1", "169", "0"]]
    assert all(r.endswith(",0.000") for r in rows[1:])


def test_scan_reruns_are_byte_identical(tmp_path):
    _, a = _run(tmp_path, "orbits", "scan", "--group", "bgs-henon",
                "--pmax", "11", name="a.csv")
    _, b = _run(tmp_path, "orbits", "scan", "--group", "bgs-henon",
                "--pmax", "11", name="b.csv")
    assert a == b


def test_scan_workers_do_not_change_bytes(tmp_path):
    _, a = _run(tmp_path, "orbits", "scan", "--group", "bgs-henon",
                "--pmax", "13", name="a.csv")
    _, b = _run(tmp_path, "orbits", "scan", "--group", "bgs-henon",
                "--pmax", "13", "--workers", "3", name="b.csv")
    assert a == b


def test_scan_timings_only_touch_seconds(tmp_path):
    _, plain = _run(tmp_path, "orbits", "scan", "--group", "bgs-henon",
                    "--pmax", "7", name="a.csv")
    _, timed = _run(tmp_path, "orbits", "scan", "--group", "bgs-henon",
                    "--pmax", "7", "--timings", name="b.csv")
    fixed = [r.rsplit(",", 1)[0] for r in _rows(plain)]
    moved = [r.rsplit(",", 1)[0] for r in _rows(timed)]
    assert fixed == moved


def test_scan_budget_exhaustion(tmp_path):
    code, _ = _run(tmp_path, "orbits", "scan", "--group", "bgs-henon",
                   "--pmax", "101", "--budget", "100")
    assert code == 3


def test_scan_explicit_generator_list(tmp_path):
    spec = "henon:5,0,1;word:linear:1,1,0,1 o henon:5,0,1 o linear:1,-1,0,1"
    code, text = _run(tmp_path, "orbits", "scan", "--group", spec,
                      "--pmax", "5", name="scan.csv")
    assert code == 0
    assert _meta(text)["group"] == spec
    assert len(_rows(text)) == 3  # header + p=3 + p=5


def test_ratio_matches_library(tmp_path):
    code, text = _run(tmp_path, "orbits", "ratio", "--map", "henon:5,0,1",
                      "--pmax", "11", name="ratio.csv")
    assert code == 0
    rows = _rows(text)[1:]
    assert [r.split(",")[0] for r in rows] == ["3", "5", "7", "11"]
    for r in rows:
        p = int(r.split(",")[0])
        expect = max_orbit_ratio(parse_map_spec("henon:5,0,1"), p)
        assert r.split(",")[5] == f"{expect:.6f}"


def test_refine_oracle(tmp_path):
    code, text = _run(tmp_path, "orbits", "refine", "--group", "bgs-henon",
                      "--p", "5", name="refine.csv")
    assert code == 0
    rows = _rows(text)
    assert rows[0] == "root,preimage_size,fiber_orbit_count,is_full_preimage"
    assert rows[1:] == ["0,25,1,1", "1,600,1,1"]


def test_refine_non_invariant_is_exit_4(tmp_path):
    # the A=1 involution moves points off the A=0 surface
    code, _ = _run(tmp_path, "orbits", "refine",
                   "--group", "vieta:1@markov:1,0,0,20",
                   "--p", "5", "--set", "markov", "--params", "0,0,0,20")
    assert code == 4


# -- config files -------------------------------------------------------------------


def test_config_file_supplies_required_options(tmp_path):
    cfg = tmp_path / "scan.cfg"
    out = tmp_path / "scan.csv"
    cfg.write_text(f"group=bgs-henon\npmax=7\nout={out}\n")
    assert main(["orbits", "scan", "--config", str(cfg)]) == 0
    rows = _rows(out.read_text())
    assert [r.split(",")[0] for r in rows[1:]] == ["3", "5", "7"]


def test_config_flags_override_file(tmp_path):
    cfg = tmp_path / "scan.cfg"
    out = tmp_path / "scan.csv"
    cfg.write_text(f"group=bgs-henon\npmax=13\nout={out}\n")
    assert main(["orbits", "scan", "--config", str(cfg), "--pmax", "5"]) == 0
    rows = _rows(out.read_text())
    assert [r.split(",")[0] for r in rows[1:]] == ["3", "5"]


def test_config_comments_and_unknown_keys(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("# comment\ngroup=bgs-henon\nnosuchkey=1\n")
    with pytest.raises(SystemExit):
        main(["orbits", "scan", "--config", str(cfg), "--pmax", "5",
              "--out", str(tmp_path / "x.csv")])


# -- markov subcommands -------------------------------------------------------------


def test_walk_csv_schema_and_determinism(tmp_path):
    args = ("markov", "walk", "--params", "0,0,0,20", "--p", "7",
            "--level", "1", "--start", "1,2,3", "--steps", "4000",
            "--seed", "11")
    code, a = _run(tmp_path, *args, name="a.csv")
    assert code == 0
    _, b = _run(tmp_path, *args, name="b.csv")
    assert a == b
    rows = _rows(a)
    assert rows[0] == "residue_index,empirical_freq,reference_weight"
    assert [int(r.split(",")[0]) for r in rows[1:]] == list(range(len(rows) - 1))
    emp = sum(Fraction(r.split(",")[1]) for r in rows[1:])
    ref = sum(Fraction(r.split(",")[2]) for r in rows[1:])
    assert emp == 1 and ref == 1
    meta = _meta(a)
    assert meta["seed"] == "11" and meta["burn-in"] == "400"


def test_walk_default_start_and_report_level(tmp_path):
    code, text = _run(tmp_path, "markov", "walk", "--params", "0,0,0,20",
                      "--p", "7", "--level", "2", "--report-level", "1",
                      "--steps", "2000", "--seed", "5", name="w.csv")
    assert code == 0
    meta = _meta(text)
    assert meta["report-level"] == "1"
    assert len(meta["start"].split(",")) == 3


def test_walk_all_singular_orbit_fails_cleanly(tmp_path):
    code, _ = _run(tmp_path, "markov", "walk", "--params", "0,0,0,0",
                   "--p", "3", "--level", "1", "--start", "0,0,0",
                   "--steps", "10", "--seed", "1", "--excise")
    assert code == 2  # nothing remains after excising the singular residue


def test_measure_weights_sum_to_one(tmp_path):
    code, text = _run(tmp_path, "markov", "measure", "--params", "0,0,0,20",
                      "--p", "7", "--level", "2", "--start", "1,2,3",
                      name="m.csv")
    assert code == 0
    rows = _rows(text)
    assert rows[0] == "x,y,z,weight"
    total = sum(Fraction(r.split(",")[3]) for r in rows[1:])
    assert total == 1
    assert _meta(text)["excluded"] == "0"


def test_escape_trace_csv(tmp_path):
    code, text = _run(tmp_path, "markov", "escape", "--params", "0,0,0,4",
                      "--p", "7", "--start", "1/7,-2,1/7", "--steps", "5",
                      name="e.csv")
    assert code == 0
    rows = _rows(text)
    assert rows[0] == "step,min_valuation"
    vals = [int(r.split(",")[1]) for r in rows[1:]]
    assert vals[0] == -1 and all(b < a for a, b in zip(vals, vals[1:]))


def test_escape_infinite_valuation(tmp_path):
    code, text = _run(tmp_path, "markov", "escape", "--params", "0,0,0,0",
                      "--p", "5", "--start", "0,0,0", "--steps", "2",
                      name="e.csv")
    assert code == 0
    assert _rows(text)[1:] == ["0,inf", "1,inf", "2,inf"]


def test_escape_budget_exit(tmp_path):
    code, _ = _run(tmp_path, "markov", "escape", "--params", "0,0,0,4",
                   "--p", "7", "--start", "1/7,-2,1/7", "--steps", "300",
                   "--digit-cap", "60")
    assert code == 3


def test_escape_off_surface_exit(tmp_path):
    code, _ = _run(tmp_path, "markov", "escape", "--params", "0,0,0,20",
                   "--p", "7", "--start", "1,1,1", "--steps", "5")
    assert code == 2


# -- torus ---------------------------------------------------------------------------


def test_torus_orbits_oracle(tmp_path):
    code, text = _run(tmp_path, "torus", "orbits", "--p", "7", "--level", "2",
                      "--matrix", "2,1,1,1", name="t.csv")
    assert code == 0
    meta = _meta(text)
    assert meta["points"] == "1764"
    row = _rows(text)[1].split(",")
    assert row[:5] == ["7", "2", "114", "24", "1"]
    expect = 24 / (49 * math.log(49))
    assert row[5] == f"{expect:.6f}"


def test_torus_bad_matrix_exit(tmp_path):
    code, _ = _run(tmp_path, "torus", "orbits", "--p", "7",
                   "--matrix", "2,0,0,2")
    assert code == 2
