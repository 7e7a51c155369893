"""Experiment harness: map specs in, deterministic CSV/text artifacts out.

Exit codes: 0 success, 2 bad usage or unparseable input, 3 budget or
precision exhaustion, 4 violated internal invariant.  All outputs carry a
sorted `# key=value` metadata header and contain no timestamps; wall-clock
seconds appear in rows only under --timings, so default outputs are
byte-identical across reruns and worker counts.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from .errors import (BudgetError, ChartSingular, ConfigError, FlowInvariantError,
                     MapSpecError, NeedsQuadraticExtension, NonUnitError,
                     NotFlowable, NotInvariantError, NotRescalable,
                     PadicflowError, PrecisionExhausted, UncontrolledTruncation,
                     UnsupportedError, UsageError)
from .flow import (build_flow, flow_degree_cap, flow_from_zpolys,
                   guard_digits, rescale, series_length, theta_field,
                   verify_interpolation)
from .measure import WalkConfig, escape_test, random_walk, reference_measure
from .orbits import (DEFAULT_BUDGET, FinitePointSet, orbit_partition,
                     refinement_probe, transitivity_scan)
from .padic import is_prime
from .surfaces import (MarkovSurface, MonomialAuto, bgs_group, parse_map_spec,
                       vieta)
from .tate import TateMap

_USAGE_ERRORS = (UsageError, MapSpecError, ConfigError, NotFlowable,
                 NotRescalable, UnsupportedError, NonUnitError,
                 NeedsQuadraticExtension, ChartSingular)
_BUDGET_ERRORS = (BudgetError, PrecisionExhausted)
_INVARIANT_ERRORS = (NotInvariantError, FlowInvariantError,
                     UncontrolledTruncation)


def main(argv=None):
    parser, subparsers = _build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    _apply_config_file(argv, subparsers)
    try:
        ns = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        ns.handler(ns)
        return 0
    except _BUDGET_ERRORS as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except _INVARIANT_ERRORS as e:
        print(f"invariant violation: {e}", file=sys.stderr)
        return 4
    except _USAGE_ERRORS as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except PadicflowError as e:
        print(f"error: {e}", file=sys.stderr)
        return 4


def console_entry():
    sys.exit(main())


# -- parser -----------------------------------------------------------------------


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="padicflow",
        description="p-adic flow and orbit experiments on affine surfaces")
    parser.add_argument("--config", metavar="FILE",
                        help="key=value defaults, overridden by flags")
    sub = parser.add_subparsers(dest="command", required=True)
    subparsers = {}

    def common(sp):
        sp.add_argument("--config", metavar="FILE",
                        help="key=value defaults, overridden by flags")
        sp.add_argument("--out", required=True, help="output file path")
        sp.add_argument("--budget", type=int, default=DEFAULT_BUDGET,
                        help="point-count budget")
        sp.add_argument("--timings", action="store_true",
                        help="fill the seconds column with wall-clock times "
                             "(breaks byte-determinism)")
        sp.add_argument("--workers", type=int,
                        default=int(os.environ.get("PADICFLOW_WORKERS", "1")),
                        help="process count for prime scans")

    sp = sub.add_parser("flow", help="build an analytic flow and dump its "
                                     "vector field")
    sp.add_argument("--map", required=True, dest="map_spec",
                    help="map spec, e.g. elem:x+9 or henon:9,0,9")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--prec", type=int, required=True,
                    help="target digits of the flow")
    sp.add_argument("--rescale", type=int, default=0, metavar="R",
                    help="conjugate by a scale of p^R before flowing")
    sp.add_argument("--verify", type=int, default=0, metavar="NMAX",
                    help="cross-check the flow against plain iteration at "
                         "integer times up to NMAX")
    common(sp)
    sp.set_defaults(handler=_cmd_flow)
    subparsers["flow"] = sp

    sp = sub.add_parser("orbits", help="orbit partitions of plane actions")
    osub = sp.add_subparsers(dest="orbits_command", required=True)

    sc = osub.add_parser("scan", help="orbit counts per prime for a group")
    sc.add_argument("--group", required=True,
                    help="'bgs-henon' or ';'-separated map specs")
    sc.add_argument("--pmin", type=int, default=3)
    sc.add_argument("--pmax", type=int, required=True)
    sc.add_argument("--level", type=int, default=1)
    common(sc)
    sc.set_defaults(handler=_cmd_orbits_scan)
    subparsers["orbits-scan"] = sc

    sc = osub.add_parser("ratio", help="max-orbit/(p ln p) per prime for one map")
    sc.add_argument("--map", required=True, dest="map_spec")
    sc.add_argument("--pmin", type=int, default=3)
    sc.add_argument("--pmax", type=int, required=True)
    common(sc)
    sc.set_defaults(handler=_cmd_orbits_ratio)
    subparsers["orbits-ratio"] = sc

    sc = osub.add_parser("refine", help="compare orbits at consecutive levels")
    sc.add_argument("--group", required=True)
    sc.add_argument("--p", type=int, required=True)
    sc.add_argument("--level", type=int, default=1,
                    help="lower level; compared against level+1")
    sc.add_argument("--set", choices=("plane", "markov"), default="plane")
    sc.add_argument("--params", help="A,B,C,D for --set markov")
    common(sc)
    sc.set_defaults(handler=_cmd_orbits_refine)
    subparsers["orbits-refine"] = sc

    sp = sub.add_parser("markov", help="cubic-surface measures and walks")
    msub = sp.add_subparsers(dest="markov_command", required=True)

    sc = msub.add_parser("walk", help="random walk over the involutions")
    sc.add_argument("--params", required=True, help="A,B,C,D")
    sc.add_argument("--p", type=int, required=True)
    sc.add_argument("--level", type=int, required=True,
                    help="working level of the walk")
    sc.add_argument("--report-level", type=int, default=0,
                    help="tally level (default: the working level)")
    sc.add_argument("--start", default="", help="x,y,z (default: first orbit "
                                                "point found)")
    sc.add_argument("--steps", type=int, required=True)
    sc.add_argument("--seed", type=int, required=True)
    sc.add_argument("--burn", type=int, default=-1,
                    help="burn-in steps (default steps//10)")
    sc.add_argument("--mu", default="1/3,1/3,1/3",
                    help="generator probabilities, three rationals")
    sc.add_argument("--excise", action="store_true",
                    help="drop singular residues from the reference instead "
                         "of failing")
    common(sc)
    sc.set_defaults(handler=_cmd_markov_walk)
    subparsers["markov-walk"] = sc

    sc = msub.add_parser("measure", help="reference weights over one orbit")
    sc.add_argument("--params", required=True)
    sc.add_argument("--p", type=int, required=True)
    sc.add_argument("--level", type=int, required=True)
    sc.add_argument("--start", required=True, help="x,y,z whose orbit is weighted")
    sc.add_argument("--excise", action="store_true")
    common(sc)
    sc.set_defaults(handler=_cmd_markov_measure)
    subparsers["markov-measure"] = sc

    sc = msub.add_parser("escape", help="exact valuation trace of the "
                                        "parabolic iteration")
    sc.add_argument("--params", required=True)
    sc.add_argument("--p", type=int, required=True)
    sc.add_argument("--start", required=True,
                    help="x,y,z as exact rationals, e.g. 1/3,-2,1/3")
    sc.add_argument("--steps", type=int, required=True)
    sc.add_argument("--digit-cap", type=int, default=1_000_000)
    common(sc)
    sc.set_defaults(handler=_cmd_markov_escape)
    subparsers["markov-escape"] = sc

    sp = sub.add_parser("torus", help="monomial actions on unit pairs")
    tsub = sp.add_subparsers(dest="torus_command", required=True)
    sc = tsub.add_parser("orbits", help="orbit partition of a monomial map")
    sc.add_argument("--p", type=int, required=True)
    sc.add_argument("--level", type=int, default=1)
    sc.add_argument("--matrix", required=True, help="a,b,c,d with ad-bc = +-1")
    sc.add_argument("--alpha", type=int, default=1)
    sc.add_argument("--beta", type=int, default=1)
    common(sc)
    sc.set_defaults(handler=_cmd_torus_orbits)
    subparsers["torus-orbits"] = sc

    return parser, subparsers


def _apply_config_file(argv, subparsers):
    """Load key=value defaults; explicit flags still win (set_defaults only)."""
    path = None
    for i, arg in enumerate(argv):
        if arg == "--config" and i + 1 < len(argv):
            path = argv[i + 1]
        elif arg.startswith("--config="):
            path = arg.split("=", 1)[1]
    if path is None:
        return
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as e:
        raise SystemExit(f"cannot read config file: {e}")
    values = {}
    for lineno, ln in enumerate(lines, 1):
        s = ln.strip()
        if not s or s.startswith("#"):
            continue
        if "=" not in s:
            raise SystemExit(f"config line {lineno}: expected key=value")
        key, val = s.split("=", 1)
        values[key.strip().replace("-", "_")] = val.strip()
    known = set()
    for sp in subparsers.values():
        dests = {a.dest for a in sp._actions if a.dest != "help"}
        known |= dests
        present = {}
        for k, v in values.items():
            if k not in dests:
                continue
            action = next(a for a in sp._actions if a.dest == k)
            if action.type is int:
                v = int(v)
            elif isinstance(action.const, bool) or isinstance(action.default, bool):
                v = v.lower() in ("1", "true", "yes", "on")
            present[k] = v
            action.required = False  # the config file satisfies it
        if present:
            sp.set_defaults(**present)
    unknown = set(values) - known
    if unknown:
        raise SystemExit(f"config file: unknown keys {sorted(unknown)}")


# -- shared helpers ----------------------------------------------------------------


def _primes_in(lo, hi):
    return [p for p in range(max(3, lo), hi + 1) if is_prime(p)]


def _parse_ints(text, what):
    try:
        return [int(t.strip()) for t in text.split(",")]
    except ValueError:
        raise UsageError(f"{what} must be a comma-separated integer list") from None


def _parse_fracs(text, what):
    try:
        return [Fraction(t.strip()) for t in text.split(",")]
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"{what} must be comma-separated rationals") from None


def _parse_group(text):
    if text.strip() == "bgs-henon":
        return bgs_group(), "bgs-henon"
    autos = [parse_map_spec(t) for t in text.split(";") if t.strip()]
    if not autos:
        raise UsageError("empty generator list")
    return autos, text.strip()


def _metadata(pairs):
    return "".join(f"# {k}={v}\n" for k, v in sorted(pairs.items()))


def _write_text(path, text):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _fmt_ratio(x):
    return f"{x:.6f}"


def _fmt_seconds(sec, timings):
    return f"{sec:.3f}" if timings else "0.000"


def _scan_rows_csv(rows, timings):
    lines = ["p,level,orbit_count,max_orbit,fixed_points,ratio,seconds"]
    for r in rows:
        lines.append(
            f"{r['p']},{r['level']},{r['orbit_count']},{r['max_orbit']},"
            f"{r['fixed_points']},{_fmt_ratio(r['ratio'])},"
            f"{_fmt_seconds(r.get('seconds', 0.0), timings)}")
    return "\n".join(lines) + "\n"


# -- worker bodies (top level: picklable) --------------------------------------------


def _scan_one_prime(task):
    group_text, p, level, budget, timings = task
    t0 = time.perf_counter()
    autos, _ = _parse_group(group_text)
    rows = transitivity_scan(lambda _p: autos, [p], level, budget)
    row = rows[0]
    row["seconds"] = time.perf_counter() - t0 if timings else 0.0
    return row


def _ratio_one_prime(task):
    map_spec, p, budget, timings = task
    t0 = time.perf_counter()
    auto = parse_map_spec(map_spec)
    ps = FinitePointSet.affine_plane(p, 1, budget)
    part = orbit_partition(ps, [auto])
    row = {
        "p": p,
        "level": 1,
        "orbit_count": part.orbit_count,
        "max_orbit": part.max_size(),
        "fixed_points": part.fixed_point_count(),
        "ratio": part.max_size() / (p * math.log(p)),
        "seconds": time.perf_counter() - t0 if timings else 0.0,
    }
    return row


def _run_tasks(worker, tasks, workers):
    if workers <= 1 or len(tasks) <= 1:
        return [worker(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(worker, tasks, chunksize=1))


# -- subcommand handlers --------------------------------------------------------------


def _cmd_flow(ns):
    auto = parse_map_spec(ns.map_spec)
    if auto.nvars > 3:
        raise UsageError("flow maps must have at most 3 variables")
    if ns.rescale:
        flow = _rescaled_flow(auto, ns.p, ns.prec, ns.rescale)
    else:
        flow = flow_from_zpolys(auto.forward, ns.p, ns.prec,
                                backward=auto.backward)
    theta = theta_field(flow)
    meta = {
        "command": "flow",
        "map": ns.map_spec,
        "p": ns.p,
        "precision": ns.prec,
        "rescale": ns.rescale,
        "series-terms": len(flow.deltas) - 1,
        "work-precision": flow.work_precision,
    }
    lines = [_metadata(meta)]
    if ns.verify:
        origin = tuple(0 for _ in range(theta.nvars))
        ok, mismatches = verify_interpolation(flow, origin, ns.verify,
                                              flow.target_precision)
        lines.append(f"# verify-origin-upto={ns.verify} ok={ok}\n")
        if not ok:
            raise FlowInvariantError(f"flow disagrees with iteration at "
                                     f"{mismatches[:3]}")
    lines.append(theta.to_text())
    _write_text(ns.out, "".join(lines))


def _rescaled_flow(auto, p, prec, r):
    """Flow of the map conjugated by a scale of p^r, target precision prec.

    The unscaled map need not be flowable; sizing the guard needs the
    congruence level of the SCALED map, so probe once, then rebuild at the
    right working precision.
    """
    deg = max(2, auto.degree())
    probe = TateMap.from_zpolys(auto.forward, p, prec + r, deg)
    c = rescale(probe, r).congruence_level()
    if c < (2 if p == 2 else 1):
        raise NotFlowable(f"scaled map still has congruence level {c}")
    if c >= prec:
        return build_flow(rescale(probe, r), prec)
    n_work = prec + guard_digits(series_length(prec, c, p), p)
    cap = flow_degree_cap(n_work, c, auto.degree())
    fmap = TateMap.from_zpolys(auto.forward, p, n_work + r, cap)
    scaled_inv = None
    if auto.backward is not None:
        binv = TateMap.from_zpolys(auto.backward, p, n_work + r, cap)
        try:
            scaled_inv = rescale(binv, r)
        except (NotRescalable, PrecisionExhausted):
            pass
    return build_flow(rescale(fmap, r), prec, inverse=scaled_inv)


def _cmd_orbits_scan(ns):
    autos, group_name = _parse_group(ns.group)  # validate before spawning
    del autos
    primes = _primes_in(ns.pmin, ns.pmax)
    tasks = [(ns.group, p, ns.level, ns.budget, ns.timings) for p in primes]
    rows = _run_tasks(_scan_one_prime, tasks, ns.workers)
    rows.sort(key=lambda r: r["p"])
    meta = {
        "command": "orbits-scan",
        "group": group_name,
        "pmin": ns.pmin,
        "pmax": ns.pmax,
        "level": ns.level,
        "budget": ns.budget,
    }
    _write_text(ns.out, _metadata(meta) + _scan_rows_csv(rows, ns.timings))


def _cmd_orbits_ratio(ns):
    parse_map_spec(ns.map_spec)  # validate before spawning
    primes = _primes_in(ns.pmin, ns.pmax)
    tasks = [(ns.map_spec, p, ns.budget, ns.timings) for p in primes]
    rows = _run_tasks(_ratio_one_prime, tasks, ns.workers)
    rows.sort(key=lambda r: r["p"])
    meta = {
        "command": "orbits-ratio",
        "map": ns.map_spec,
        "pmin": ns.pmin,
        "pmax": ns.pmax,
        "budget": ns.budget,
        "ratio-denominator": "p*ln(p)",
    }
    _write_text(ns.out, _metadata(meta) + _scan_rows_csv(rows, ns.timings))


def _cmd_orbits_refine(ns):
    autos, group_name = _parse_group(ns.group)
    if ns.set == "markov":
        if not ns.params:
            raise UsageError("--set markov needs --params A,B,C,D")
        surf = MarkovSurface(*_parse_params(ns.params))
        low = FinitePointSet.markov_surface(surf, ns.p, ns.level, ns.budget)
        high = FinitePointSet.markov_surface(surf, ns.p, ns.level + 1, ns.budget)
    else:
        low = FinitePointSet.affine_plane(ns.p, ns.level, ns.budget)
        high = FinitePointSet.affine_plane(ns.p, ns.level + 1, ns.budget)
    report = refinement_probe(autos, low, high)
    meta = {
        "command": "orbits-refine",
        "group": group_name,
        "p": ns.p,
        "level-low": ns.level,
        "level-high": ns.level + 1,
        "set": ns.set,
    }
    if ns.params:
        meta["params"] = ns.params
    lines = [_metadata(meta),
             "root,preimage_size,fiber_orbit_count,is_full_preimage\n"]
    for root in sorted(report):
        r = report[root]
        lines.append(f"{root},{r['preimage_size']},{r['fiber_orbit_count']},"
                     f"{int(r['is_full_preimage'])}\n")
    _write_text(ns.out, "".join(lines))


def _parse_params(text):
    vals = _parse_ints(text, "--params")
    if len(vals) != 4:
        raise UsageError("--params needs exactly 4 integers")
    return vals


def _orbit_of_start(surf, p, level, start, budget):
    import numpy as np

    pset = FinitePointSet.markov_surface(surf, p, level, budget)
    gens = [vieta(surf, i) for i in (1, 2, 3)]
    part = orbit_partition(pset, gens)
    m = p ** level
    start = tuple(c % m for c in start)
    idx = pset.encode(tuple(np.array([c], dtype=np.int64) for c in start))
    if int(idx[0]) < 0:
        raise UsageError(f"start point {start} is not on the surface mod {p}^{level}")
    members = part.orbit_of(int(idx[0]))
    coords = pset.decode(members)
    return [tuple(int(c[i]) for c in coords) for i in range(len(members))]


def _cmd_markov_measure(ns):
    surf = MarkovSurface(*_parse_params(ns.params))
    start = _parse_ints(ns.start, "--start")
    if len(start) != 3:
        raise UsageError("--start needs x,y,z")
    orbit = _orbit_of_start(surf, ns.p, ns.level, start, ns.budget)
    ref = reference_measure(orbit, surf, ns.p, ns.level, strict=not ns.excise)
    meta = {
        "command": "markov-measure",
        "params": ns.params,
        "p": ns.p,
        "level": ns.level,
        "start": ns.start,
        "orbit-size": len(orbit),
        "excluded": len(ref.exclusions),
    }
    lines = [_metadata(meta), "x,y,z,weight\n"]
    for pt in sorted(ref.weights):
        w = ref.weights[pt]
        lines.append(f"{pt[0]},{pt[1]},{pt[2]},{w.numerator}/{w.denominator}\n")
    _write_text(ns.out, "".join(lines))


def _cmd_markov_walk(ns):
    surf = MarkovSurface(*_parse_params(ns.params))
    report_level = ns.report_level or ns.level
    if ns.start:
        start = _parse_ints(ns.start, "--start")
        if len(start) != 3:
            raise UsageError("--start needs x,y,z")
    else:
        pts = _orbit_of_start_any(surf, ns.p, ns.level, ns.budget)
        start = pts
    mu = _parse_fracs(ns.mu, "--mu")
    burn = None if ns.burn < 0 else ns.burn
    cfg = WalkConfig(surf, ns.p, ns.level, start, ns.steps, ns.seed, mu, burn)
    freqs = random_walk(cfg, report_level)
    orbit = _orbit_of_start(surf, ns.p, report_level,
                            tuple(c % ns.p ** report_level for c in cfg.start),
                            ns.budget)
    ref = reference_measure(orbit, surf, ns.p, report_level,
                            strict=not ns.excise)
    universe = sorted(ref.weights)
    meta = {
        "command": "markov-walk",
        "params": ns.params,
        "p": ns.p,
        "level": ns.level,
        "report-level": report_level,
        "start": ",".join(map(str, cfg.start)),
        "steps": cfg.steps,
        "burn-in": cfg.burn_in,
        "seed": cfg.seed,
        "mu": ",".join(str(x) for x in cfg.mu),
        "orbit-size": len(orbit),
        "excluded": len(ref.exclusions),
        "residue-index": "rank of (x,y,z) in lexicographic order over the "
                         "start's orbit",
    }
    stray = set(freqs) - set(universe) - set(ref.exclusions)
    if stray:
        raise NotInvariantError(
            f"walk left the start's orbit at {sorted(stray)[0]}",
            sorted(stray)[0])
    lines = [_metadata(meta), "residue_index,empirical_freq,reference_weight\n"]
    for i, pt in enumerate(universe):
        f = freqs.get(pt, Fraction(0))
        w = ref.weights[pt]
        lines.append(f"{i},{f.numerator}/{f.denominator},"
                     f"{w.numerator}/{w.denominator}\n")
    _write_text(ns.out, "".join(lines))


def _orbit_of_start_any(surf, p, level, budget):
    """First surface point in packed-key order (deterministic default start)."""
    pset = FinitePointSet.markov_surface(surf, p, level, budget)
    if pset.size == 0:
        raise UsageError("surface has no points at this level")
    import numpy as np

    coords = pset.decode(np.array([0], dtype=np.int64))
    return tuple(int(c[0]) for c in coords)


def _cmd_markov_escape(ns):
    surf = MarkovSurface(*_parse_params(ns.params))
    start = _parse_fracs(ns.start, "--start")
    if len(start) != 3:
        raise UsageError("--start needs x,y,z")
    trace = escape_test(start, surf, ns.p, ns.steps, ns.digit_cap)
    meta = {
        "command": "markov-escape",
        "params": ns.params,
        "p": ns.p,
        "start": ns.start,
        "steps": ns.steps,
        "digit-cap": ns.digit_cap,
    }
    lines = [_metadata(meta), "step,min_valuation\n"]
    for i, v in enumerate(trace):
        lines.append(f"{i},{'inf' if v == math.inf else int(v)}\n")
    _write_text(ns.out, "".join(lines))


def _cmd_torus_orbits(ns):
    mat = _parse_ints(ns.matrix, "--matrix")
    if len(mat) != 4:
        raise UsageError("--matrix needs a,b,c,d")
    mono = MonomialAuto(((mat[0], mat[1]), (mat[2], mat[3])),
                        ns.alpha, ns.beta)
    pset = FinitePointSet.torus_units(ns.p, ns.level, ns.budget)
    t0 = time.perf_counter()
    part = orbit_partition(pset, [mono])
    m = ns.p ** ns.level
    row = {
        "p": ns.p,
        "level": ns.level,
        "orbit_count": part.orbit_count,
        "max_orbit": part.max_size(),
        "fixed_points": part.fixed_point_count(),
        "ratio": part.max_size() / (m * math.log(m)),
        "seconds": time.perf_counter() - t0 if ns.timings else 0.0,
    }
    meta = {
        "command": "torus-orbits",
        "matrix": ns.matrix,
        "alpha": ns.alpha,
        "beta": ns.beta,
        "p": ns.p,
        "level": ns.level,
        "points": pset.size,
        "ratio-denominator": "m*ln(m), m=p^level",
    }
    _write_text(ns.out, _metadata(meta) + _scan_rows_csv([row], ns.timings))


if __name__ == "__main__":
    console_entry()
