"""Render the max-orbit ratio scatter from orbit-scan CSV files.

Reads one CSV per series (the `padicflow orbits ratio` output format: `#`
metadata lines, a header row, then p,level,orbit_count,max_orbit,
fixed_points,ratio,seconds rows) and draws ratio against p for every series
on shared axes, with a horizontal guide at ratio 2.  The output is an SVG
whose bytes depend only on the CSV contents: fixed figure size, default
fonts rendered as paths, no timestamps, fixed element-id hash salt.

Usage:
    figures.py --in g1.csv,g2.csv,g3.csv --labels g1,g2,g3 --out fig1.svg
"""

import argparse
import math
import sys

import matplotlib

matplotlib.use("svg")
matplotlib.rcParams["svg.hashsalt"] = "orbit-ratio-figure"

import matplotlib.pyplot as plt  # noqa: E402


class BadRow(Exception):
    """A CSV line that does not fit the scan schema; carries the line number."""

    def __init__(self, path, lineno, reason):
        super().__init__(f"{path}:{lineno}: {reason}")


def load_series(path):
    """Parse one scan CSV into ([p...], [ratio...]), validating as we go.

    Metadata (`#`) and header lines are skipped.  Primes must be strictly
    increasing and ratios positive; violations report the offending line.
    """
    ps = []
    ratios = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#") or line.startswith("p,"):
                continue
            parts = line.split(",")
            if len(parts) != 7:
                raise BadRow(path, lineno, f"expected 7 columns, got {len(parts)}")
            try:
                p = int(parts[0])
                ratio = float(parts[5])
            except ValueError as err:
                raise BadRow(path, lineno, str(err)) from None
            if not math.isfinite(ratio) or ratio <= 0:
                raise BadRow(path, lineno, f"ratio {parts[5]} is not positive")
            if ps and p <= ps[-1]:
                raise BadRow(path, lineno,
                             f"p={p} does not increase past {ps[-1]}")
            ps.append(p)
            ratios.append(ratio)
    return ps, ratios


def render(series, out_path):
    """Scatter every (label, ps, ratios) series and save SVG to out_path."""
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    for label, ps, ratios in series:
        ax.scatter(ps, ratios, s=12, label=label, gid=f"series-{label}")
    ax.axhline(2.0, linestyle="--", linewidth=1.0, color="0.4", gid="guide-2")
    ax.set_xlabel("p")
    ax.set_ylabel("max orbit length / (p ln p)")
    if series:
        ax.legend()
    fig.savefig(out_path, format="svg", metadata={"Date": None})
    plt.close(fig)


def main(argv=None):
    ap = argparse.ArgumentParser(
        description="scatter of max-orbit ratios against p, one series per CSV")
    ap.add_argument("--in", dest="inputs", required=True,
                    help="comma-separated scan CSV paths (empty for bare axes)")
    ap.add_argument("--labels", default=None,
                    help="comma-separated legend labels, one per CSV "
                         "(default: file names)")
    ap.add_argument("--out", required=True, help="output SVG path")
    args = ap.parse_args(argv)

    paths = [s for s in args.inputs.split(",") if s.strip()]
    if args.labels is not None:
        labels = [s.strip() for s in args.labels.split(",")]
        if len(labels) != len(paths):
            print(f"error: {len(labels)} labels for {len(paths)} files",
                  file=sys.stderr)
            return 2
    else:
        labels = [p.rsplit("/", 1)[-1].removesuffix(".csv") for p in paths]

    series = []
    try:
        for label, path in zip(labels, paths):
            ps, ratios = load_series(path)
            series.append((label, ps, ratios))
    except BadRow as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2

    render(series, args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
