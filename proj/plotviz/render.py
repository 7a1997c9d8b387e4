#!/usr/bin/env python3
"""Render a vkt plot-data file as an SVG scatter plot."""

import argparse
import math
import sys

import matplotlib

matplotlib.use("svg")
import matplotlib.pyplot as plt  # noqa: E402

MAGIC = "vkt-plotdata 1"
COLUMNS = ["x", "y", "is_prime", "tower"]


class PlotData:
    def __init__(self):
        self.header = {}
        self.notes = []
        self.rows = []  # (x, y, is_prime, tower or None)

    @property
    def reference(self):
        value = self.header.get("reference")
        return None if value is None else float(value)


def parse(path):
    with open(path, encoding="utf-8") as f:
        lines = [line.rstrip("\n") for line in f]
    if not lines or lines[0] != MAGIC:
        raise ValueError(f"{path}: first line must be '{MAGIC}'")
    data = PlotData()
    i = 1
    while i < len(lines) and "=" in lines[i] and not lines[i].startswith("x,"):
        key, value = lines[i].split("=", 1)
        if key == "note":
            data.notes.append(value)
        else:
            data.header[key] = value
        i += 1
    if i >= len(lines) or lines[i].split(",") != COLUMNS:
        raise ValueError(f"{path}: line {i + 1}: expected header '{','.join(COLUMNS)}'")
    mode = data.header.get("mode")
    if mode not in ("ratio", "euler"):
        raise ValueError(f"{path}: mode must be ratio or euler, not {mode!r}")
    for lineno, line in enumerate(lines[i + 1:], start=i + 2):
        if not line:
            continue
        fields = line.split(",")
        if len(fields) != 4:
            raise ValueError(f"{path}: line {lineno}: expected 4 fields, got {len(fields)}")
        x, y = float(fields[0]), float(fields[1])
        if not (math.isfinite(x) and math.isfinite(y)):
            raise ValueError(f"{path}: line {lineno}: non-finite value")
        tower = None if fields[3] == "-" else int(fields[3])
        data.rows.append((x, y, fields[2] == "1", tower))
    xs = [r[0] for r in data.rows]
    if xs != sorted(xs):
        raise ValueError(f"{path}: rows are not sorted by x")
    return data


def axis_labels(data):
    x = "Index" if data.header.get("ordering", "index") == "index" else "Norm of level"
    if data.header["mode"] == "ratio":
        degree = data.header.get("degree", "?")
        y = f"log |H_{degree} torsion| / index"
    else:
        y = "alternating sum of log |torsion| / index"
    return x, y


def render(data, out, title=None, log_x=False):
    plt.rcParams["svg.hashsalt"] = "vkt-plotviz"
    plt.rcParams["svg.fonttype"] = "path"
    fig, ax = plt.subplots(figsize=(7, 4.5))
    xlabel, ylabel = axis_labels(data)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title if title is not None else data.header.get("group", ""))

    if not data.rows:
        ax.text(0.5, 0.5, "warning: no data rows", transform=ax.transAxes, ha="center", va="center",
                color="tab:red", gid="warning")
        print(f"warning: {out}: plot data has no rows", file=sys.stderr)
    else:
        towers = sorted({r[3] for r in data.rows if r[3] is not None})
        for t in towers:
            pts = [(r[0], r[1]) for r in data.rows if r[3] == t]
            ax.plot([p[0] for p in pts], [p[1] for p in pts], color="0.55", linewidth=0.8, zorder=1,
                    gid=f"tower-{t}")
        other = [r for r in data.rows if not r[2]]
        prime = [r for r in data.rows if r[2]]
        if other:
            ax.scatter([r[0] for r in other], [r[1] for r in other], s=14, marker="o", color="tab:blue",
                       zorder=2, label="composite level", gid="markers-composite")
        if prime:
            ax.scatter([r[0] for r in prime], [r[1] for r in prime], s=22, marker="^", color="tab:orange",
                       zorder=3, label="prime level", gid="markers-prime")
        if data.reference is not None:
            ax.axhline(data.reference, color="tab:red", linestyle="--", linewidth=1.0, zorder=0,
                       label=f"limit {data.reference:.6g}", gid="reference")
        if log_x:
            ax.set_xscale("log")
        ax.legend(loc="best", fontsize="small")

    fig.tight_layout()
    if str(out).lower().endswith(".png"):
        fig.savefig(out, format="png", dpi=120, metadata={"Software": None})
    else:
        fig.savefig(out, format="svg", metadata={"Date": None})
    plt.close(fig)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("plotdata")
    parser.add_argument("out")
    parser.add_argument("--title", default=None)
    parser.add_argument("--log-x", action="store_true")
    args = parser.parse_args(argv)
    try:
        data = parse(args.plotdata)
    except (OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    render(data, args.out, title=args.title, log_x=args.log_x)
    return 0


if __name__ == "__main__":
    sys.exit(main())
