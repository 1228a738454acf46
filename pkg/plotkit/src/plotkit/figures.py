"""Render the figure set from a hybridsim output directory.

No physics is recomputed here: every number displayed already exists in the
input CSV/JSON files; this module only reads, arranges and scales axes.
Outputs are deterministic for identical inputs and style options.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

KNOWN_SCHEMAS = (1,)

REQUIRED_INPUTS = (
    "manifest.json",
    "fig2a.csv",
    "teleamp_ai1.csv",
    "teleamp_ai2.csv",
    "npt_curve.csv",
    "wigner_vacuum_branch.csv",
    "rho_hybrid_pre.json",
)


@dataclass(frozen=True)
class FigureSpec:
    """One figure: inputs, kind, output basename and style options."""

    inputs: tuple[str, ...]
    kind: str  # curve | wigner-surface | density-bars
    output: str
    style: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in ("curve", "wigner-surface", "density-bars"):
            raise ValueError(f"unknown figure kind {self.kind!r}")


class InputError(ValueError):
    pass


def read_csv(path: str) -> dict[str, np.ndarray]:
    """Strict CSV reader; malformed rows are reported with their line number."""
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
        if not header:
            raise InputError(f"{path}:1: empty header")
        names = header.split(",")
        columns: list[list[float]] = [[] for _ in names]
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != len(names):
                raise InputError(
                    f"{path}:{lineno}: expected {len(names)} fields, got {len(parts)}")
            try:
                values = [float(p) for p in parts]
            except ValueError as exc:
                raise InputError(f"{path}:{lineno}: {exc}") from None
            for col, v in zip(columns, values):
                col.append(v)
    return {name: np.asarray(col) for name, col in zip(names, columns)}


def check_manifest(in_dir: str) -> dict:
    path = os.path.join(in_dir, "manifest.json")
    with open(path, encoding="utf-8") as fh:
        manifest = json.load(fh)
    schema = manifest.get("schema")
    if schema not in KNOWN_SCHEMAS:
        raise InputError(f"{path}: unknown manifest schema {schema!r}")
    return manifest


def apply_style(style: str) -> None:
    plt.rcdefaults()
    plt.rcParams["svg.hashsalt"] = "plotkit"
    plt.rcParams["figure.dpi"] = 110
    if style == "paper":
        plt.rcParams.update({
            "font.family": "serif",
            "axes.grid": True,
            "grid.alpha": 0.3,
            "lines.linewidth": 1.6,
        })


def _save(fig, out_dir: str, name: str) -> list[str]:
    written = []
    for ext in ("png", "svg"):
        target = os.path.join(out_dir, f"{name}.{ext}")
        fig.savefig(target, metadata={"Date": None} if ext == "svg" else None)
        written.append(target)
    plt.close(fig)
    return written


def fig2a(in_dir: str, out_dir: str) -> list[str]:
    data = read_csv(os.path.join(in_dir, "fig2a.csv"))
    fig, ax = plt.subplots(figsize=(4.6, 3.4))
    ax.plot(data["alpha_f"], data["F_mapped"], color="tab:blue")
    ax.set_xlabel(r"output amplitude $\alpha_f$")
    ax.set_ylabel(r"fidelity $F$")
    ax.set_title("small hybrid: fidelity vs output amplitude")
    fig.tight_layout()
    return _save(fig, out_dir, "fig2a")


def fig2c_fig2d(in_dir: str, out_dir: str) -> list[str]:
    one = read_csv(os.path.join(in_dir, "teleamp_ai1.csv"))
    two = read_csv(os.path.join(in_dir, "teleamp_ai2.csv"))
    written = []

    fig, ax = plt.subplots(figsize=(4.6, 3.4))
    ax.plot(one["alpha_f_prime"], one["F_oracle"], "--", color="tab:red",
            label=r"$\alpha_i = 1$ (dashed)")
    ax.plot(two["alpha_f_prime"], two["F_oracle"], "-", color="tab:blue",
            label=r"$\alpha_i = 2$ (solid)")
    ax.set_ylim(0.99, 1.0)
    ax.set_xlabel(r"amplified amplitude $\alpha_f'$")
    ax.set_ylabel(r"fidelity $F'$")
    ax.set_title("tele-amplified fidelity")
    ax.legend(loc="lower right")
    fig.tight_layout()
    written += _save(fig, out_dir, "fig2c")

    fig, ax = plt.subplots(figsize=(4.6, 3.4))
    ax.plot(one["alpha_f_prime"], one["P_oracle"], "--", color="tab:red",
            label=r"$\alpha_i = 1$ (dashed)")
    ax.plot(two["alpha_f_prime"], two["P_oracle"], "-", color="tab:blue",
            label=r"$\alpha_i = 2$ (solid)")
    ax.set_xlabel(r"amplified amplitude $\alpha_f'$")
    ax.set_ylabel(r"success probability $P$")
    ax.set_title("tele-amplification success probability")
    ax.legend(loc="upper right")
    fig.tight_layout()
    written += _save(fig, out_dir, "fig2d")
    return written


def fig3b(in_dir: str, out_dir: str) -> list[str]:
    data = read_csv(os.path.join(in_dir, "npt_curve.csv"))
    fig, ax = plt.subplots(figsize=(4.6, 3.4))
    ax.plot(data["alpha_i"], data["npt"], color="tab:green")
    ax.set_xlabel(r"initial amplitude $\alpha_i$")
    ax.set_ylabel("NPT")
    ax.set_title("negativity of the partial transpose (unit efficiency)")
    fig.tight_layout()
    return _save(fig, out_dir, "fig3b")


def wigner_surface(in_dir: str, out_dir: str,
                   name: str = "wigner_vacuum_branch") -> list[str]:
    data = read_csv(os.path.join(in_dir, f"{name}.csv"))
    xs = np.unique(data["x"])
    ps = np.unique(data["p"])
    w = np.full((xs.size, ps.size), np.nan)
    ix = np.searchsorted(xs, data["x"])
    ip = np.searchsorted(ps, data["p"])
    w[ix, ip] = data["w"]
    fig = plt.figure(figsize=(5.2, 4.0))
    ax = fig.add_subplot(projection="3d")
    px, pp = np.meshgrid(xs, ps, indexing="ij")
    ax.plot_surface(px, pp, w, cmap="RdBu_r", rcount=80, ccount=80,
                    linewidth=0, antialiased=False)
    ax.set_xlabel("x")
    ax.set_ylabel("p")
    ax.set_zlabel("W(x, p)")
    ax.set_title(f"Wigner function ({name.replace('_', ' ')})")
    return _save(fig, out_dir, name)


def density_bars(in_dir: str, out_dir: str) -> list[str]:
    path = os.path.join(in_dir, "rho_hybrid_pre.json")
    with open(path, encoding="utf-8") as fh:
        blob = json.load(fh)
    dims = blob["dims"]
    total = int(np.prod(dims))
    mag = np.hypot(np.asarray(blob["re"]), np.asarray(blob["im"]))
    if mag.size != total * total:
        raise InputError(f"{path}: matrix length {mag.size} != {total}^2")
    mag = mag.reshape(total, total)
    fig = plt.figure(figsize=(5.6, 4.4))
    ax = fig.add_subplot(projection="3d")
    xs, ys = np.meshgrid(np.arange(total), np.arange(total), indexing="ij")
    ax.bar3d(xs.ravel(), ys.ravel(), np.zeros(total * total), 0.8, 0.8,
             mag.ravel(), shade=True, color="tab:blue")
    if len(dims) == 2:
        # delineate the mode-1 blocks (dims[0] blocks of dims[1] levels each)
        for k in range(1, dims[0]):
            ax.plot([k * dims[1] - 0.1] * 2, [0, total], zs=0, color="k", lw=0.8)
            ax.plot([0, total], [k * dims[1] - 0.1] * 2, zs=0, color="k", lw=0.8)
    ax.set_xlabel("row index")
    ax.set_ylabel("column index")
    ax.set_zlabel(r"$|\rho_{mn}|$")
    ax.set_title("reconstructed-basis density matrix magnitudes")
    return _save(fig, out_dir, "density_bars")


def make_figures(in_dir: str, out_dir: str, style: str = "default") -> list[str]:
    """Render every figure; refuses to start unless all inputs are present."""
    missing = [name for name in REQUIRED_INPUTS
               if not os.path.exists(os.path.join(in_dir, name))]
    if missing:
        raise InputError(f"missing input files in {in_dir}: {', '.join(missing)}")
    check_manifest(in_dir)
    apply_style(style)
    os.makedirs(out_dir, exist_ok=True)
    written = []
    written += fig2a(in_dir, out_dir)
    written += fig2c_fig2d(in_dir, out_dir)
    written += fig3b(in_dir, out_dir)
    written += wigner_surface(in_dir, out_dir)
    written += density_bars(in_dir, out_dir)
    return written


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="make_figures",
        description="render hybridsim artifacts as static figures (PNG + SVG)")
    ap.add_argument("in_dir")
    ap.add_argument("out_dir")
    ap.add_argument("--style", choices=["default", "paper"], default="default")
    args = ap.parse_args(argv)
    try:
        written = make_figures(args.in_dir, args.out_dir, args.style)
    except (InputError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for path in written:
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
