"""Scatter plots comparing two algorithms over the same benchmark instances."""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from models import BenchRow  # noqa: E402
from services.bench import paired  # noqa: E402

PLOT_STYLE = {
    "font.size": 10,
    "axes.labelsize": 10,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "figure.figsize": (4.0, 4.0),
}


def _scatter(xs: list[float], ys: list[float], label: str, first: str, second: str,
             out: Path, log: bool) -> Path:
    with plt.rc_context(PLOT_STYLE):
        fig, ax = plt.subplots()
        ax.scatter(xs, ys, s=12, alpha=0.7)
        hi = max(xs + ys + [1.0])
        lo = min(xs + ys + [hi]) if log else 0.0
        ax.plot([lo, hi], [lo, hi], color="grey", linestyle="--", linewidth=0.8)
        if log:
            ax.set_xscale("log")
            ax.set_yscale("log")
        ax.set_xlabel(f"{first} {label}")
        ax.set_ylabel(f"{second} {label}")
        fig.tight_layout()
        fig.savefig(out, format="svg")
        plt.close(fig)
    return out


def plot_comparison(rows: list[BenchRow], first: str, second: str, out_dir: Path,
                    include_time: bool = True) -> list[Path]:
    """Write iterations.svg (and time.svg) to out_dir; points above the diagonal favour ``first``."""
    pairs = paired(rows, first, second)
    if not pairs:
        return []
    out_dir.mkdir(parents=True, exist_ok=True)
    written = [
        _scatter([a.iterations for a, _ in pairs], [b.iterations for _, b in pairs],
                 "iterations", first, second, out_dir / "iterations.svg", log=False)
    ]
    if include_time:
        written.append(
            _scatter([max(a.wall_time, 1e-3) for a, _ in pairs],
                     [max(b.wall_time, 1e-3) for _, b in pairs],
                     "time (s)", first, second, out_dir / "time.svg", log=True)
        )
    return written
