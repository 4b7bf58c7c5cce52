from __future__ import annotations

from pathlib import Path
from typing import Optional, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
import pandas as pd  # noqa: E402
from rich.console import Console  # noqa: E402
from rich.table import Table  # noqa: E402

from ..lti.norms import NormResult  # noqa: E402
from ..robust.small_gain import StabilityReport  # noqa: E402
from .simulation import SimulationResult  # noqa: E402
from .sweep import DIVERGED  # noqa: E402

FLOAT_FORMAT = "%.17g"


def _get_divider(char: str = "=", length: int = 100, title: Optional[str] = None) -> str:
    """Horizontal rule for log sections, centered title optional."""
    if not title:
        return char * length
    pad = max(0, length - len(title) - 4)
    return f"{char * (pad // 2)} | {title} | {char * (pad - pad // 2)}"


def _bool_text(flag: bool) -> str:
    return "true" if flag else "false"


# ──────────────────────────── Files ────────────────────────────
def write_trajectory_csv(result: SimulationResult, out_dir: Path) -> Path:
    path = out_dir / "trajectory.csv"
    result.to_frame().to_csv(path, index=False, float_format=FLOAT_FORMAT)
    return path


def write_summary(result: SimulationResult, out_dir: Path) -> Path:
    path = out_dir / "summary.txt"
    lines = [
        f"J_T = {result.total_cost:.17g}",
        f"avg_cost = {result.avg_cost:.17g}",
        f"diverged = {_bool_text(result.diverged)}",
        f"t_div = {result.t_div if result.t_div is not None else 'none'}",
    ]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def write_sweep_csv(table: pd.DataFrame, out_dir: Path) -> Path:
    """beta,avg_cost,diverged with the `diverged` sentinel in place of a cost."""
    path = out_dir / "sweep.csv"
    frame = pd.DataFrame(
        {
            "beta": [FLOAT_FORMAT % b for b in table["beta"]],
            "avg_cost": [DIVERGED if div else FLOAT_FORMAT % c for c, div in zip(table["avg_cost"], table["diverged"])],
            "diverged": [_bool_text(bool(div)) for div in table["diverged"]],
        }
    )
    frame.to_csv(path, index=False)
    return path


def write_bisection_csv(report: StabilityReport, out_dir: Path) -> Path:
    path = out_dir / "bisection.csv"
    frame = report.trace_frame()
    frame["feasible"] = frame["feasible"].map(_bool_text)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)
    return path


# ──────────────────────────── Plots ────────────────────────────
def plot_series(
    t: Sequence[float],
    y: np.ndarray,
    path: Path,
    xlabel: str,
    ylabel: str,
    title: Optional[str] = None,
    marker: Optional[str] = None,
) -> Path:
    """Axis-labeled line chart saved as SVG."""
    fig, ax = plt.subplots(figsize=(8, 4))
    try:
        y = np.asarray(y, dtype=float)
        if y.ndim == 1:
            ax.plot(t, y, marker=marker)
        else:
            for i in range(y.shape[1]):
                ax.plot(t, y[:, i], marker=marker, label=f"{ylabel}{i}")
            ax.legend()
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        if title:
            ax.set_title(title)
        ax.grid(True, alpha=0.3)
        fig.tight_layout()
        fig.savefig(path, format="svg")
    finally:
        plt.close(fig)
    return path


def plot_simulation(result: SimulationResult, out_dir: Path, name: str = "") -> list:
    t = np.arange(len(result))
    suffix = f" ({name})" if name else ""
    return [
        plot_series(t, result.cost, out_dir / "cost.svg", "t", "cost", title=f"Per-step cost{suffix}"),
        plot_series(t, result.w_hat, out_dir / "w_hat.svg", "t", "w_hat", title=f"Disturbance estimate{suffix}"),
    ]


def plot_sweep(table: pd.DataFrame, out_dir: Path) -> Path:
    stable = table[~table["diverged"]]
    return plot_series(
        stable["beta"].to_numpy(),
        stable["avg_cost"].to_numpy(),
        out_dir / "sweep.svg",
        "beta",
        "average cost",
        title="Average per-step cost (stable runs)",
        marker="o",
    )


# ──────────────────────────── Console tables ────────────────────────────
def stability_table(report: StabilityReport) -> Table:
    table = Table(title="Stability bound", show_header=True, header_style="bold")
    table.add_column("quantity")
    table.add_column("value", justify="right")
    beta_text = f"unbounded (cap {report.beta_cap:.6g})" if report.unbounded else f"{report.beta_star:.6g}"
    table.add_row("delta", f"{report.delta_bound:.6g}")
    table.add_row("beta*", beta_text)
    table.add_row("d1", f"{report.scales.d1:.6g}")
    table.add_row("d2", f"{report.scales.d2:.6g}")
    table.add_row("scaled norm", f"{report.scales.scaled_norm:.6g}")
    table.add_row("certified", _bool_text(report.certified))
    return table


def norm_table(result: NormResult) -> Table:
    table = Table(title="Induced l_inf norm", show_header=True, header_style="bold")
    table.add_column("quantity")
    table.add_column("value", justify="right")
    table.add_row("norm", f"{result.value:.12g}")
    table.add_row("horizon", str(result.truncation_horizon))
    table.add_row("tail bound", f"{result.tail_bound:.3e}")
    return table


def print_table(table: Table, console: Optional[Console] = None) -> None:
    (console or Console()).print(table)
