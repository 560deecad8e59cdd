"""Figure rendering for the CLI report paths.

Each function takes data produced by the analysis modules and writes a PNG
next to the delimited output. Rendering is optional everywhere; the analysis
modules never import this.
"""

from __future__ import annotations

from pathlib import Path
from typing import Optional, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402

from .simulate import Trajectory  # noqa: E402
from .stability import LozinskiiCertificate  # noqa: E402


def plot_branch_diagram(points, path: str | Path, title: Optional[str] = None) -> None:
    """Bifurcation diagram in the (R0, I_v*) plane.

    Solid markers/segments for stable roots, dotted for unstable.
    """
    fig, ax = plt.subplots(figsize=(6, 4))
    stable_r, stable_iv, unstable_r, unstable_iv = [], [], [], []
    for pt in points:
        for root in pt.roots:
            if root.stable:
                stable_r.append(pt.r0)
                stable_iv.append(root.i_v_star)
            else:
                unstable_r.append(pt.r0)
                unstable_iv.append(root.i_v_star)
    ax.plot(stable_r, stable_iv, "k.", ms=3, label="stable")
    ax.plot(unstable_r, unstable_iv, "k.", ms=3, mfc="none", alpha=0.35, label="unstable")
    ax.axvline(1.0, color="gray", lw=0.8, ls=":")
    ax.set_xlabel(r"$R_0$")
    ax.set_ylabel(r"$I_v^*$")
    if title:
        ax.set_title(title)
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_trajectory(traj: Trajectory, path: str | Path) -> None:
    """Compartment time series of one run."""
    fig, ax = plt.subplots(figsize=(6, 4))
    labels = (("$S_h$", "$I_h$", "$S_v$", "$I_v$") if traj.system == "full"
              else ("$S_h$", "$I_h$", "$I_v$"))
    for i, lab in enumerate(labels):
        ax.plot(traj.times, traj.states[:, i], label=lab)
    ax.set_xlabel("t (days)")
    ax.set_ylabel("individuals")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_surface(pi_values: Sequence[float], b_values: Sequence[float],
                 values: np.ndarray, quantity: str, path: str | Path) -> None:
    """Heatmap of an R0 or theta surface over (pi, b)."""
    fig, ax = plt.subplots(figsize=(6, 4.5))
    mesh = ax.pcolormesh(np.asarray(b_values), np.asarray(pi_values),
                         np.asarray(values), shading="auto", cmap="viridis")
    fig.colorbar(mesh, ax=ax, label=quantity)
    ax.set_xlabel("b (bed-net usage)")
    ax.set_ylabel(r"$\pi$ (vector bias)")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_certificate(cert: LozinskiiCertificate, path: str | Path) -> None:
    """Per-trajectory time-averaged Lozinskii bounds against zero."""
    fig, ax = plt.subplots(figsize=(6, 4))
    q = cert.per_trajectory_q
    ax.plot(range(len(q)), q, "k.", ms=4)
    ax.axhline(0.0, color="red", lw=0.8, label="certification threshold")
    ax.set_xlabel("trajectory index")
    ax.set_ylabel(r"$\bar q_2$ estimate (1/day)")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
