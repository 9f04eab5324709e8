"""Figure rendering for 2D oracle comparisons.

Everything draws through the Agg backend so the CLI can write image files
headlessly.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .model import ConvexBody, Cut
from .verify import (
    Forbidden,
    PolygonOracle,
    _grid_points,
    _plane_box,
    eval_body_batch,
    eval_cut_batch,
    forbidden_defect_batch,
)


def render_oracle_figure(body: ConvexBody, region: Forbidden, cut: Cut,
                         oracle: PolygonOracle, path: str,
                         grid_density: int = 300) -> None:
    """Write a PNG showing the body, the forbidden region, the closed-form
    hull description, and the rasterized oracle polygon."""
    bb = _plane_box(body)
    P = _grid_points(bb, grid_density)
    shape = (grid_density, grid_density)
    xs = P[:, 0].reshape(shape)
    ys = P[:, 1].reshape(shape)
    body_def = eval_body_batch(body, P).reshape(shape)
    forb = forbidden_defect_batch(region, P, body.epigraphical).reshape(shape)
    cut_def = eval_cut_batch(cut, P)
    cut_def = np.nan_to_num(cut_def, posinf=1e30, neginf=-1e30).reshape(shape)

    fig, ax = plt.subplots(figsize=(6, 6))
    ax.contourf(xs, ys, (body_def <= 0).astype(float),
                levels=[0.5, 1.5], colors=["#d0e4f5"])
    ax.contourf(xs, ys, ((forb < 0) & (body_def <= 0)).astype(float),
                levels=[0.5, 1.5], colors=["#f5c6c6"])
    ax.contour(xs, ys, body_def, levels=[0.0], colors="tab:blue",
               linewidths=1.2)
    ax.contour(xs, ys, cut_def, levels=[0.0], colors="tab:green",
               linewidths=1.5)
    if oracle.vertices.shape[0] >= 3:
        poly = np.vstack([oracle.vertices, oracle.vertices[:1]])
        ax.plot(poly[:, 0], poly[:, 1], color="black", linewidth=0.8,
                linestyle="--", label="oracle hull")
        ax.legend(loc="upper right", fontsize=8)
    ax.set_xlim(bb[0])
    ax.set_ylim(bb[1])
    ax.set_xlabel("x" if not body.epigraphical else "x")
    ax.set_ylabel("y" if not body.epigraphical else "t")
    ax.set_title(f"{body.family.value}: hull description vs oracle")
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
