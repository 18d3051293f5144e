"""Matplotlib figures: covector palette, boundary atlas, report plots.

Everything renders off-screen; SVG output is byte-stable (fixed hash salt,
text kept as text, no date stamp).
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from matplotlib.colors import hsv_to_rgb  # noqa: E402

from .polygon import PolygonNormData  # noqa: E402

STABLE_RC = {"svg.fonttype": "none", "svg.hashsalt": "polyheis", "path.simplify": False}


def covector_hue(covector) -> float:
    c = np.asarray(covector, dtype=float)
    return float((np.arctan2(c[..., 1], c[..., 0]) / (2 * np.pi)) % 1.0)


def covector_rgb(covector, hue: float | None = None) -> tuple:
    h = covector_hue(covector) if hue is None else hue
    return tuple(float(x) for x in hsv_to_rgb((h, 0.65, 0.9)))


def _save(fig, path) -> None:
    path = str(path)
    meta = {"Date": None} if path.endswith(".svg") else {}
    if path.endswith(".png"):
        meta = {"Software": None}
    fig.savefig(path, metadata=meta)
    plt.close(fig)


def render_atlas(g: PolygonNormData, path, resolution: int = 24) -> list:
    """One chart per index i: the (s, a) square of the two-piece families.

    Horizontal is s in [0, 1]; vertical is a squashed to (-1, 1) by
    2 atan(a)/pi, with the psi families above the xi families.  Cells are
    colored by the linear piece (1-s) alpha_{i-1} + s alpha_i, the same key
    the sphere mesh uses, so the two pictures line up.
    """
    m = g.n_vertices
    labels = []
    with plt.rc_context(STABLE_RC):
        cols = min(m, 4)
        rows = -(-m // cols)
        fig, axes = plt.subplots(rows, cols, figsize=(3 * cols, 3 * rows), squeeze=False)
        s = np.linspace(0.0, 1.0, resolution + 1)
        a = np.linspace(-1.0, 1.0, 2 * resolution + 1)
        for i in range(m):
            ax = axes[i // cols][i % cols]
            sc = 0.5 * (s[1:] + s[:-1])
            beta = (1 - sc)[:, None] * g.alpha(i - 1) + sc[:, None] * g.alpha(i)
            hues = np.array([covector_hue(b) for b in beta])
            val = 0.55 + 0.4 * np.abs(0.5 * (a[1:] + a[:-1]))
            img = hsv_to_rgb(np.stack(np.broadcast_arrays(hues[None, :], 0.65, val[:, None]), -1))
            ax.pcolormesh(s, a, img[..., 0], color=None, shading="flat", alpha=0.0)
            ax.imshow(img, origin="lower", extent=(0, 1, -1, 1), aspect="auto",
                      interpolation="nearest")
            ax.axhline(0.0, color="k", lw=0.6)
            ax.text(0.5, 0.5, "psi", ha="center", fontsize=8)
            ax.text(0.5, -0.5, "xi", ha="center", fontsize=8)
            label = f"chart {i + 1}"
            ax.set_title(label)
            ax.set_xlabel("s")
            ax.set_ylabel("2 atan(a) / pi")
            labels.append(label)
        for k in range(m, rows * cols):
            axes[k // cols][k % cols].axis("off")
        fig.tight_layout()
        _save(fig, path)
    return labels


def plot_series(path, x, series: dict, title: str, xlabel: str, ylabel: str,
                logx: bool = True, logy: bool = True, threshold: float | None = None) -> None:
    """Line plot of one or more named series against a shared x axis."""
    with plt.rc_context(STABLE_RC):
        fig, ax = plt.subplots(figsize=(6, 4))
        for name in sorted(series):
            ax.plot(x, series[name], marker="o", ms=3, lw=1, label=name)
        if threshold is not None:
            ax.axhline(threshold, color="k", ls="--", lw=0.8, label="threshold")
        if logx:
            ax.set_xscale("log")
        if logy:
            ax.set_yscale("log")
        ax.set_title(title)
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        if len(series) <= 12:
            ax.legend(fontsize=6)
        fig.tight_layout()
        _save(fig, path)


def plot_histogram(path, values, title: str, xlabel: str, threshold: float | None = None) -> None:
    with plt.rc_context(STABLE_RC):
        fig, ax = plt.subplots(figsize=(6, 4))
        v = np.asarray(values, dtype=float)
        v = v[np.isfinite(v)]
        ax.hist(v, bins=40, color="#4a7fb0")
        if threshold is not None:
            ax.axvline(threshold, color="k", ls="--", lw=0.8)
        ax.set_title(title)
        ax.set_xlabel(xlabel)
        fig.tight_layout()
        _save(fig, path)


def plot_mesh(mesh, path, elev: float = 25.0, azim: float = -60.0) -> None:
    """Shaded 3D view of a sphere mesh, faces colored by their Pansu key."""
    from mpl_toolkits.mplot3d.art3d import Poly3DCollection

    from .mesh import key_hue

    with plt.rc_context(STABLE_RC):
        fig = plt.figure(figsize=(6, 5))
        ax = fig.add_subplot(projection="3d")
        tris = mesh.vertices[mesh.faces]
        colors = [covector_rgb((1.0, 0.0), hue=key_hue(k)) for k in mesh.keys]
        ax.add_collection3d(Poly3DCollection(tris, facecolors=colors, edgecolor="none"))
        lo, hi = mesh.vertices.min(axis=0), mesh.vertices.max(axis=0)
        ax.set_xlim(lo[0], hi[0])
        ax.set_ylim(lo[1], hi[1])
        ax.set_zlim(lo[2], hi[2])
        ax.view_init(elev=elev, azim=azim)
        ax.set_xlabel("x")
        ax.set_ylabel("y")
        ax.set_zlabel("z")
        fig.tight_layout()
        _save(fig, path)
