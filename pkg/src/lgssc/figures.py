"""Figure rendering for the report path.

Each helper writes a PNG next to the corresponding delimited output: the
2-D spectral embedding scatter, the coefficient magnitude heatmap, and the
per-seed paired accuracy chart emitted by the benchmark sweep.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def save_embedding_scatter(points2d, labels, path, title="spectral embedding"):
    points2d = np.asarray(points2d)
    labels = np.asarray(labels)
    fig, ax = plt.subplots(figsize=(6, 6))
    for lab in np.unique(labels):
        mask = labels == lab
        ax.scatter(points2d[mask, 0], points2d[mask, 1], s=24, label=f"cluster {lab}")
    ax.set_xlabel("component 2")
    ax.set_ylabel("component 3")
    ax.set_title(title)
    ax.legend(loc="best", fontsize=8)
    ax.set_aspect("equal")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_coefficient_heatmap(C, path, title="coefficient magnitudes"):
    C = np.asarray(C)
    fig, ax = plt.subplots(figsize=(6, 5))
    im = ax.imshow(np.abs(C), cmap="viridis", interpolation="nearest")
    fig.colorbar(im, ax=ax, shrink=0.85)
    ax.set_title(title)
    ax.set_xlabel("sample")
    ax.set_ylabel("sample")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_benchmark_chart(seeds, ssc_acc, lgssc_acc, path):
    seeds = np.asarray(seeds)
    ssc_acc = np.asarray(ssc_acc)
    lgssc_acc = np.asarray(lgssc_acc)
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.plot(seeds, ssc_acc, "o-", label=f"ssc (median {np.median(ssc_acc):.1f})")
    ax.plot(seeds, lgssc_acc, "s-", label=f"lgssc (median {np.median(lgssc_acc):.1f})")
    ax.set_xlabel("seed")
    ax.set_ylabel("accuracy (%)")
    ax.set_ylim(0, 105)
    ax.grid(alpha=0.3)
    ax.legend(loc="lower right")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
