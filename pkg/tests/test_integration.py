"""Cross-module paths: file formats through presets to the full pipeline."""

import numpy as np
import pytest

from lgssc.benchmarks import dataset_config, occluded3_gallery
from lgssc.dataio import load_gallery
from lgssc.datatypes import SolverConfig
from lgssc.metrics import accuracy
from lgssc.pipeline import run_lgssc
from lgssc.synth import SubspaceSpec, generate

pytestmark = pytest.mark.filterwarnings("ignore::lgssc.errors.NotConvergedWarning")


def write_pgm_dataset(dirpath, gallery):
    lo, hi = gallery.data.min(), gallery.data.max()
    imgs = np.clip((gallery.data - lo) / (hi - lo) * 255, 0, 255).astype(np.uint8)
    lines = ["filename,label"]
    for j in range(gallery.n_samples):
        name = f"face_{j:03d}.pgm"
        header = f"P5\n{gallery.width} {gallery.height}\n255\n".encode()
        (dirpath / name).write_bytes(header + imgs[:, j].tobytes())
        lines.append(f"{name},subject{gallery.labels[j]}")
    (dirpath / "labels.csv").write_text("\n".join(lines) + "\n")


def test_pgm_faces_with_yaleb_preset(tmp_path):
    # two clean subspaces rendered as 48x42 8-bit images, loaded back from a
    # PGM directory and clustered with the face-dataset parameter profile
    spec = SubspaceSpec(ambient_dim=48 * 42, subspace_dims=(5, 5),
                        points_per_subspace=20, noise_sigma=0.0, seed=0)
    write_pgm_dataset(tmp_path, generate(spec, 48, 42))
    gallery = load_gallery(tmp_path)
    assert gallery.data.shape == (2016, 40)
    cfg = dataset_config("yaleb", n_clusters=2, seed=0)
    labels, _, diagnostics = run_lgssc(gallery, cfg)
    assert accuracy(labels, gallery.labels) >= 98.0
    assert diagnostics.node_count() == 5  # s=2, p=4


def test_nine_patch_overlap_pipeline():
    # coil20-style layout: 3x3 overlapping grid, two levels
    g = occluded3_gallery(seed=0)
    cfg = SolverConfig(n_clusters=3, s=2, p=9, overlap_fraction=0.25,
                       lambda1=5.0, lambda2=1.0, fusion_alpha=20.0, seed=0)
    labels, _, diagnostics = run_lgssc(g, cfg)
    assert diagnostics.node_count() == 10
    assert accuracy(labels, g.labels) == 100.0


def test_worker_count_does_not_change_results(monkeypatch):
    g = occluded3_gallery(seed=3)
    cfg = SolverConfig(n_clusters=3, s=2, p=4, lambda1=5.0, lambda2=1.0, seed=3)
    monkeypatch.setenv("SUBSPACE_THREADS", "1")
    serial, C_serial, _ = run_lgssc(g, cfg)
    monkeypatch.setenv("SUBSPACE_THREADS", "4")
    parallel, C_parallel, _ = run_lgssc(g, cfg)
    np.testing.assert_array_equal(serial, parallel)
    np.testing.assert_array_equal(C_serial.values, C_parallel.values)
