"""Reproducible synthetic benchmarks and dataset parameter presets.

The synthetic presets are the desk-scale stand-ins for the face/object
experiments: ``clean3`` draws three independent low-dimensional subspaces
with no noise; ``occluded3`` renders three subspaces as 16x16 images and
plants a constant bright block over the top-left quadrant of 30% of the
samples, the scarf-style artifact that breaks global sparse coding while
leaving three of the four patch views clean.
"""

from dataclasses import replace

from .datatypes import SolverConfig
from .synth import CorruptionSpec, SubspaceSpec, corrupt, generate

# Dataset parameter profiles (data itself is user-supplied).
DATASET_PRESETS = {
    "yaleb": dict(alpha=20.0, lambda1=1.0, lambda2=10.0, p=4, s=2,
                  overlap_fraction=0.0, fusion_alpha=20.0),
    "ar": dict(alpha=100.0, lambda1=5.0, lambda2=10.0, p=4, s=3,
               overlap_fraction=0.0, fusion_alpha=100.0),
    "coil20": dict(alpha=20.0, lambda1=2.0, lambda2=10.0, p=9, s=2,
                   overlap_fraction=0.25, fusion_alpha=20.0),
}

SYNTHETIC_PRESETS = ("clean3", "occluded3")


def clean3_gallery(seed=0):
    """Three independent 3-dim subspaces in R^30 (6x5 images), noiseless."""
    spec = SubspaceSpec(
        ambient_dim=30,
        subspace_dims=(3, 3, 3),
        points_per_subspace=20,
        noise_sigma=0.0,
        seed=seed,
    )
    return generate(spec, 6, 5)


def occluded3_gallery(seed=0):
    """Three 4-dim subspaces as 16x16 images, bright block on 30% of samples."""
    spec = SubspaceSpec(
        ambient_dim=256,
        subspace_dims=(4, 4, 4),
        points_per_subspace=20,
        noise_sigma=0.01,
        seed=seed,
    )
    g = generate(spec, 16, 16)
    corruption = CorruptionSpec(
        kind="block_occlusion",
        fraction_of_samples=0.3,
        block=(0, 0, 8, 8),
        fill=1.0,
        seed=seed + 10_000,
    )
    return corrupt(g, corruption)


def synthetic_gallery(preset, seed=0):
    if preset == "clean3":
        return clean3_gallery(seed)
    if preset == "occluded3":
        return occluded3_gallery(seed)
    raise ValueError(f"unknown synthetic preset {preset!r}; choose from {SYNTHETIC_PRESETS}")


def synthetic_config(preset, seed=0):
    """Solver configuration matched to a synthetic preset."""
    if preset not in SYNTHETIC_PRESETS:
        raise ValueError(f"unknown synthetic preset {preset!r}; choose from {SYNTHETIC_PRESETS}")
    return SolverConfig(n_clusters=3, s=2, p=4, lambda1=5.0, lambda2=1.0,
                        fusion_alpha=20.0, seed=seed)


def dataset_config(preset, n_clusters, seed=0):
    """Solver configuration from a named dataset profile."""
    if preset not in DATASET_PRESETS:
        raise ValueError(f"unknown dataset preset {preset!r}; choose from {sorted(DATASET_PRESETS)}")
    return SolverConfig(n_clusters=n_clusters, seed=seed, **DATASET_PRESETS[preset])


def with_seed(cfg: SolverConfig, seed) -> SolverConfig:
    return replace(cfg, seed=seed)
