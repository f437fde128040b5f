"""Synthetic union-of-subspaces galleries with contiguous corruption models.

Points are drawn from random low-dimensional linear subspaces of the pixel
space and rendered as images, so the occlusion model (overwriting a fixed
rectangle in a seeded subset of samples) mimics disguise artifacts like
glasses or a scarf sitting at the same image location in every affected
sample.
"""

from dataclasses import dataclass

import numpy as np

from .datatypes import DataGallery, normalize_columns, validate_gallery
from .errors import ZeroColumn


@dataclass(frozen=True)
class SubspaceSpec:
    """Geometry of the generated union of subspaces.

    ``shared_basis`` lets consecutive subspaces share that many basis
    vectors, producing the harder close-subspace regime.
    """

    ambient_dim: int
    subspace_dims: tuple
    points_per_subspace: int
    noise_sigma: float = 0.0
    seed: int = 0
    shared_basis: int = 0

    def __post_init__(self):
        object.__setattr__(self, "subspace_dims", tuple(self.subspace_dims))
        if any(d >= self.ambient_dim for d in self.subspace_dims):
            raise ValueError("each subspace dimension must be below the ambient dimension")
        if any(self.points_per_subspace < d + 1 for d in self.subspace_dims):
            raise ValueError("need at least d+1 points per subspace")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be nonnegative")
        if self.shared_basis < 0 or any(self.shared_basis > d for d in self.subspace_dims):
            raise ValueError("shared_basis must be between 0 and every subspace dimension")


@dataclass(frozen=True)
class CorruptionSpec:
    """Contiguous corruption: a fixed occlusion block or per-column gain.

    ``kind`` is one of "block_occlusion", "illumination_scale" or "none".
    ``block`` is (row0, col0, height, width) in image coordinates. ``fill``
    is a constant value, or None for uniform noise over the data range.
    """

    kind: str
    fraction_of_samples: float = 0.0
    block: tuple | None = None
    fill: float | None = None
    scale_range: tuple = (0.2, 1.0)
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("block_occlusion", "illumination_scale", "none"):
            raise ValueError(f"unknown corruption kind: {self.kind!r}")
        if not 0.0 <= self.fraction_of_samples <= 1.0:
            raise ValueError("fraction_of_samples must lie in [0, 1]")
        if self.kind == "block_occlusion" and self.block is None:
            raise ValueError("block_occlusion needs a block rectangle")


def _random_orthonormal(rng, d_ambient, d_sub, shared=None):
    """Orthonormal basis via QR of a Gaussian matrix, keeping ``shared`` columns."""
    fresh = rng.standard_normal((d_ambient, d_sub - (0 if shared is None else shared.shape[1])))
    raw = fresh if shared is None else np.hstack([shared, fresh])
    q, r = np.linalg.qr(raw)
    # fix sign so the draw is deterministic regardless of LAPACK conventions
    q = q * np.sign(np.diagonal(r))[None, :]
    return q[:, :d_sub]


def generate(spec: SubspaceSpec, height, width) -> DataGallery:
    """Draw a labeled gallery from the union of random subspaces.

    Each subspace gets a uniformly random orthonormal basis; points are the
    basis times standard normal coefficients plus isotropic noise, then
    unit-normalized per column.
    """
    if height * width != spec.ambient_dim:
        raise ValueError(
            f"geometry {height}x{width} does not match ambient dim {spec.ambient_dim}"
        )
    seeds = np.random.SeedSequence(spec.seed).spawn(len(spec.subspace_dims))
    columns = []
    labels = []
    prev_basis = None
    for i, d in enumerate(spec.subspace_dims):
        rng = np.random.default_rng(seeds[i])
        shared = None
        if spec.shared_basis and prev_basis is not None:
            shared = prev_basis[:, : spec.shared_basis]
        basis = _random_orthonormal(rng, spec.ambient_dim, d, shared)
        coeffs = rng.standard_normal((d, spec.points_per_subspace))
        pts = basis @ coeffs
        if spec.noise_sigma > 0:
            pts = pts + spec.noise_sigma * rng.standard_normal(pts.shape)
        columns.append(pts)
        labels.extend([i] * spec.points_per_subspace)
        prev_basis = basis
    data = np.hstack(columns)
    gallery = DataGallery(data, height, width, np.asarray(labels, dtype=np.int64))
    return normalize_columns(validate_gallery(gallery))


def corrupt(g: DataGallery, spec: CorruptionSpec) -> DataGallery:
    """Apply the corruption model to a seeded subset of columns.

    Occlusion overwrites the block's pixels; illumination multiplies whole
    columns by a random gain from ``scale_range``. Touched columns are
    re-normalized (untouched ones stay bit-identical), so a fully occluded
    zero fill surfaces as ZeroColumn.
    """
    if spec.kind == "none" or spec.fraction_of_samples == 0.0:
        return g
    n = g.n_samples
    n_hit = int(np.ceil(spec.fraction_of_samples * n))
    rng = np.random.default_rng(spec.seed)
    hit = rng.choice(n, size=n_hit, replace=False)
    data = np.array(g.data)

    if spec.kind == "illumination_scale":
        lo, hi = spec.scale_range
        gains = rng.uniform(lo, hi, size=n_hit)
        data[:, hit] *= gains[None, :]
    else:
        r0, c0, bh, bw = spec.block
        if r0 < 0 or c0 < 0 or r0 + bh > g.height or c0 + bw > g.width:
            raise ValueError(f"block {spec.block} exceeds the {g.height}x{g.width} image")
        rows = (np.arange(r0, r0 + bh)[:, None] * g.width + np.arange(c0, c0 + bw)[None, :]).ravel()
        if spec.fill is not None:
            data[np.ix_(rows, hit)] = spec.fill
        else:
            lo, hi = float(g.data.min()), float(g.data.max())
            data[np.ix_(rows, hit)] = rng.uniform(lo, hi, size=(rows.size, n_hit))

    norms = np.linalg.norm(data[:, hit], axis=0)
    bad = np.flatnonzero(norms < 1e-12)
    if bad.size:
        raise ZeroColumn(f"column {hit[bad[0]]} is (near) zero after corruption")
    data[:, hit] /= norms
    return DataGallery(data, g.height, g.width, g.labels)
