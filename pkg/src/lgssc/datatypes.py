"""Shared domain types: galleries, coefficient matrices, embeddings and configs.

All types are immutable after construction and safe to share across threads.
"""

from dataclasses import dataclass, field
import numpy as np

from .errors import (
    DimensionMismatch,
    LengthMismatch,
    NonFinite,
    TooFewSamples,
    ZeroColumn,
)


def _frozen_array(a, dtype=float):
    out = np.array(a, dtype=dtype)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class DataGallery:
    """A D x N matrix of vectorized samples plus the 2-D image geometry.

    Columns are samples; rows are pixels in row-major order (row index
    varies slowest). ``labels`` is an optional length-N integer vector of
    ground-truth cluster ids.
    """

    data: np.ndarray
    height: int
    width: int
    labels: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "data", _frozen_array(self.data))
        if self.labels is not None:
            object.__setattr__(self, "labels", _frozen_array(self.labels, dtype=np.int64))

    @property
    def n_pixels(self):
        return self.data.shape[0]

    @property
    def n_samples(self):
        return self.data.shape[1]


def validate_gallery(g: DataGallery) -> DataGallery:
    """Check all gallery invariants and return the gallery unchanged.

    Raises
    ------
    DimensionMismatch
        If height * width differs from the data dimension, or labels have
        the wrong length.
    NonFinite
        If any entry is NaN or infinite.
    TooFewSamples
        If there are fewer than two samples.
    """
    if g.data.ndim != 2:
        raise DimensionMismatch(f"gallery data must be 2-D, got shape {g.data.shape}")
    d, n = g.data.shape
    if g.height <= 0 or g.width <= 0:
        raise DimensionMismatch(f"geometry must be positive, got {g.height}x{g.width}")
    if g.height * g.width != d:
        raise DimensionMismatch(
            f"geometry {g.height}x{g.width} = {g.height * g.width} does not match D = {d}"
        )
    if n < 2:
        raise TooFewSamples(f"need at least 2 samples, got {n}")
    if d < 1:
        raise DimensionMismatch("need at least one pixel")
    if not np.isfinite(g.data).all():
        raise NonFinite("gallery contains NaN or Inf entries")
    if g.labels is not None and g.labels.shape != (n,):
        raise DimensionMismatch(f"labels must have length {n}, got {g.labels.shape}")
    return g


def normalize_columns(g: DataGallery, tol: float = 1e-12) -> DataGallery:
    """Return a gallery whose columns all have unit l2 norm.

    Raises ZeroColumn if any column norm falls below ``tol``.
    """
    norms = np.linalg.norm(g.data, axis=0)
    bad = np.flatnonzero(norms < tol)
    if bad.size:
        raise ZeroColumn(f"column {bad[0]} has norm {norms[bad[0]]:.3e} < {tol:.0e}")
    return DataGallery(g.data / norms, g.height, g.width, g.labels)


@dataclass(frozen=True)
class CoefficientMatrix:
    """An N x N self-expressive coefficient matrix with exactly zero diagonal."""

    values: np.ndarray

    def __post_init__(self):
        v = _frozen_array(self.values)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise DimensionMismatch(f"coefficient matrix must be square, got {v.shape}")
        if not np.isfinite(v).all():
            raise NonFinite("coefficient matrix contains NaN or Inf")
        if np.any(np.diagonal(v) != 0.0):
            raise ValueError("coefficient matrix must have an exactly zero diagonal")
        object.__setattr__(self, "values", v)

    @property
    def n(self):
        return self.values.shape[0]


@dataclass(frozen=True)
class SpectralEmbedding:
    """An N x n embedding whose non-degenerate rows have unit l2 norm.

    ``degenerate`` flags rows that were numerically zero before row
    normalization; they are kept as zero rows rather than being scaled.
    """

    values: np.ndarray
    degenerate: np.ndarray = field(default=None)

    def __post_init__(self):
        v = _frozen_array(self.values)
        deg = self.degenerate
        if deg is None:
            deg = np.zeros(v.shape[0], dtype=bool)
        deg = _frozen_array(deg, dtype=bool)
        norms = np.linalg.norm(v[~deg], axis=1) if (~deg).any() else np.empty(0)
        if norms.size and np.max(np.abs(norms - 1.0)) > 1e-10:
            raise ValueError("non-degenerate embedding rows must have unit norm")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "degenerate", deg)


@dataclass(frozen=True)
class SideInfo:
    """Penalty matrix and group partition guiding an upper-level solve.

    ``theta`` holds pairwise penalties in [0, 2]; ``groups`` is a partition
    of sample indices (a tuple of disjoint index arrays covering 0..N-1).
    """

    theta: np.ndarray
    groups: tuple

    def __post_init__(self):
        t = _frozen_array(self.theta)
        if t.ndim != 2 or t.shape[0] != t.shape[1]:
            raise DimensionMismatch(f"theta must be square, got {t.shape}")
        if np.max(np.abs(t - t.T)) > 1e-10:
            raise ValueError("theta must be symmetric")
        if t.min() < -1e-12 or t.max() > 2.0 + 1e-12:
            raise ValueError("theta entries must lie in [0, 2]")
        groups = tuple(_frozen_array(gr, dtype=np.int64) for gr in self.groups)
        n = t.shape[0]
        seen = np.concatenate(groups) if groups else np.empty(0, dtype=np.int64)
        if any(gr.size == 0 for gr in groups):
            raise ValueError("groups must be nonempty")
        if seen.size != n or not np.array_equal(np.sort(seen), np.arange(n)):
            raise ValueError("groups must partition 0..N-1 exactly")
        object.__setattr__(self, "theta", t)
        object.__setattr__(self, "groups", groups)

    @classmethod
    def from_labels(cls, theta, labels):
        labels = np.asarray(labels)
        groups = tuple(np.flatnonzero(labels == c) for c in np.unique(labels))
        return cls(theta, groups)


@dataclass(frozen=True)
class SolverConfig:
    """Knobs for the hierarchical solver and its ADMM core.

    ``alpha`` sets the data-term weight through the largest off-diagonal
    inner product; ``beta`` is the ADMM penalty and defaults to that weight
    when left as None. ``kernel_threshold`` is the similarity level above
    which pairwise penalties are dropped. ``s`` and ``p`` shape the patch
    hierarchy (p = 4 means a 2x2 split per level, p = 9 a 3x3 split).
    ``fusion_alpha`` weighs the subspace-agreement term when sibling patch
    graphs are merged. ``disable_guidance`` forces zero penalties and
    singleton groups at every internal level, reducing guided solves to
    plain sparse solves.
    """

    alpha: float = 20.0
    lambda1: float = 5.0
    lambda2: float = 1.0
    beta: float | None = None
    kernel_threshold: float = 0.8
    max_iters: int = 200
    residual_tol: float = 1e-6
    s: int = 2
    p: int = 4
    overlap_fraction: float = 0.0
    n_clusters: int = 2
    seed: int = 0
    fusion_alpha: float = 20.0
    disable_guidance: bool = False

    def __post_init__(self):
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")
        if self.lambda1 < 0 or self.lambda2 < 0:
            raise ValueError("lambda1 and lambda2 must be nonnegative")
        if self.beta is not None and self.beta <= 0:
            raise ValueError("beta must be positive when given")
        if not 0.0 <= self.kernel_threshold <= 1.0:
            raise ValueError("kernel_threshold must lie in [0, 1]")
        if self.max_iters < 1:
            raise ValueError("max_iters must be positive")
        if self.residual_tol <= 0:
            raise ValueError("residual_tol must be positive")
        if self.s < 1:
            raise ValueError("s must be at least 1")
        if self.p not in (4, 9):
            raise ValueError("p must be 4 or 9")
        if not 0.0 <= self.overlap_fraction < 0.5:
            raise ValueError("overlap_fraction must lie in [0, 0.5)")
        if self.n_clusters < 1:
            raise ValueError("n_clusters must be positive")
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")
        if self.fusion_alpha < 0:
            raise ValueError("fusion_alpha must be nonnegative")


def check_same_length(a, b):
    """Raise LengthMismatch unless the two vectors have equal length."""
    if len(a) != len(b):
        raise LengthMismatch(f"length mismatch: {len(a)} vs {len(b)}")
