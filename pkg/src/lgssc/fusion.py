"""Merging sibling patch graphs into a summary embedding and side information.

Each of the p sibling patches contributes its Laplacian L_k and the
column-orthonormal embedding U_k of its n smallest eigenvectors. The merged
embedding minimizes  sum_k tr(V^T L_k V) - alpha * sum_k tr(V V^T U_k U_k^T)
over orthonormal V, i.e. it keeps each graph's connectivity while staying
close to every U_k in projection distance. The minimizer is the n smallest
eigenvectors of the summary matrix below.
"""

from dataclasses import dataclass

import numpy as np

from .datatypes import SideInfo, SpectralEmbedding
from .errors import DimensionMismatch
from .spectral import kmeans, row_normalize, smallest_eigenvectors


@dataclass(frozen=True)
class FusionInput:
    """The p sibling Laplacians and their orthonormal embeddings.

    The embeddings must be the raw eigenvector matrices (orthonormal
    columns, no row normalization), otherwise U U^T is not a projector.
    """

    laplacians: tuple
    embeddings: tuple
    alpha_fusion: float

    def __post_init__(self):
        object.__setattr__(self, "laplacians", tuple(self.laplacians))
        object.__setattr__(self, "embeddings", tuple(self.embeddings))
        if len(self.laplacians) != len(self.embeddings) or not self.laplacians:
            raise DimensionMismatch("need matching, nonempty laplacian/embedding lists")
        if self.alpha_fusion < 0:
            raise ValueError("alpha_fusion must be nonnegative")
        ns = {lap.values.shape[0] for lap in self.laplacians}
        ns |= {U.shape[0] for U in self.embeddings}
        if len(ns) != 1:
            raise DimensionMismatch(f"inconsistent sample counts: {sorted(ns)}")
        dims = {U.shape[1] for U in self.embeddings}
        if len(dims) != 1:
            raise DimensionMismatch(f"inconsistent embedding dimensions: {sorted(dims)}")
        for U in self.embeddings:
            if np.max(np.abs(U.T @ U - np.eye(U.shape[1]))) > 1e-8:
                raise ValueError("embedding columns must be orthonormal")


def summary_laplacian(inp: FusionInput):
    """sum_k L_k - alpha * sum_k U_k U_k^T, symmetrized against round-off."""
    M = np.zeros_like(inp.laplacians[0].values)
    for lap in inp.laplacians:
        M = M + lap.values
    for U in inp.embeddings:
        M = M - inp.alpha_fusion * (U @ U.T)
    return (M + M.T) / 2.0


def fuse(inp: FusionInput, n) -> SpectralEmbedding:
    """Row-normalized n smallest eigenvectors of the summary matrix."""
    _, U = smallest_eigenvectors(summary_laplacian(inp), n)
    return row_normalize(U)


def spectral_kernel(V: SpectralEmbedding):
    """Cosine similarities K = V V^T in the embedded space, clamped to [-1, 1].

    Exactly symmetric; rows flagged degenerate produce zero kernel rows.
    """
    K = V.values @ V.values.T
    K = (K + K.T) / 2.0
    return np.clip(K, -1.0, 1.0)


def build_side_info(V: SpectralEmbedding, n_clusters, kernel_threshold, seed) -> SideInfo:
    """Penalties and recommended groups from a fused embedding.

    theta = 1 - K penalizes pairs the local views disagree on; the penalty
    is dropped (set to zero) wherever K >= kernel_threshold, since high
    similarity already marks a likely same-subspace pair. Groups come from
    k-means on the embedding rows.
    """
    if not 0.0 <= kernel_threshold <= 1.0:
        raise ValueError("kernel_threshold must lie in [0, 1]")
    K = spectral_kernel(V)
    theta = 1.0 - K
    theta[K >= kernel_threshold] = 0.0
    labels = kmeans(V.values, n_clusters, seed)
    groups = tuple(np.flatnonzero(labels == c) for c in range(n_clusters))
    return SideInfo(theta, groups)
