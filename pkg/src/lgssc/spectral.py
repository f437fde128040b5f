"""Spectral machinery: affinity, normalized Laplacian, embedding, k-means."""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .datatypes import CoefficientMatrix, SpectralEmbedding, _frozen_array
from .errors import DimensionMismatch, EigFailure


@dataclass(frozen=True)
class Affinity:
    """A symmetric nonnegative N x N affinity with zero diagonal."""

    values: np.ndarray

    def __post_init__(self):
        v = _frozen_array(self.values)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise DimensionMismatch(f"affinity must be square, got {v.shape}")
        if np.max(np.abs(v - v.T)) > 1e-12:
            raise ValueError("affinity must be symmetric")
        if v.min() < 0:
            raise ValueError("affinity entries must be nonnegative")
        if np.any(np.diagonal(v) != 0.0):
            raise ValueError("affinity diagonal must be zero")
        object.__setattr__(self, "values", v)


@dataclass(frozen=True)
class LaplacianMatrix:
    """A symmetric normalized graph Laplacian."""

    values: np.ndarray

    def __post_init__(self):
        v = _frozen_array(self.values)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise DimensionMismatch(f"laplacian must be square, got {v.shape}")
        if np.max(np.abs(v - v.T)) > 1e-10:
            raise ValueError("laplacian must be symmetric")
        object.__setattr__(self, "values", v)


def symmetrize(C: CoefficientMatrix) -> Affinity:
    """Affinity |C| + |C^T| with zero diagonal."""
    A = np.abs(C.values) + np.abs(C.values.T)
    np.fill_diagonal(A, 0.0)
    return Affinity(A)


def normalized_laplacian(A: Affinity) -> LaplacianMatrix:
    """L = I - D^{-1/2} A D^{-1/2} with degrees D_kk = sum_j A_kj.

    A zero-degree vertex gets D^{-1/2} entry 0, leaving its row equal to
    the identity row (the vertex becomes its own component).
    """
    v = A.values
    deg = v.sum(axis=1)
    inv_sqrt = np.where(deg > 0, 1.0 / np.sqrt(np.maximum(deg, 1e-300)), 0.0)
    L = np.eye(v.shape[0]) - inv_sqrt[:, None] * v * inv_sqrt[None, :]
    return LaplacianMatrix((L + L.T) / 2.0)


def smallest_eigenvectors(M, n):
    """Eigenvectors of the ``n`` smallest eigenvalues of a symmetric matrix.

    Columns are sorted by eigenvalue and sign-stabilized so the largest
    magnitude entry of each eigenvector is positive.

    Returns (eigenvalues, eigenvectors).
    """
    values = M.values if hasattr(M, "values") else np.asarray(M)
    if n > values.shape[0]:
        raise DimensionMismatch(f"requested {n} eigenvectors from size {values.shape[0]}")
    try:
        w, U = scipy.linalg.eigh(values, subset_by_index=[0, n - 1])
    except scipy.linalg.LinAlgError as e:
        raise EigFailure(str(e)) from e
    for j in range(U.shape[1]):
        i = int(np.argmax(np.abs(U[:, j])))
        if U[i, j] < 0:
            U[:, j] = -U[:, j]
    return w, U


def row_normalize(U, tol=1e-12):
    """Scale rows to unit norm; rows below ``tol`` stay zero and are flagged."""
    norms = np.linalg.norm(U, axis=1)
    degenerate = norms < tol
    safe = np.where(degenerate, 1.0, norms)
    V = U / safe[:, None]
    V[degenerate] = 0.0
    return SpectralEmbedding(V, degenerate)


def spectral_embedding(L: LaplacianMatrix, n) -> SpectralEmbedding:
    """Row-normalized matrix of the ``n`` smallest Laplacian eigenvectors."""
    _, U = smallest_eigenvectors(L, n)
    return row_normalize(U)


@dataclass
class KMeansResult:
    labels: np.ndarray
    inertia: float
    centers: np.ndarray


def _kmeanspp_init(points, k, rng):
    n = points.shape[0]
    centers = np.empty((k, points.shape[1]))
    centers[0] = points[rng.integers(n)]
    d2 = np.sum((points - centers[0]) ** 2, axis=1)
    for c in range(1, k):
        total = d2.sum()
        if total <= 0:
            centers[c] = points[rng.integers(n)]
            continue
        probs = d2 / total
        centers[c] = points[rng.choice(n, p=probs)]
        d2 = np.minimum(d2, np.sum((points - centers[c]) ** 2, axis=1))
    return centers


def _lloyd(points, centers, max_iters):
    k = centers.shape[0]
    labels = None
    for _ in range(max_iters):
        d2 = np.sum((points[:, None, :] - centers[None, :, :]) ** 2, axis=2)
        new_labels = np.argmin(d2, axis=1)
        # empty-cluster repair: hand the farthest point to the empty cluster
        for c in range(k):
            if not np.any(new_labels == c):
                far = int(np.argmax(d2[np.arange(len(points)), new_labels]))
                new_labels[far] = c
                d2[far, :] = np.inf
                d2[far, c] = 0.0
        if labels is not None and np.array_equal(new_labels, labels):
            break
        labels = new_labels
        for c in range(k):
            centers[c] = points[labels == c].mean(axis=0)
    d2 = np.sum((points[:, None, :] - centers[None, :, :]) ** 2, axis=2)
    inertia = float(d2[np.arange(len(points)), labels].sum())
    return labels, inertia, centers


def kmeans_fit(points, k, seed, n_restarts=20, max_iters=300) -> KMeansResult:
    """Seeded k-means++ with restarts; best run by within-cluster SSE.

    Deterministic for a fixed seed; every returned cluster is nonempty.
    """
    points = np.asarray(points, dtype=float)
    n = points.shape[0]
    if k > n:
        raise DimensionMismatch(f"k = {k} exceeds the number of points {n}")
    if k == 1:
        center = points.mean(axis=0, keepdims=True)
        inertia = float(np.sum((points - center) ** 2))
        return KMeansResult(np.zeros(n, dtype=np.int64), inertia, center)
    rng = np.random.default_rng(seed)
    best = None
    for _ in range(n_restarts):
        centers = _kmeanspp_init(points, k, rng)
        labels, inertia, centers = _lloyd(points, centers.copy(), max_iters)
        if best is None or inertia < best.inertia:
            best = KMeansResult(labels.astype(np.int64), inertia, centers)
    return best


def kmeans(points, k, seed, n_restarts=20, max_iters=300):
    """Cluster rows of ``points`` into ``k`` groups; returns labels only."""
    return kmeans_fit(points, k, seed, n_restarts, max_iters).labels


def spectral_cluster(C: CoefficientMatrix, n, seed):
    """Symmetrize, embed with the n smallest eigenvectors, then k-means."""
    L = normalized_laplacian(symmetrize(C))
    V = spectral_embedding(L, n)
    return kmeans(V.values, n, seed)


def embedding_2d(C: CoefficientMatrix):
    """Two-dimensional view from the 2nd and 3rd smallest eigenvectors.

    Rows are l2-normalized like the clustering embedding; returns an N x 2
    array (degenerate rows zero).
    """
    L = normalized_laplacian(symmetrize(C))
    _, U = smallest_eigenvectors(L, 3)
    return row_normalize(U[:, 1:3]).values
