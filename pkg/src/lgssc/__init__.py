"""Locally guided sparse subspace clustering.

A hierarchical patch pipeline: local patch graphs are fused on a Grassmann
manifold and the fused evidence (penalty matrix plus recommended groups)
guides a weighted sparse group lasso self-expressive solve, optimized by
ADMM. Spectral clustering of the root coefficient matrix yields labels.
"""

from .datatypes import (
    CoefficientMatrix,
    DataGallery,
    SideInfo,
    SolverConfig,
    SpectralEmbedding,
    normalize_columns,
    validate_gallery,
)
from .fusion import FusionInput, build_side_info, fuse, spectral_kernel, summary_laplacian
from .metrics import accuracy, ari, nmi
from .patches import PatchHierarchy, PatchNode, build_hierarchy, extract_patch_gallery
from .pipeline import run_lgssc, run_ssc_baseline
from .prox import block_threshold, soft_threshold, sparse_group_prox
from .solver import GuidedProblem, compute_mu, solve, update_C, update_Z
from .spectral import (
    Affinity,
    LaplacianMatrix,
    embedding_2d,
    kmeans,
    normalized_laplacian,
    spectral_cluster,
    spectral_embedding,
    symmetrize,
)
from .synth import CorruptionSpec, SubspaceSpec, corrupt, generate

__all__ = [
    "Affinity",
    "CoefficientMatrix",
    "CorruptionSpec",
    "DataGallery",
    "FusionInput",
    "GuidedProblem",
    "LaplacianMatrix",
    "PatchHierarchy",
    "PatchNode",
    "SideInfo",
    "SolverConfig",
    "SpectralEmbedding",
    "SubspaceSpec",
    "accuracy",
    "ari",
    "block_threshold",
    "build_hierarchy",
    "build_side_info",
    "compute_mu",
    "corrupt",
    "embedding_2d",
    "extract_patch_gallery",
    "fuse",
    "generate",
    "kmeans",
    "nmi",
    "normalize_columns",
    "normalized_laplacian",
    "run_lgssc",
    "run_ssc_baseline",
    "soft_threshold",
    "solve",
    "sparse_group_prox",
    "spectral_cluster",
    "spectral_embedding",
    "spectral_kernel",
    "summary_laplacian",
    "symmetrize",
    "update_C",
    "update_Z",
    "validate_gallery",
]

__version__ = "0.1.0"
