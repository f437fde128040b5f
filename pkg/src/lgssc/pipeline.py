"""Bottom-up orchestration over the patch hierarchy.

Leaf patches get a plain sparse self-expressive solve. Every internal node
merges its children's graphs into a fused embedding, turns that into
pairwise penalties plus recommended groups, and runs the guided solve on
its own patch gallery. The root's coefficient matrix is what gets
spectrally clustered for the final labels.

Sibling nodes of one level are independent and solve concurrently (worker
threads; all shared inputs are read-only); levels form sequential barriers.
The SUBSPACE_THREADS environment variable caps the worker count, 0 meaning
one per CPU.
"""

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .datatypes import DataGallery, SideInfo, SolverConfig, normalize_columns, validate_gallery
from .errors import LgsscError
from .fusion import FusionInput, build_side_info, fuse
from .patches import build_hierarchy, extract_patch_gallery
from .solver import build_problem, solve
from .spectral import normalized_laplacian, smallest_eigenvectors, spectral_cluster, symmetrize


class NodeFailure(LgsscError):
    """A per-node stage failed; carries the node identity."""

    def __init__(self, level, index, cause):
        super().__init__(f"node (level={level}, index={index}) failed: {cause}")
        self.level = level
        self.index = index


@dataclass
class LevelResult:
    """Everything one node produces for its parent and for diagnostics."""

    node_id: tuple
    C: object
    L: object
    U: np.ndarray
    V_fused: object = None
    side_info: SideInfo | None = None
    solve_info: object = None
    kmeans_inertia: float | None = None


@dataclass
class NodeDiagnostics:
    """Scalar per-node record kept after the heavy matrices are dropped."""

    level: int
    index: int
    n_samples: int
    iterations: int
    converged: bool
    final_primal_residual: float
    final_dual_residual: float
    primal_residuals: list
    kmeans_inertia: float | None


@dataclass
class RunDiagnostics:
    nodes: list
    root_fused: object = None

    def node_count(self):
        return len(self.nodes)


def _seed(cfg: SolverConfig, level, index, purpose):
    """Stable per-use random seed derived from the config seed."""
    return np.random.SeedSequence(entropy=cfg.seed, spawn_key=(level, index, purpose))


def _assignment_inertia(points, groups):
    total = 0.0
    for g in groups:
        block = points[g]
        total += float(np.sum((block - block.mean(axis=0)) ** 2))
    return total


def _singleton_side_info(n):
    return SideInfo(np.zeros((n, n)), tuple(np.array([i]) for i in range(n)))


def _solve_node(gallery, node, cfg, children):
    patch = extract_patch_gallery(gallery, node)
    V_fused = None
    side = None
    inertia = None
    if children:
        finp = FusionInput(
            laplacians=tuple(r.L for r in children),
            embeddings=tuple(r.U for r in children),
            alpha_fusion=cfg.fusion_alpha,
        )
        V_fused = fuse(finp, cfg.n_clusters)
        if cfg.disable_guidance:
            side = _singleton_side_info(patch.n_samples)
        else:
            side = build_side_info(
                V_fused,
                cfg.n_clusters,
                cfg.kernel_threshold,
                _seed(cfg, node.level, node.index_in_level, 0),
            )
            inertia = _assignment_inertia(V_fused.values, side.groups)
    problem = build_problem(patch.data, cfg, side)
    C, info = solve(problem, cfg)
    L = normalized_laplacian(symmetrize(C))
    _, U = smallest_eigenvectors(L, cfg.n_clusters)
    return LevelResult(
        node_id=(node.level, node.index_in_level),
        C=C,
        L=L,
        U=U,
        V_fused=V_fused,
        side_info=side,
        solve_info=info,
        kmeans_inertia=inertia,
    )


def _worker_count(n_tasks):
    raw = os.environ.get("SUBSPACE_THREADS", "0")
    try:
        cap = int(raw)
    except ValueError:
        cap = 0
    if cap <= 0:
        cap = os.cpu_count() or 1
    return max(1, min(cap, n_tasks))


def run_lgssc(g: DataGallery, cfg: SolverConfig):
    """Full hierarchical run: returns (labels, root coefficients, diagnostics).

    Identical gallery, config and seed produce identical labels. Any node
    failure aborts the run with the node identity attached.
    """
    g = normalize_columns(validate_gallery(g))
    hier = build_hierarchy(g.height, g.width, cfg.s, cfg.p, cfg.overlap_fraction)

    results = {}
    diag_nodes = []
    for level in range(cfg.s, 0, -1):
        nodes = hier.nodes_by_level[level - 1]

        def solve_one(node):
            children = [results[(level + 1, ci)] for ci in node.children]
            try:
                return _solve_node(g, node, cfg, children)
            except LgsscError as e:
                raise NodeFailure(level, node.index_in_level, e) from e

        workers = _worker_count(len(nodes))
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                level_results = list(pool.map(solve_one, nodes))
        else:
            level_results = [solve_one(node) for node in nodes]

        for node, res in zip(nodes, level_results):
            results[(level, node.index_in_level)] = res
            diag_nodes.append(
                NodeDiagnostics(
                    level=level,
                    index=node.index_in_level,
                    n_samples=g.n_samples,
                    iterations=res.solve_info.iterations,
                    converged=res.solve_info.converged,
                    final_primal_residual=res.solve_info.primal_residuals[-1],
                    final_dual_residual=res.solve_info.dual_residuals[-1],
                    primal_residuals=list(res.solve_info.primal_residuals),
                    kmeans_inertia=res.kmeans_inertia,
                )
            )
        # children of this level are no longer needed; drop their matrices
        for key in [k for k in results if k[0] == level + 1]:
            del results[key]

    root = results[(1, 0)]
    labels = spectral_cluster(root.C, cfg.n_clusters, _seed(cfg, 0, 0, 1))
    diag_nodes.sort(key=lambda d: (d.level, d.index))
    diagnostics = RunDiagnostics(nodes=diag_nodes, root_fused=root.V_fused)
    return labels, root.C, diagnostics


def run_ssc_baseline(g: DataGallery, cfg: SolverConfig):
    """Plain sparse solve on the whole gallery plus spectral clustering."""
    g = normalize_columns(validate_gallery(g))
    problem = build_problem(g.data, cfg)
    C, _ = solve(problem, cfg)
    labels = spectral_cluster(C, cfg.n_clusters, _seed(cfg, 0, 0, 1))
    return labels, C
