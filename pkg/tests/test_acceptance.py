"""Acceptance suite: every criterion at its stated tolerance.

Each test prints one PASS line on success (run with ``pytest -s`` to see
them inline); a failing assert marks the criterion red. Criterion 9 needs a
user-supplied face dataset and is skipped when SUBSPACE_YALEB_DIR is unset.
"""

import itertools
import json
import os
import time
import numpy as np
import pytest

from lgssc.benchmarks import clean3_gallery, occluded3_gallery, synthetic_config
from lgssc.cli import main as cli_main
from lgssc.datatypes import SolverConfig
from lgssc.fusion import FusionInput, summary_laplacian
from lgssc.metrics import accuracy, ari, nmi
from lgssc.pipeline import run_lgssc, run_ssc_baseline
from lgssc.prox import sparse_group_prox
from lgssc.solver import GuidedProblem, compute_mu, solve
from lgssc.spectral import Affinity, normalized_laplacian, smallest_eigenvectors

from oracles import (
    ari_pair_counting,
    brute_force_accuracy,
    largest_principal_angle,
    nmi_reference,
    plain_lasso_admm,
    smoothed_prox_minimizer,
)

pytestmark = pytest.mark.filterwarnings("ignore::lgssc.errors.NotConvergedWarning")


def _report(n, text):
    print(f"ACCEPTANCE {n}: PASS - {text}")


def test_criterion_1_prox_oracle_equivalence():
    t0 = time.perf_counter()
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(500):
        dim = int(rng.integers(1, 7))
        v = rng.standard_normal(dim) * 3
        w = rng.uniform(0, 1.5, dim)
        rho = float(rng.uniform(0, 1.5))
        out = sparse_group_prox(v, w, rho)
        ref = smoothed_prox_minimizer(v, w, rho)
        worst = max(worst, float(np.max(np.abs(out - ref))))
        assert worst < 1e-4
    elapsed = time.perf_counter() - t0
    assert elapsed < 30.0
    _report(1, f"500 instances, worst |prox - oracle| = {worst:.2e}, {elapsed:.1f}s")


def test_criterion_2_admm_fixed_point_and_specialization():
    rng = np.random.default_rng(202)
    cfg = SolverConfig(max_iters=200, residual_tol=1e-6)
    cfg_tight = SolverConfig(max_iters=3000, residual_tol=1e-12)
    worst_iters = 0
    worst_diff = 0.0
    for _ in range(20):
        X = rng.standard_normal((24, 12))
        X /= np.linalg.norm(X, axis=0)
        mu = compute_mu(X, 20.0)
        # fixed point within 200 iterations at tol 1e-6
        C, info = solve(GuidedProblem(X=X, mu=mu, beta=mu), cfg)
        assert info.converged and info.iterations <= 200
        worst_iters = max(worst_iters, info.iterations)
        # specialization equals an independently coded plain-lasso ADMM
        groups = tuple(np.array([i]) for i in range(12))
        spec_problem = GuidedProblem(
            X=X, mu=mu, beta=mu, theta=np.zeros((12, 12)), groups=groups,
            lambda1=1.0, lambda2=0.0,
        )
        C_spec, _ = solve(spec_problem, cfg_tight)
        ref = plain_lasso_admm(X, mu, mu, 3000)
        worst_diff = max(worst_diff, float(np.max(np.abs(C_spec.values - ref))))
        assert worst_diff < 1e-6
    _report(2, f"20 problems, max iterations {worst_iters}, max |C - ref| = {worst_diff:.2e}")


def test_criterion_3_subspace_preserving_recovery():
    t0 = time.perf_counter()
    g = clean3_gallery(seed=0)
    cfg = synthetic_config("clean3", seed=0)
    truth = np.asarray(g.labels)
    labels_ssc, C_ssc = run_ssc_baseline(g, cfg)
    labels_lg, C_lg, _ = run_lgssc(g, cfg)
    assert accuracy(labels_ssc, truth) == 100.0
    assert accuracy(labels_lg, truth) == 100.0
    min_ratio = 1.0
    for name, C in (("ssc", C_ssc), ("lgssc", C_lg)):
        mass = np.abs(C.values)
        for j in range(g.n_samples):
            ratio = mass[truth == truth[j], j].sum() / mass[:, j].sum()
            min_ratio = min(min_ratio, ratio)
            assert ratio >= 0.99
    elapsed = time.perf_counter() - t0
    assert elapsed < 10.0
    _report(3, f"both ACC = 100, min same-subspace mass ratio {min_ratio:.6f}, {elapsed:.1f}s")


@pytest.fixture(scope="module")
def occlusion_sweep():
    """Paired accuracies on the occlusion benchmark for tau in {0.7, 0.8, 0.9}."""
    start = time.perf_counter()
    acc = {"ssc": [], 0.7: [], 0.8: [], 0.9: []}
    for seed in range(20):
        g = occluded3_gallery(seed=seed)
        truth = np.asarray(g.labels)
        cfg = synthetic_config("occluded3", seed=seed)
        labels_ssc, _ = run_ssc_baseline(g, cfg)
        acc["ssc"].append(accuracy(labels_ssc, truth))
        for tau in (0.7, 0.8, 0.9):
            cfg_tau = SolverConfig(**{**cfg.__dict__, "kernel_threshold": tau})
            labels_lg, _, _ = run_lgssc(g, cfg_tau)
            acc[tau].append(accuracy(labels_lg, truth))
    acc["elapsed"] = time.perf_counter() - start
    return acc


def test_criterion_4_guidance_benefit_under_occlusion(occlusion_sweep):
    ssc = np.array(occlusion_sweep["ssc"])
    lgssc = np.array(occlusion_sweep[0.8])
    median_delta = float(np.median(lgssc - ssc))
    median_lg = float(np.median(lgssc))
    assert occlusion_sweep["elapsed"] < 300.0
    assert median_delta >= 10.0
    assert median_lg >= 90.0
    _report(
        4,
        f"median ACC delta {median_delta:.1f} (ssc {np.median(ssc):.1f} -> "
        f"lgssc {median_lg:.1f}), 20 seeds, {occlusion_sweep['elapsed']:.0f}s",
    )


def test_criterion_5_fusion_closed_form():
    def random_instance(seed):
        rng = np.random.default_rng(seed)
        n, p, dim = 12, 3, 3
        laps, embs = [], []
        for _ in range(p):
            raw = np.abs(rng.standard_normal((n, n))) * (rng.random((n, n)) < 0.6)
            A = Affinity(np.triu(raw, 1) + np.triu(raw, 1).T)
            L = normalized_laplacian(A)
            _, U = smallest_eigenvectors(L, dim)
            laps.append(L)
            embs.append(U)
        return FusionInput(tuple(laps), tuple(embs), float(rng.uniform(0.1, 3.0)))

    checked = 0
    seed = 0
    worst = 0.0
    while checked < 50:
        seed += 1
        inp = random_instance(seed)
        M = summary_laplacian(inp)
        w_ref, V_ref = np.linalg.eigh(M)
        if w_ref[3] - w_ref[2] < 1e-4:
            continue  # subspace ill-conditioned; draw another instance
        _, fused = smallest_eigenvectors(M, 3)
        angle = largest_principal_angle(fused, V_ref[:, :3])
        worst = max(worst, angle)
        assert angle < 1e-8
        checked += 1

    # p identical graphs: fused subspace equals the single-graph embedding
    inp0 = random_instance(999)
    L = inp0.laplacians[0]
    _, U = smallest_eigenvectors(L, 3)
    same = FusionInput((L, L, L, L), (U, U, U, U), 1.0)
    _, fused_same = smallest_eigenvectors(summary_laplacian(same), 3)
    angle_same = largest_principal_angle(fused_same, U)
    assert angle_same < 1e-6
    _report(5, f"50 instances, worst angle {worst:.2e}; identical-graph angle {angle_same:.2e}")


def test_criterion_6_metric_correctness():
    rng = np.random.default_rng(606)
    # accuracy vs exhaustive bijection search, N <= 8, k <= 3, exact
    for _ in range(200):
        n = int(rng.integers(2, 9))
        pred = rng.integers(0, 3, n)
        truth = rng.integers(0, 3, n)
        assert accuracy(pred, truth) == pytest.approx(
            brute_force_accuracy(pred, truth), abs=1e-12
        )
    # ARI vs explicit pair enumeration
    for _ in range(200):
        n = int(rng.integers(2, 12))
        pred = rng.integers(0, 4, n)
        truth = rng.integers(0, 3, n)
        assert ari(pred, truth) == pytest.approx(ari_pair_counting(pred, truth), abs=1e-12)
    # NMI vs an independent second coding
    for _ in range(200):
        n = int(rng.integers(2, 12))
        pred = rng.integers(0, 4, n)
        truth = rng.integers(0, 3, n)
        assert nmi(pred, truth) == pytest.approx(nmi_reference(pred, truth), abs=1e-10)
    # chance behavior of ARI
    vals = [
        ari(rng.integers(0, 4, 200), rng.integers(0, 4, 200)) for _ in range(1000)
    ]
    mean_ari = float(np.mean(vals))
    assert abs(mean_ari) < 2.0
    _report(6, f"assignment/pair-count/NMI oracles agree; chance ARI mean {mean_ari:+.3f}")


def test_criterion_7_run_determinism(tmp_path):
    out = tmp_path / "det"
    args = [
        "run", "--synthetic", "occluded3", "--n-clusters", "3", "--seed", "11",
        "--emit", "labels,metrics", "--output-dir", str(out),
    ]
    assert cli_main(args) == 0
    labels_first = (out / "labels.csv").read_bytes()
    metrics_first = json.loads((out / "metrics.json").read_text())
    assert cli_main(args) == 0
    labels_second = (out / "labels.csv").read_bytes()
    metrics_second = json.loads((out / "metrics.json").read_text())

    def strip_runtime(doc):
        if isinstance(doc, dict):
            return {k: strip_runtime(v) for k, v in doc.items() if k != "runtime_seconds"}
        if isinstance(doc, list):
            return [strip_runtime(v) for v in doc]
        return doc

    assert labels_first == labels_second
    assert strip_runtime(metrics_first) == strip_runtime(metrics_second)
    _report(7, "repeated run byte-identical (labels.csv) and field-identical (metrics.json)")


def test_criterion_8_threshold_insensitivity_band(occlusion_sweep):
    medians = {tau: float(np.median(occlusion_sweep[tau])) for tau in (0.7, 0.8, 0.9)}
    spread = max(medians.values()) - min(medians.values())
    assert spread <= 2.0
    _report(8, f"median ACC by tau {medians}, spread {spread:.2f} <= 2")


def _yaleb_groups():
    return [list(range(0, 10)), list(range(10, 20)), list(range(20, 30)), list(range(30, 38))]


def test_criterion_9_yaleb_two_subject(tmp_path):
    data_dir = os.environ.get("SUBSPACE_YALEB_DIR")
    if not data_dir:
        pytest.skip("SUBSPACE_YALEB_DIR not set; user-supplied dataset absent")
    from lgssc.benchmarks import dataset_config
    from lgssc.dataio import load_gallery
    from lgssc.datatypes import DataGallery

    g = load_gallery(data_dir)
    assert g.labels is not None, "labels.csv with subject ids is required"
    assert (g.height, g.width) == (48, 42), "expected 48x42 downsampled images"
    accs = []
    for group in _yaleb_groups():
        for a, b in itertools.combinations(group, 2):
            mask = np.isin(g.labels, [a, b])
            sub = DataGallery(
                g.data[:, mask], g.height, g.width,
                (np.asarray(g.labels)[mask] == b).astype(int),
            )
            cfg = dataset_config("yaleb", n_clusters=2, seed=0)
            labels, _, _ = run_lgssc(sub, cfg)
            accs.append(accuracy(labels, sub.labels))
    avg = float(np.mean(accs))
    assert avg >= 98.0
    _report(9, f"2-subject average ACC {avg:.2f} over {len(accs)} trials")
