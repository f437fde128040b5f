"""Command line interface: run, bench, gen, inspect.

``run`` executes one experiment (data file or synthetic preset) and writes
the requested artifacts into the output directory. ``bench`` sweeps seeds
with paired baseline/guided runs and emits a per-seed CSV. ``gen`` writes a
synthetic dataset to disk. ``inspect`` prints a gallery and hierarchy
summary. All logging goes to stderr; results go to files and stdout only.

A JSON config file may supply any of the run options (keys match the long
flag names with dashes replaced by underscores); explicit flags win. The
``SUBSPACE_THREADS`` environment variable caps worker parallelism, both for
bench seeds and for same-level patch solves (0 = one worker per CPU).
"""

import argparse
import dataclasses
import json
import logging
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import benchmarks, dataio
from .datatypes import SolverConfig
from .errors import LgsscError
from .metrics import accuracy, ari, nmi
from .patches import build_hierarchy
from .pipeline import run_lgssc
from .spectral import embedding_2d

log = logging.getLogger("lgssc")

EMIT_CHOICES = (
    "labels",
    "metrics",
    "coefficient_matrix",
    "embedding_2d",
    "per_node_diagnostics",
    "figures",
)
ALGO_CHOICES = ("ssc", "lgssc")


@dataclasses.dataclass
class ExperimentConfig:
    """Everything one experiment needs; mirrors the CLI flags."""

    data: str | None = None
    format: str = "auto"
    synthetic: str | None = None
    preset: str | None = None
    n_clusters: int | None = None
    alpha: float = 20.0
    lambda1: float = 5.0
    lambda2: float = 1.0
    beta: float | None = None
    kernel_threshold: float = 0.8
    max_iters: int = 200
    residual_tol: float = 1e-6
    levels: int = 2
    patches: int = 4
    overlap_fraction: float = 0.0
    fusion_alpha: float = 20.0
    seed: int = 0
    algorithms: tuple = ("ssc", "lgssc")
    emit: tuple = ("labels", "metrics")
    output_dir: str = "results"

    def solver_config(self) -> SolverConfig:
        return SolverConfig(
            alpha=self.alpha,
            lambda1=self.lambda1,
            lambda2=self.lambda2,
            beta=self.beta,
            kernel_threshold=self.kernel_threshold,
            max_iters=self.max_iters,
            residual_tol=self.residual_tol,
            s=self.levels,
            p=self.patches,
            overlap_fraction=self.overlap_fraction,
            n_clusters=self.n_clusters,
            seed=self.seed,
            fusion_alpha=self.fusion_alpha,
        )


def _config_from_sources(args) -> ExperimentConfig:
    """Merge sources: defaults < dataset preset < config file < CLI flags."""
    cfg = ExperimentConfig()
    file_values = {}
    if args.config:
        try:
            file_values = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as e:
            raise LgsscError(f"cannot read config file {args.config}: {e}") from e
        unknown = set(file_values) - {f.name for f in dataclasses.fields(ExperimentConfig)}
        if unknown:
            raise LgsscError(f"unknown config keys: {sorted(unknown)}")

    flag_values = {
        name: getattr(args, name)
        for name in (f.name for f in dataclasses.fields(ExperimentConfig))
        if getattr(args, name, None) is not None
    }
    preset = flag_values.get("preset", file_values.get("preset"))
    if preset:
        if preset not in benchmarks.DATASET_PRESETS:
            raise LgsscError(f"unknown preset {preset!r}")
        for key, value in benchmarks.DATASET_PRESETS[preset].items():
            setattr(cfg, {"s": "levels", "p": "patches"}.get(key, key), value)
        cfg.preset = preset
    for source in (file_values, flag_values):
        for name, value in source.items():
            setattr(cfg, name, tuple(value) if isinstance(value, list) else value)
    return cfg


def _load_experiment_gallery(cfg: ExperimentConfig):
    if cfg.data and cfg.synthetic:
        raise LgsscError("give either --data or --synthetic, not both")
    if cfg.synthetic:
        log.info("generating synthetic preset %s (seed %d)", cfg.synthetic, cfg.seed)
        return benchmarks.synthetic_gallery(cfg.synthetic, cfg.seed)
    if not cfg.data:
        raise LgsscError("no dataset: give --data or --synthetic")
    log.info("loading gallery from %s", cfg.data)
    return dataio.load_gallery(cfg.data, cfg.format)


def _resolve_n_clusters(cfg: ExperimentConfig, gallery):
    if cfg.n_clusters is not None:
        return cfg.n_clusters
    if gallery.labels is not None:
        return int(len(np.unique(gallery.labels)))
    raise LgsscError("--n-clusters is required when the dataset has no labels")


def _score(labels, truth):
    if truth is None:
        return {"acc": None, "nmi": None, "ari": None}
    return {
        "acc": accuracy(labels, truth),
        "nmi": nmi(labels, truth),
        "ari": ari(labels, truth),
    }


def _run_algorithms(gallery, solver_cfg, algorithms):
    """Run the requested algorithms; returns per-algorithm results.

    The baseline runs as the single-level pipeline (no patch level exists,
    so it is the plain sparse solve) to get the same solver diagnostics.
    """
    out = {}
    for algo in algorithms:
        t0 = time.perf_counter()
        cfg = solver_cfg if algo == "lgssc" else dataclasses.replace(solver_cfg, s=1)
        labels, C, diagnostics = run_lgssc(gallery, cfg)
        solver_summary = {
            "nodes": diagnostics.node_count(),
            "all_converged": all(d.converged for d in diagnostics.nodes),
            "max_final_primal_residual": max(
                d.final_primal_residual for d in diagnostics.nodes
            ),
            "root_iterations": next(
                d.iterations for d in diagnostics.nodes if d.level == 1
            ),
        }
        elapsed = time.perf_counter() - t0
        out[algo] = {
            "labels": labels,
            "C": C,
            "diagnostics": diagnostics,
            "runtime_seconds": elapsed,
            "solver": solver_summary,
        }
        log.info("%s finished in %.2f s", algo, elapsed)
    return out


def _diagnostics_payload(diagnostics):
    return {
        "nodes": [
            {
                "level": d.level,
                "index": d.index,
                "iterations": d.iterations,
                "converged": bool(d.converged),
                "final_primal_residual": d.final_primal_residual,
                "final_dual_residual": d.final_dual_residual,
                "primal_residuals": d.primal_residuals,
                "kmeans_inertia": d.kmeans_inertia,
            }
            for d in diagnostics.nodes
        ]
    }


def run_experiment(cfg: ExperimentConfig) -> int:
    """Load or generate data, run the selected algorithms, write artifacts."""
    gallery = _load_experiment_gallery(cfg)
    cfg.n_clusters = _resolve_n_clusters(cfg, gallery)
    solver_cfg = cfg.solver_config()
    algorithms = tuple(a for a in ALGO_CHOICES if a in cfg.algorithms)
    if not algorithms:
        raise LgsscError(f"no valid algorithm in {cfg.algorithms}; choose from {ALGO_CHOICES}")
    emit = set(cfg.emit)
    unknown = emit - set(EMIT_CHOICES)
    if unknown:
        raise LgsscError(f"unknown emit flags: {sorted(unknown)}")

    outdir = Path(cfg.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)

    t0 = time.perf_counter()
    results = _run_algorithms(gallery, solver_cfg, algorithms)
    total = time.perf_counter() - t0
    primary = "lgssc" if "lgssc" in results else "ssc"

    if "labels" in emit:
        dataio.write_labels_csv(results[primary]["labels"], outdir / "labels.csv")
        for algo, res in results.items():
            dataio.write_labels_csv(res["labels"], outdir / f"labels_{algo}.csv")

    if "metrics" in emit:
        payload = {
            "schema": "lgssc-metrics-v1",
            "n_samples": gallery.n_samples,
            "n_clusters": cfg.n_clusters,
            "has_ground_truth": gallery.labels is not None,
            "nmi_normalization": "sqrt",
            "runtime_seconds": total,
            "config": _config_echo(cfg),
            "algorithms": {
                algo: {
                    **_score(res["labels"], gallery.labels),
                    "runtime_seconds": res["runtime_seconds"],
                    "solver": res["solver"],
                }
                for algo, res in results.items()
            },
        }
        dataio.write_metrics_json(payload, outdir / "metrics.json")

    points2d = None
    if "embedding_2d" in emit or "figures" in emit:
        points2d = embedding_2d(results[primary]["C"])
        plot_labels = gallery.labels if gallery.labels is not None else results[primary]["labels"]
    if "embedding_2d" in emit:
        dataio.write_embedding_csv(points2d, plot_labels, outdir / "embedding2d.csv")
    if "coefficient_matrix" in emit:
        dataio.save_matrix_uosg(results[primary]["C"].values, outdir / "coef.bin")
    if "per_node_diagnostics" in emit:
        dataio.write_metrics_json(
            _diagnostics_payload(results[primary]["diagnostics"]),
            outdir / "diagnostics.json",
        )
    if "figures" in emit:
        from . import figures

        figures.save_embedding_scatter(points2d, plot_labels, outdir / "embedding2d.png")
        figures.save_coefficient_heatmap(
            results[primary]["C"].values, outdir / "coef_heatmap.png"
        )

    for algo, res in results.items():
        scores = _score(res["labels"], gallery.labels)
        line = f"{algo}: "
        if scores["acc"] is None:
            line += "no ground truth"
        else:
            line += f"acc={scores['acc']:.2f} nmi={scores['nmi']:.2f} ari={scores['ari']:.2f}"
        print(line)
    return 0


def cmd_run(args):
    return run_experiment(_config_from_sources(args))


def _config_echo(cfg: ExperimentConfig):
    echo = dataclasses.asdict(cfg)
    echo["algorithms"] = list(cfg.algorithms)
    echo["emit"] = list(cfg.emit)
    return echo


def _bench_worker(payload):
    """One paired seed of the benchmark sweep; must stay picklable."""
    seed = payload["seed"]
    cfg = ExperimentConfig(**payload["config"])
    cfg.seed = seed
    gallery = _load_experiment_gallery(cfg)
    cfg.n_clusters = _resolve_n_clusters(cfg, gallery)
    solver_cfg = cfg.solver_config()
    results = _run_algorithms(gallery, solver_cfg, ("ssc", "lgssc"))
    row = {"seed": seed}
    for algo in ("ssc", "lgssc"):
        row.update(
            {f"{algo}_{k}": v for k, v in _score(results[algo]["labels"], gallery.labels).items()}
        )
    return row


def _bench_workers():
    raw = os.environ.get("SUBSPACE_THREADS", "0")
    try:
        cap = int(raw)
    except ValueError:
        raise LgsscError(f"SUBSPACE_THREADS must be an integer, got {raw!r}")
    if cap < 0:
        raise LgsscError("SUBSPACE_THREADS must be >= 0")
    return cap if cap > 0 else (os.cpu_count() or 1)


def cmd_bench(args):
    cfg = _config_from_sources(args)
    if not cfg.synthetic and not cfg.data:
        cfg.synthetic = "occluded3"
        cfg.n_clusters = 3
    base = dataclasses.asdict(cfg)
    base.pop("seed")
    payloads = [
        {"seed": cfg.seed + i, "config": dict(base, seed=cfg.seed + i)}
        for i in range(args.seeds)
    ]

    workers = min(_bench_workers(), len(payloads))
    log.info("bench: %d seeds on %d worker(s)", len(payloads), workers)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_bench_worker, payloads))
    else:
        rows = [_bench_worker(p) for p in payloads]

    outdir = Path(cfg.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    columns = ["seed", "ssc_acc", "ssc_nmi", "ssc_ari", "lgssc_acc", "lgssc_nmi", "lgssc_ari"]
    with open(outdir / "bench.csv", "w") as f:
        f.write(",".join(columns + ["acc_delta"]) + "\n")
        for row in rows:
            delta = row["lgssc_acc"] - row["ssc_acc"]
            f.write(
                ",".join([str(row["seed"])] + [f"{row[c]:.6f}" for c in columns[1:]])
                + f",{delta:.6f}\n"
            )

    ssc_acc = np.array([r["ssc_acc"] for r in rows])
    lgssc_acc = np.array([r["lgssc_acc"] for r in rows])
    if "figures" in cfg.emit:
        from . import figures

        figures.save_benchmark_chart(
            [r["seed"] for r in rows], ssc_acc, lgssc_acc, outdir / "bench.png"
        )
    print(
        f"seeds={len(rows)} ssc_median_acc={np.median(ssc_acc):.2f} "
        f"lgssc_median_acc={np.median(lgssc_acc):.2f} "
        f"median_delta={np.median(lgssc_acc - ssc_acc):.2f}"
    )
    return 0


def cmd_gen(args):
    gallery = benchmarks.synthetic_gallery(args.synthetic, args.seed)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    if args.format == "uosg":
        dataio.save_gallery_uosg(gallery, out)
    else:
        log.warning("CSV galleries carry no labels; ground truth is dropped")
        dataio.save_gallery_csv(gallery, out)
    print(f"wrote {gallery.n_pixels}x{gallery.n_samples} gallery to {out}")
    return 0


def cmd_inspect(args):
    gallery = dataio.load_gallery(args.data, args.format)
    norms = np.linalg.norm(gallery.data, axis=0)
    print(f"gallery: D={gallery.n_pixels} N={gallery.n_samples} "
          f"geometry={gallery.height}x{gallery.width}")
    print(f"column norms: min={norms.min():.6g} max={norms.max():.6g}")
    if gallery.labels is None:
        print("labels: none")
    else:
        unique, counts = np.unique(gallery.labels, return_counts=True)
        print(f"labels: {len(unique)} classes, sizes {counts.tolist()}")
    hierarchy = build_hierarchy(
        gallery.height, gallery.width, args.levels, args.patches, args.overlap_fraction
    )
    for level_nodes in hierarchy.nodes_by_level:
        level = level_nodes[0].level
        shapes = sorted({(n.height, n.width) for n in level_nodes})
        print(f"level {level}: {len(level_nodes)} node(s), tile shapes {shapes}")
    return 0


def _add_run_flags(p):
    p.add_argument("--config", help="JSON config file; flags override its values")
    p.add_argument("--data", help="dataset path (CSV, UOSG binary, or PGM directory)")
    p.add_argument("--format", choices=("auto", "csv", "uosg", "pgm"), default=None)
    p.add_argument("--synthetic", choices=benchmarks.SYNTHETIC_PRESETS,
                   help="generate a synthetic preset instead of loading data")
    p.add_argument("--preset", choices=sorted(benchmarks.DATASET_PRESETS),
                   help="named dataset parameter profile")
    p.add_argument("--n-clusters", dest="n_clusters", type=int)
    p.add_argument("--alpha", type=float)
    p.add_argument("--lambda1", type=float)
    p.add_argument("--lambda2", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--kernel-threshold", dest="kernel_threshold", type=float)
    p.add_argument("--max-iters", dest="max_iters", type=int)
    p.add_argument("--residual-tol", dest="residual_tol", type=float)
    p.add_argument("--levels", type=int)
    p.add_argument("--patches", type=int, choices=(4, 9))
    p.add_argument("--overlap-fraction", dest="overlap_fraction", type=float)
    p.add_argument("--fusion-alpha", dest="fusion_alpha", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--algorithms", type=lambda s: tuple(s.split(",")))
    p.add_argument("--emit", type=lambda s: tuple(s.split(",")),
                   help=f"comma list from {','.join(EMIT_CHOICES)}")
    p.add_argument("--output-dir", dest="output_dir")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="lgssc",
        description="Locally guided sparse subspace clustering experiments",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one experiment and write artifacts")
    _add_run_flags(p_run)
    p_run.set_defaults(func=cmd_run)

    p_bench = sub.add_parser("bench", help="multi-seed paired ssc/lgssc sweep")
    _add_run_flags(p_bench)
    p_bench.add_argument("--seeds", type=int, default=20, help="number of seeds")
    p_bench.set_defaults(func=cmd_bench)

    p_gen = sub.add_parser("gen", help="write a synthetic dataset to disk")
    p_gen.add_argument("--synthetic", choices=benchmarks.SYNTHETIC_PRESETS, required=True)
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--out", required=True)
    p_gen.add_argument("--format", choices=("uosg", "csv"), default="uosg")
    p_gen.set_defaults(func=cmd_gen)

    p_inspect = sub.add_parser("inspect", help="print gallery and hierarchy summary")
    p_inspect.add_argument("--data", required=True)
    p_inspect.add_argument("--format", choices=("auto", "csv", "uosg", "pgm"), default="auto")
    p_inspect.add_argument("--levels", type=int, default=2)
    p_inspect.add_argument("--patches", type=int, choices=(4, 9), default=4)
    p_inspect.add_argument("--overlap-fraction", dest="overlap_fraction", type=float, default=0.0)
    p_inspect.set_defaults(func=cmd_inspect)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except (LgsscError, OSError) as e:
        log.error("%s", e)
        return 2


if __name__ == "__main__":
    sys.exit(main())
