"""Command-line harness: generate data, export/solve QUBOs, run k-means, benchmark.

Subcommands: ``gen-blobs``, ``qubo``, ``init``, ``kmeans``, ``bench``.
Exit codes: 0 success, 1 runtime failure, 2 usage error.

The benchmark sweep is driven by one process-level seed; per-component seeds
derive from it by fixed offsets (see ``DATA_SEED_OFFSET`` etc.) so a whole run
is reproducible from a single knob.  ``results.csv`` and the SVG plots are
byte-deterministic for identical configs, except for the wall-time column.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from pathlib import Path

import numpy as np

from .clustering import (
    Dataset,
    homogeneity_completeness_v,
    lloyd_kmeans,
    random_init,
    silhouette,
)
from .data import (
    BlobSpec,
    generate_blobs,
    load_centroids_csv,
    load_csv,
    pca_fit,
    pca_transform,
    resolve_transform,
    save_centroids_csv,
    save_csv,
)
from .encoding import RadixScheme
from .formulation import (
    FactorizationInstance,
    PenaltyConfig,
    build_qubo,
    decode_solution,
    extract_centroids,
)
from .polynomial import qubo_to_json
from .solvers import (
    AnnealParams,
    TabuParams,
    samples_to_json,
    solve_exhaustive,
    solve_sa,
    solve_tabu,
)

# Seed derivation offsets for the bench sweep: per-size dataset, k-means
# random initialization, and QUBO solver streams never overlap.
DATA_SEED_OFFSET = 0
INIT_SEED_OFFSET = 10_000
SOLVER_SEED_OFFSET = 20_000

QUBO_METHODS = ("sa", "tabu", "exact")
BENCH_METHODS = ("random",) + QUBO_METHODS
METRIC_COLUMNS = ("inertia", "silhouette", "homogeneity", "completeness", "v_measure", "iterations")
RESULT_COLUMNS = (
    "method",
    "n",
    "k",
    "seed",
    "inertia",
    "silhouette",
    "homogeneity",
    "completeness",
    "v_measure",
    "iterations",
    "qubo_variable_count",
    "solve_wall_ms",
    "energy",
    "objective",
    "error",
)


def _load_dataset(path: str, use_pca: bool) -> Dataset:
    dataset = load_csv(path)
    if use_pca and dataset.dims > 2:
        dataset = pca_transform(pca_fit(dataset, components=2), dataset)
    return dataset


def _penalties(delta2: float | None, delta1: float | None) -> PenaltyConfig:
    return PenaltyConfig(
        delta2="auto" if delta2 is None else delta2,
        delta1="auto" if delta1 is None else delta1,
    )


def _prepare_instance(dataset: Dataset, k: int, scheme: RadixScheme, penalties: PenaltyConfig):
    """Scale+round the points into range and stand up the factorization instance."""
    transform = resolve_transform(dataset, scheme)
    scaled = np.rint(transform.apply(dataset.points))
    instance = FactorizationInstance(V=scaled.T, k=k, scheme=scheme, penalties=penalties)
    return instance, transform


def _solve(qubo, layout, solver: str, args):
    if solver == "sa":
        params = AnnealParams(
            sweeps=args.sweeps,
            beta_initial=args.beta_initial,
            beta_final=args.beta_final,
            restarts=args.restarts,
            seed=args.seed,
        )
        return solve_sa(qubo, params)
    if solver == "tabu":
        params = TabuParams(
            tenure=args.tenure,
            max_iterations=args.max_iterations,
            restarts=args.restarts,
            seed=args.seed,
        )
        return solve_tabu(qubo, params)
    return solve_exhaustive(qubo, reduction=layout.aux)


def cmd_gen_blobs(args) -> int:
    spec = BlobSpec(
        n_samples=args.n,
        k_centers=args.k,
        std=args.std,
        center_box=(args.box_lo, args.box_hi),
        seed=args.seed,
        dims=args.dims,
    )
    save_csv(generate_blobs(spec), args.out)
    print(f"wrote {args.n} points to {args.out}")
    return 0


def cmd_qubo(args) -> int:
    dataset = _load_dataset(args.data, args.pca)
    scheme = RadixScheme(p=args.p, sign_mode=args.sign_mode)
    instance, transform = _prepare_instance(dataset, args.k, scheme, _penalties(args.delta2, args.delta1))
    qubo, layout = build_qubo(instance)
    metadata = {"layout": layout.to_metadata(), "scaling": transform.to_dict()}
    Path(args.out).write_text(qubo_to_json(qubo, layout.aux, metadata))
    print(f"wrote QUBO with {len(qubo.variables)} variables to {args.out}")
    return 0


def cmd_init(args) -> int:
    dataset = _load_dataset(args.data, args.pca)
    scheme = RadixScheme(p=args.p, sign_mode=args.sign_mode)
    instance, transform = _prepare_instance(dataset, args.k, scheme, _penalties(args.delta2, args.delta1))
    qubo, layout = build_qubo(instance)
    sampleset = _solve(qubo, layout, args.solver, args)
    if args.samples_out:
        Path(args.samples_out).write_text(samples_to_json(sampleset))
    best = sampleset.best
    solution = decode_solution(best.assignment, layout, instance, energy=best.energy)
    centroids = transform.invert(extract_centroids(solution))
    save_centroids_csv(centroids, args.out)
    print(
        json.dumps(
            {
                "solver": args.solver,
                "energy": solution.energy,
                "objective": solution.objective,
                "onehot_violations": solution.onehot_violations,
                "empty_clusters": list(solution.empty_clusters),
                "qubo_variables": len(qubo.variables),
                "centroids_file": str(args.out),
            },
            sort_keys=True,
        )
    )
    return 0


def cmd_kmeans(args) -> int:
    dataset = load_csv(args.data)
    if args.centroids:
        centroids = load_centroids_csv(args.centroids)
    else:
        if args.k is None:
            raise ValueError("either --centroids or --k is required")
        centroids = random_init(dataset, args.k, args.seed)
    report = lloyd_kmeans(dataset, centroids, max_iter=args.max_iter)
    result = {
        "inertia": report.inertia,
        "iterations": report.iterations,
        "converged": report.converged,
        "k": int(report.centroids.shape[0]),
        "n": dataset.n,
    }
    if len(np.unique(report.labels)) >= 2:
        result["silhouette"] = silhouette(dataset, report.labels)
    if dataset.true_labels is not None:
        h, c, v = homogeneity_completeness_v(dataset.true_labels, report.labels)
        result.update({"homogeneity": h, "completeness": c, "v_measure": v})
    if args.out_centroids:
        save_centroids_csv(report.centroids, args.out_centroids)
    print(json.dumps(result, sort_keys=True))
    return 0


def _bench_dataset(args, size: int, size_index: int) -> Dataset:
    if args.data:
        dataset = _load_dataset(args.data, args.pca)
        if dataset.n < size:
            raise ValueError(f"{args.data} has {dataset.n} rows, fewer than sample size {size}")
        labels = dataset.true_labels[:size] if dataset.true_labels is not None else None
        return Dataset(points=dataset.points[:size].copy(), true_labels=labels)
    spec = BlobSpec(
        n_samples=size,
        k_centers=args.k,
        std=args.std,
        center_box=(args.box_lo, args.box_hi),
        seed=args.seed + DATA_SEED_OFFSET + size_index,
        dims=args.dims,
    )
    return generate_blobs(spec)


def _bench_cell(dataset: Dataset, method: str, args, size_index: int) -> tuple[dict, np.ndarray]:
    """One (sample size, method) run: initial centroids -> k-means -> metrics."""
    row: dict = {"method": method, "n": dataset.n, "k": args.k, "seed": args.seed}
    if method == "random":
        t0 = time.perf_counter()
        centroids = random_init(dataset, args.k, args.seed + INIT_SEED_OFFSET + size_index)
        row["solve_wall_ms"] = (time.perf_counter() - t0) * 1000.0
    else:
        scheme = RadixScheme(p=args.p)
        penalties = _penalties(args.delta2, args.delta1)
        instance, transform = _prepare_instance(dataset, args.k, scheme, penalties)
        qubo, layout = build_qubo(instance)
        row["qubo_variable_count"] = len(qubo.variables)
        solver_seed = args.seed + SOLVER_SEED_OFFSET + size_index
        if method == "sa":
            sampleset = solve_sa(qubo, AnnealParams(seed=solver_seed))
        elif method == "tabu":
            sampleset = solve_tabu(qubo, TabuParams(seed=solver_seed))
        else:
            sampleset = solve_exhaustive(qubo, reduction=layout.aux)
        row["solve_wall_ms"] = sampleset.wall_time_ms
        best = sampleset.best
        solution = decode_solution(best.assignment, layout, instance, energy=best.energy)
        row["energy"] = solution.energy
        row["objective"] = solution.objective
        centroids = transform.invert(extract_centroids(solution))

    report = lloyd_kmeans(dataset, centroids, max_iter=args.max_iter)
    row["inertia"] = report.inertia
    row["iterations"] = report.iterations
    if len(np.unique(report.labels)) >= 2:
        row["silhouette"] = silhouette(dataset, report.labels)
    if dataset.true_labels is not None:
        h, c, v = homogeneity_completeness_v(dataset.true_labels, report.labels)
        row["homogeneity"] = h
        row["completeness"] = c
        row["v_measure"] = v
    return row, centroids


def _format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def cmd_bench(args) -> int:
    sizes = args.sizes
    methods = args.solvers
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)

    rows = []
    for size_index, size in enumerate(sizes):
        try:
            dataset = _bench_dataset(args, size, size_index)
        except Exception as exc:  # dataset failure poisons the whole size
            for method in methods:
                rows.append({"method": method, "n": size, "k": args.k, "seed": args.seed, "error": str(exc)})
            continue
        save_csv(dataset, outdir / f"data_n{size}.csv")
        for method in methods:
            try:
                row, centroids = _bench_cell(dataset, method, args, size_index)
                save_centroids_csv(centroids, outdir / f"centroids_{method}_n{size}.csv")
            except Exception as exc:
                row = {"method": method, "n": size, "k": args.k, "seed": args.seed, "error": str(exc)}
            rows.append(row)

    results_path = outdir / "results.csv"
    with open(results_path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(RESULT_COLUMNS)
        for row in rows:
            writer.writerow([_format_cell(row.get(column)) for column in RESULT_COLUMNS])

    for metric in METRIC_COLUMNS:
        series = []
        for method in methods:
            points = [
                (row["n"], float(row[metric]))
                for row in rows
                if row["method"] == method and row.get(metric) is not None
            ]
            series.append((method, points))
        write_metric_svg(outdir / f"{metric}.svg", metric, series)

    print(f"wrote {len(rows)} result rows and {len(METRIC_COLUMNS)} plots to {outdir}")
    return 0


# --- SVG output -----------------------------------------------------------

_SVG_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")
_SVG_W, _SVG_H = 640, 420
_SVG_ML, _SVG_MR, _SVG_MT, _SVG_MB = 70, 150, 30, 50


def _svg_escape(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def write_metric_svg(path, metric: str, series: list[tuple[str, list[tuple[int, float]]]]) -> None:
    """One polyline per method (x = sample size, y = metric) plus a legend.

    Output is self-contained SVG with fixed-precision coordinates, so reruns
    of the same data are byte-identical.
    """
    xs = sorted({x for _, points in series for x, _ in points})
    ys = [y for _, points in series for _, y in points]
    x_lo, x_hi = (min(xs), max(xs)) if xs else (0.0, 1.0)
    y_lo, y_hi = (min(ys), max(ys)) if ys else (0.0, 1.0)
    if x_hi == x_lo:
        x_lo, x_hi = x_lo - 1.0, x_hi + 1.0
    if y_hi == y_lo:
        y_lo, y_hi = y_lo - 1.0, y_hi + 1.0
    pad = 0.05 * (y_hi - y_lo)
    y_lo, y_hi = y_lo - pad, y_hi + pad
    plot_w = _SVG_W - _SVG_ML - _SVG_MR
    plot_h = _SVG_H - _SVG_MT - _SVG_MB

    def px(x: float) -> float:
        return _SVG_ML + (x - x_lo) / (x_hi - x_lo) * plot_w

    def py(y: float) -> float:
        return _SVG_MT + plot_h - (y - y_lo) / (y_hi - y_lo) * plot_h

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_SVG_W}" height="{_SVG_H}" '
        f'viewBox="0 0 {_SVG_W} {_SVG_H}" font-family="sans-serif" font-size="12">',
        f'<rect width="{_SVG_W}" height="{_SVG_H}" fill="white"/>',
        f'<text x="{_SVG_ML}" y="20" font-size="14">{_svg_escape(metric)} vs sample size</text>',
        f'<line x1="{_SVG_ML}" y1="{_SVG_MT + plot_h}" x2="{_SVG_ML + plot_w}" '
        f'y2="{_SVG_MT + plot_h}" stroke="black"/>',
        f'<line x1="{_SVG_ML}" y1="{_SVG_MT}" x2="{_SVG_ML}" y2="{_SVG_MT + plot_h}" stroke="black"/>',
    ]
    for x in xs:
        parts.append(
            f'<text x="{px(x):.2f}" y="{_SVG_MT + plot_h + 18}" text-anchor="middle">{x}</text>'
        )
        parts.append(
            f'<line x1="{px(x):.2f}" y1="{_SVG_MT + plot_h}" x2="{px(x):.2f}" '
            f'y2="{_SVG_MT + plot_h + 4}" stroke="black"/>'
        )
    for tick in np.linspace(y_lo, y_hi, 5):
        parts.append(
            f'<text x="{_SVG_ML - 6}" y="{py(tick):.2f}" text-anchor="end" '
            f'dominant-baseline="middle">{tick:.4g}</text>'
        )
        parts.append(
            f'<line x1="{_SVG_ML - 4}" y1="{py(tick):.2f}" x2="{_SVG_ML}" '
            f'y2="{py(tick):.2f}" stroke="black"/>'
        )
    for index, (method, points) in enumerate(series):
        color = _SVG_COLORS[index % len(_SVG_COLORS)]
        if points:
            coords = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in sorted(points))
            parts.append(f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="2"/>')
            for x, y in points:
                parts.append(f'<circle cx="{px(x):.2f}" cy="{py(y):.2f}" r="3" fill="{color}"/>')
        legend_y = _SVG_MT + 10 + 20 * index
        parts.append(
            f'<line x1="{_SVG_ML + plot_w + 10}" y1="{legend_y}" x2="{_SVG_ML + plot_w + 40}" '
            f'y2="{legend_y}" stroke="{color}" stroke-width="2"/>'
        )
        parts.append(
            f'<text x="{_SVG_ML + plot_w + 46}" y="{legend_y + 4}">{_svg_escape(method)}</text>'
        )
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n")


# --- argument parsing ------------------------------------------------------


def _csv_ints(text: str) -> list[int]:
    try:
        values = [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("expected a non-empty list")
    return values


def _csv_methods(text: str) -> list[str]:
    methods = [tok.strip() for tok in text.split(",") if tok.strip()]
    if not methods:
        raise argparse.ArgumentTypeError("expected a non-empty solver list")
    unknown = [m for m in methods if m not in BENCH_METHODS]
    if unknown:
        raise argparse.ArgumentTypeError(f"unknown solvers {unknown}; choose from {list(BENCH_METHODS)}")
    return methods


def _load_config_file(path: str) -> dict[str, str]:
    """key = value lines; '#' starts a comment; values may be double-quoted."""
    out: dict[str, str] = {}
    text = Path(path).read_text()
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}: line {line_no}: expected key = value, got {raw!r}")
        key, _, value = line.partition("=")
        out[key.strip()] = value.strip().strip('"')
    return out


_BENCH_DEFAULTS = {
    "k": 3,
    "seed": 0,
    "p": 2,
    "std": 1.0,
    "dims": 2,
    "box_lo": -10.0,
    "box_hi": 10.0,
    "max_iter": 10000,
    "sizes": [10, 15, 20, 25, 30, 35, 40],
    "solvers": ["random", "sa", "tabu"],
    "pca": False,
    "data": None,
    "delta2": None,
    "delta1": None,
}

_BENCH_PARSERS = {
    "k": int,
    "seed": int,
    "p": int,
    "std": float,
    "dims": int,
    "box_lo": float,
    "box_hi": float,
    "max_iter": int,
    "sizes": _csv_ints,
    "solvers": _csv_methods,
    "pca": lambda v: v.lower() in ("1", "true", "yes"),
    "data": str,
    "delta2": float,
    "delta1": float,
    "out": str,
}


def _resolve_bench_args(args) -> None:
    """Fill unset bench flags from the config file, then from the defaults."""
    config = _load_config_file(args.config) if args.config else {}
    unknown = set(config) - set(_BENCH_PARSERS)
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    for key, parser in _BENCH_PARSERS.items():
        if getattr(args, key, None) is None or (key == "pca" and not args.pca):
            if key in config:
                setattr(args, key, parser(config[key]))
    for key, default in _BENCH_DEFAULTS.items():
        if getattr(args, key) is None:
            setattr(args, key, default)
    if args.out is None:
        raise ValueError("--out is required (flag or config key)")
    if args.k < 2:
        raise ValueError("bench needs k >= 2 so silhouette is defined")
    if sorted(args.sizes) != args.sizes:
        raise ValueError(f"sample sizes must be ascending, got {args.sizes}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quboinit",
        description="Optimized initial centroids for k-means via QUBO solvers, plus a benchmark harness.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen-blobs", help="generate a Gaussian-blob dataset CSV")
    gen.add_argument("--n", type=int, required=True, help="number of samples")
    gen.add_argument("--k", type=int, required=True, help="number of blob centers")
    gen.add_argument("--std", type=float, default=1.0)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--dims", type=int, default=2)
    gen.add_argument("--box-lo", type=float, default=-10.0)
    gen.add_argument("--box-hi", type=float, default=10.0)
    gen.add_argument("--out", required=True, help="output CSV path")
    gen.set_defaults(func=cmd_gen_blobs)

    def add_formulation_flags(p):
        p.add_argument("--data", required=True, help="input data CSV")
        p.add_argument("--pca", action="store_true", help="reduce to 2 components first")
        p.add_argument("--k", type=int, required=True)
        p.add_argument("--p", type=int, default=2, help="max magnitude power of the bit encoding")
        p.add_argument("--sign-mode", default="twos_complement", choices=["twos_complement", "ones_complement"])
        p.add_argument("--delta2", type=float, default=None, help="one-hot penalty (default: auto)")
        p.add_argument("--delta1", type=float, default=None, help="reduction penalty (default: auto)")

    qubo = sub.add_parser("qubo", help="export the clustering QUBO as JSON")
    add_formulation_flags(qubo)
    qubo.add_argument("--out", required=True, help="output JSON path")
    qubo.set_defaults(func=cmd_qubo)

    init = sub.add_parser("init", help="solve the QUBO and write optimized centroids")
    add_formulation_flags(init)
    init.add_argument("--solver", required=True, choices=list(QUBO_METHODS))
    init.add_argument("--seed", type=int, default=0)
    init.add_argument("--sweeps", type=int, default=1000)
    init.add_argument("--beta-initial", type=float, default=0.1)
    init.add_argument("--beta-final", type=float, default=10.0)
    init.add_argument("--restarts", type=int, default=10)
    init.add_argument("--tenure", type=int, default=10)
    init.add_argument("--max-iterations", type=int, default=1000)
    init.add_argument("--out", required=True, help="output centroid CSV path")
    init.add_argument("--samples-out", default=None, help="also write the solver sample set JSON")
    init.set_defaults(func=cmd_init)

    km = sub.add_parser("kmeans", help="run k-means from given or random centroids")
    km.add_argument("--data", required=True)
    km.add_argument("--centroids", default=None, help="starting centroid CSV")
    km.add_argument("--k", type=int, default=None, help="cluster count for random init")
    km.add_argument("--seed", type=int, default=0)
    km.add_argument("--max-iter", type=int, default=10000)
    km.add_argument("--out-centroids", default=None)
    km.set_defaults(func=cmd_kmeans)

    bench = sub.add_parser("bench", help="sweep sample sizes and methods; write results.csv and plots")
    bench.add_argument("--config", default=None, help="key = value file; explicit flags win")
    bench.add_argument("--out", default=None, help="output directory")
    bench.add_argument("--data", default=None, help="data CSV (default: generated blobs)")
    bench.add_argument("--pca", action="store_true")
    bench.add_argument("--k", type=int, default=None)
    bench.add_argument("--seed", type=int, default=None)
    bench.add_argument("--p", type=int, default=None)
    bench.add_argument("--std", type=float, default=None)
    bench.add_argument("--dims", type=int, default=None)
    bench.add_argument("--box-lo", type=float, default=None)
    bench.add_argument("--box-hi", type=float, default=None)
    bench.add_argument("--max-iter", type=int, default=None)
    bench.add_argument("--delta2", type=float, default=None)
    bench.add_argument("--delta1", type=float, default=None)
    bench.add_argument("--sizes", type=_csv_ints, default=None, help="comma-separated sample sizes")
    bench.add_argument("--solvers", type=_csv_methods, default=None, help=f"subset of {','.join(BENCH_METHODS)}")
    bench.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "bench":
            _resolve_bench_args(args)
        return args.func(args)
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
