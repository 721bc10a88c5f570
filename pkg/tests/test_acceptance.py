"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines.  Expected values come from independent oracles computed here (brute
enumeration, double loops, textbook entropy/distance formulas), never from the
code paths under test.
"""

import csv
import itertools
import time
import xml.etree.ElementTree as ET
from contextlib import contextmanager

import numpy as np
import pytest

from quboinit import cli
from quboinit.clustering import (
    Dataset,
    homogeneity_completeness_v,
    lloyd_kmeans,
    random_init,
    silhouette,
)
from quboinit.encoding import RadixScheme, decode_bits, encode_integer
from quboinit.formulation import (
    FactorizationInstance,
    build_objective,
    build_qubo,
    decode_solution,
    onehot_penalty,
)
from quboinit.polynomial import PseudoBooleanPolynomial, quadratize, rosenberg_gadget
from quboinit.solvers import AnnealParams, TabuParams, solve_exhaustive, solve_sa, solve_tabu


@contextmanager
def criterion(name):
    try:
        yield
    except Exception:
        print(f"[FAIL] {name}")
        raise
    print(f"[PASS] {name}")


def enumerate_qubo(qubo):
    """Independent brute force: energies of all 2^n assignments, vectorized."""
    labels = list(qubo.variables)
    n = len(labels)
    position = {v: i for i, v in enumerate(labels)}
    counters = np.arange(1 << n, dtype=np.int64)
    X = np.zeros((1 << n, n))
    for bit in range(n):
        X[:, bit] = (counters >> bit) & 1
    energies = np.full(1 << n, qubo.offset)
    for label, coeff in qubo.linear.items():
        energies += coeff * X[:, position[label]]
    for (a, b), coeff in qubo.quadratic.items():
        energies += coeff * X[:, position[a]] * X[:, position[b]]
    return labels, X, energies


def brute_poly_minimum(poly):
    """Independent minimum of a multilinear polynomial over its variables."""
    labels = poly.variables()
    best = None
    argmin = set()
    for bits in itertools.product((0, 1), repeat=len(labels)):
        assignment = dict(zip(labels, bits))
        value = poly.constant
        for key, coeff in poly.terms.items():
            product = coeff
            for label in key:
                product *= assignment[label]
            value += product
        if best is None or value < best:
            best = value
            argmin = {bits}
        elif value == best:
            argmin.add(bits)
    return labels, best, argmin


def test_criterion_gadget_truth_table():
    with criterion("gadget truth table: 0 iff z = x*y, >= weight otherwise"):
        for weight in (1.0, 2.5):
            gadget = rosenberg_gadget("x", "y", "z", weight)
            for x, y, z in itertools.product((0, 1), repeat=3):
                value = gadget.evaluate({"x": x, "y": y, "z": z})
                if z == x * y:
                    assert value == 0.0
                else:
                    assert value >= weight


def test_criterion_encoding_round_trip():
    with criterion("encoding round-trip for p in 0..6, out-of-range rejected"):
        for p in range(7):
            scheme = RadixScheme(p=p)
            for value in range(scheme.min_value, scheme.max_value + 1):
                assert decode_bits(encode_integer(value, scheme), scheme) == value
            with pytest.raises(ValueError):
                encode_integer(scheme.max_value + 1, scheme)
            with pytest.raises(ValueError):
                encode_integer(scheme.min_value - 1, scheme)


def test_criterion_onehot_penalty():
    with criterion("one-hot penalty equals delta2*(1-sum)^2 on all columns, k <= 4"):
        delta2 = 3.5
        for k in range(1, 5):
            instance = FactorizationInstance(V=[[0.0]], k=1, scheme=RadixScheme(p=0))
            wide = FactorizationInstance(V=[[0.0] * k], k=k, scheme=RadixScheme(p=0))
            layout = build_objective(wide)[1]
            penalty = onehot_penalty(wide, layout, delta2)
            labels = [layout.h_label(l, 0) for l in range(k)]
            others = {label: 0 for label in layout.h_vars.values() if label not in labels}
            base = delta2 * (wide.n - 1)  # remaining all-zero columns
            for bits in itertools.product((0, 1), repeat=k):
                assignment = dict(zip(labels, bits), **others)
                value = penalty.evaluate(assignment) - base
                assert value == pytest.approx(delta2 * (1 - sum(bits)) ** 2, abs=1e-12)
                assert (value == 0.0) == (sum(bits) == 1)
            del instance


def _random_polynomial(rng):
    n_vars = int(rng.integers(3, 11))
    labels = [f"x{i}" for i in range(n_vars)]
    poly = PseudoBooleanPolynomial()
    excess_budget = 8  # keeps originals + auxiliaries enumerable
    for _ in range(int(rng.integers(1, 7))):
        degree = int(rng.integers(1, 5))
        if degree > 2:
            if excess_budget < degree - 2:
                degree = 2
            else:
                excess_budget -= degree - 2
        degree = min(degree, n_vars)
        key = tuple(rng.choice(labels, size=degree, replace=False))
        coeff = int(rng.integers(-5, 6))
        poly.add_term(key, float(coeff if coeff else 1))
    return poly


def test_criterion_quadratization_soundness():
    with criterion("quadratization: 100 random polynomials, minima and argmins match"):
        for index in range(100):
            rng = np.random.default_rng(20_240 + index)
            poly = _random_polynomial(rng)
            qubo, reduction = quadratize(poly)
            assert len(qubo.variables) <= 24

            labels, X, energies = enumerate_qubo(qubo)
            qubo_min = energies.min()
            original = poly.variables()
            original_idx = [labels.index(v) for v in original]
            rows = np.flatnonzero(energies == qubo_min)
            qubo_argmin = {tuple(int(b) for b in X[row, original_idx]) for row in rows}

            poly_labels, poly_min, poly_argmin = brute_poly_minimum(poly)
            assert poly_labels == original
            assert qubo_min == poly_min
            assert qubo_argmin == poly_argmin


def _double_loop_minimum(V, k, scheme):
    """Oracle: scan every integer centroid matrix and one-hot assignment."""
    d, n = V.shape
    grid = range(scheme.min_value, scheme.max_value + 1)
    best = None
    for W_cells in itertools.product(grid, repeat=d * k):
        W = np.array(W_cells, dtype=float).reshape(d, k)
        for assignment in itertools.product(range(k), repeat=n):
            value = 0.0
            for j, cluster in enumerate(assignment):
                for i in range(d):
                    value += (V[i, j] - W[i, cluster]) ** 2
            if best is None or value < best:
                best = value
    return best


def test_criterion_formulation_oracle():
    with criterion("formulation: QUBO minimum equals integer/one-hot double loop oracle"):
        rng = np.random.default_rng(7)
        checked = 0
        while checked < 20:
            n = int(rng.integers(1, 4))
            k = int(rng.integers(1, min(n, 2) + 1))
            p = int(rng.integers(0, 4))
            scheme = RadixScheme(p=p)
            V = rng.integers(scheme.min_value, scheme.max_value + 1, size=(1, n)).astype(float)
            instance = FactorizationInstance(V=V, k=k, scheme=scheme)
            qubo, layout = build_qubo(instance)
            result = solve_exhaustive(qubo, reduction=layout.aux)
            oracle = _double_loop_minimum(V, k, scheme)
            assert result.best_energy == oracle
            checked += 1

        separated = FactorizationInstance(V=[[0.0, 1.0, 10.0]], k=2, scheme=RadixScheme(p=3))
        qubo, layout = build_qubo(separated)
        assert solve_exhaustive(qubo, reduction=layout.aux).best_energy == 1.0


def test_criterion_energy_honesty():
    with criterion("energy honesty: QUBO energy equals recomputed objective within 1e-9"):
        rng = np.random.default_rng(99)
        for V, k, p in (([[1.0, -2.0], [0.0, 3.0]], 2, 1), ([[0.0, 1.0, 10.0]], 2, 3)):
            scheme = RadixScheme(p=p)
            instance = FactorizationInstance(V=V, k=k, scheme=scheme)
            qubo, layout = build_qubo(instance)
            for _ in range(30):
                assignment = {}
                for expansion in layout.w_bits.values():
                    value = int(rng.integers(scheme.min_value, scheme.max_value + 1))
                    assignment.update(zip(expansion.labels(), encode_integer(value, scheme)))
                for j in range(instance.n):
                    chosen = int(rng.integers(0, k))
                    for l in range(k):
                        assignment[layout.h_label(l, j)] = 1 if l == chosen else 0
                assignment = layout.aux.extend(assignment)
                solution = decode_solution(assignment, layout, instance)
                assert solution.onehot_violations == 0
                assert abs(qubo.energy(assignment) - solution.objective) <= 1e-9


def test_criterion_solver_quality():
    with criterion("solver quality: sa and tabu reach the exact minimum in >= 19/20 seeds"):
        instance = FactorizationInstance(V=[[0.0, 1.0, 10.0]], k=2, scheme=RadixScheme(p=3))
        qubo, layout = build_qubo(instance)
        exact = solve_exhaustive(qubo, reduction=layout.aux).best_energy
        assert exact == 1.0
        # warm the jit kernels so the timing below measures the solvers
        solve_sa(qubo, AnnealParams(sweeps=10, restarts=2, seed=0))
        solve_tabu(qubo, TabuParams(max_iterations=10, restarts=2, seed=0))

        start = time.perf_counter()
        sa_hits = sum(solve_sa(qubo, AnnealParams(seed=seed)).best_energy == exact for seed in range(20))
        tabu_hits = sum(
            solve_tabu(qubo, TabuParams(seed=seed)).best_energy == exact for seed in range(20)
        )
        elapsed = time.perf_counter() - start
        print(f"  sa {sa_hits}/20, tabu {tabu_hits}/20, {elapsed:.1f}s")
        assert sa_hits >= 19
        assert tabu_hits >= 19
        assert elapsed < 10.0


def test_criterion_kmeans():
    with criterion("k-means: rectangle inertia 1.0 in <= 2 iterations, monotone, capped"):
        rectangle = Dataset(points=[(0.0, 0.0), (0.0, 1.0), (10.0, 0.0), (10.0, 1.0)])
        report = lloyd_kmeans(rectangle, [(0.0, 0.0), (10.0, 0.0)], max_iter=10000)
        assert report.inertia == 1.0
        assert report.iterations <= 2
        assert report.converged

        rng = np.random.default_rng(17)
        for _ in range(50):
            n = int(rng.integers(6, 40))
            k = int(rng.integers(2, 5))
            data = Dataset(points=rng.normal(size=(n, 2)) * rng.uniform(0.5, 4.0))
            history = []
            result = lloyd_kmeans(
                data,
                random_init(data, min(k, n), seed=int(rng.integers(0, 1000))),
                max_iter=10000,
                trace=lambda it, c, l, v: history.append(v),
            )
            assert all(b <= a + 1e-9 for a, b in zip(history, history[1:]))
            assert 1 <= result.iterations <= 10000


def test_criterion_metrics():
    with criterion("metrics: fixed references and bounds on random labelings"):
        assert homogeneity_completeness_v([0, 1, 0, 1], [0, 1, 0, 1]) == (1.0, 1.0, 1.0)
        assert homogeneity_completeness_v([0, 0, 1, 1], [2, 2, 2, 2]) == (0.0, 1.0, 0.0)

        rectangle = Dataset(points=[(0.0, 0.0), (0.0, 1.0), (10.0, 0.0), (10.0, 1.0)])
        assert silhouette(rectangle, [0, 0, 1, 1]) == pytest.approx(0.90025, abs=1e-4)

        rng = np.random.default_rng(23)
        for _ in range(100):
            n = int(rng.integers(4, 30))
            true_labels = rng.integers(0, 4, size=n)
            pred_labels = rng.integers(0, 4, size=n)
            h, c, v = homogeneity_completeness_v(true_labels, pred_labels)
            assert 0.0 <= h <= 1.0 and 0.0 <= c <= 1.0 and 0.0 <= v <= 1.0
            if len(np.unique(pred_labels)) >= 2:
                data = Dataset(points=rng.normal(size=(n, 2)))
                assert -1.0 <= silhouette(data, pred_labels) <= 1.0


def test_criterion_bench_end_to_end(tmp_path):
    with criterion("bench: full sweep twice, six plots, deterministic results.csv"):
        flags = ["--k", "3", "--seed", "0", "--sizes", "10,15,20,25,30,35,40",
                 "--solvers", "random,sa,tabu"]
        start = time.perf_counter()
        for name in ("one", "two"):
            assert cli.main(["bench", "--out", str(tmp_path / name)] + flags) == 0
        elapsed = time.perf_counter() - start
        print(f"  two full sweeps in {elapsed:.0f}s")
        assert elapsed < 600.0

        with open(tmp_path / "one" / "results.csv", newline="") as handle:
            rows = list(csv.DictReader(handle))
        assert len(rows) == 7 * 3
        for row in rows:
            assert row["error"] == ""
            for metric in ("inertia", "silhouette", "homogeneity", "completeness",
                           "v_measure", "iterations"):
                assert row[metric] != ""

        for metric in cli.METRIC_COLUMNS:
            tree = ET.parse(tmp_path / "one" / f"{metric}.svg")
            assert tree.getroot().tag.endswith("svg")
            assert (tmp_path / "one" / f"{metric}.svg").read_bytes() == (
                tmp_path / "two" / f"{metric}.svg"
            ).read_bytes()

        def stripped(path):
            with open(path, newline="") as handle:
                rows = list(csv.DictReader(handle))
            for row in rows:
                row.pop("solve_wall_ms")
            return rows

        assert stripped(tmp_path / "one" / "results.csv") == stripped(tmp_path / "two" / "results.csv")
