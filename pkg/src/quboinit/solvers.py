"""Classical QUBO minimizers: exhaustive oracle, simulated annealing, tabu search.

All solvers consume a :class:`~quboinit.polynomial.Qubo` and return a
:class:`SampleSet` whose energies are recomputed through ``Qubo.energy`` so
reported values match term-by-term evaluation bit for bit.  Restarts draw
independent streams seeded by ``seed + restart_index``, so results are
reproducible and independent of any execution order.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import asdict, dataclass

import numpy as np
from numba import config as _numba_config
from numba import njit, prange

from .polynomial import Qubo, ReductionMap

# skip the TBB probe (version-sensitive, warns on mismatch); omp then the
# pure-python workqueue cover every platform we run on
_numba_config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]

EXHAUSTIVE_CAP = 24
_CHUNK_BITS = 18
_SEED_MASK = 0xFFFFFFFF  # numba's legacy generator takes 32-bit seeds


@dataclass(frozen=True)
class AnnealParams:
    sweeps: int = 5000
    beta_initial: float = 0.002
    beta_final: float = 0.1
    restarts: int = 40
    seed: int = 0

    def __post_init__(self):
        if self.sweeps < 1 or self.restarts < 1:
            raise ValueError("sweeps and restarts must be >= 1")
        if not 0 < self.beta_initial < self.beta_final:
            raise ValueError(
                f"need 0 < beta_initial < beta_final, got {self.beta_initial}, {self.beta_final}"
            )


@dataclass(frozen=True)
class TabuParams:
    tenure: int = 20
    max_iterations: int = 3000
    restarts: int = 60
    seed: int = 0

    def __post_init__(self):
        if self.tenure < 1 or self.max_iterations < 1 or self.restarts < 1:
            raise ValueError("tenure, max_iterations and restarts must be >= 1")


@dataclass(frozen=True)
class Sample:
    assignment: dict[str, int]
    energy: float
    restart: int


@dataclass
class SampleSet:
    """Solver output: samples sorted by (energy, restart index found)."""

    samples: list[Sample]
    solver: str
    params: dict
    wall_time_ms: float
    traces: list[np.ndarray] | None = None

    @property
    def best(self) -> Sample:
        return self.samples[0]

    @property
    def best_energy(self) -> float:
        return self.samples[0].energy


def samples_to_json(sampleset: SampleSet) -> str:
    """Interchange format: array of {assignment, energy, restart}."""
    doc = [
        {"assignment": s.assignment, "energy": s.energy, "restart": s.restart}
        for s in sampleset.samples
    ]
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def samples_from_json(text: str) -> list[Sample]:
    return [
        Sample(
            assignment={label: int(bit) for label, bit in entry["assignment"].items()},
            energy=float(entry["energy"]),
            restart=int(entry["restart"]),
        )
        for entry in json.loads(text)
    ]


def _child_seeds(seed: int, restarts: int) -> np.ndarray:
    """Stream seeds ``seed + restart_index``, folded into the generator's range."""
    return np.array([(seed + r) % (_SEED_MASK + 1) for r in range(restarts)], dtype=np.int64)


def dense_arrays(qubo: Qubo) -> tuple[np.ndarray, np.ndarray]:
    """Linear vector and symmetric coupling matrix in ``qubo.variables`` order."""
    n = len(qubo.variables)
    position = {label: i for i, label in enumerate(qubo.variables)}
    linear = np.zeros(n)
    for label, coeff in qubo.linear.items():
        linear[position[label]] = coeff
    couplings = np.zeros((n, n))
    for (a, b), coeff in qubo.quadratic.items():
        couplings[position[a], position[b]] = coeff
        couplings[position[b], position[a]] = coeff
    return linear, couplings


def _finish(qubo: Qubo, results, solver: str, params, t0: float, traces) -> SampleSet:
    samples = []
    for restart, bits in results:
        assignment = {label: int(bits[i]) for i, label in enumerate(qubo.variables)}
        samples.append(Sample(assignment, qubo.energy(assignment), restart))
    samples.sort(key=lambda s: (s.energy, s.restart))
    return SampleSet(
        samples=samples,
        solver=solver,
        params=asdict(params),
        wall_time_ms=(time.perf_counter() - t0) * 1000.0,
        traces=traces,
    )


def _offset_only(qubo: Qubo, solver: str, params, t0: float) -> SampleSet:
    sample = Sample({}, qubo.offset, 0)
    return SampleSet([sample], solver, asdict(params), (time.perf_counter() - t0) * 1000.0)


def solve_exhaustive(
    qubo: Qubo,
    *,
    reduction: ReductionMap | None = None,
    max_variables: int = EXHAUSTIVE_CAP,
) -> SampleSet:
    """Enumerate assignments and return every global minimizer, exactly.

    With ``reduction`` given, quadratization auxiliaries are pinned to the
    products they encode (optimal in any minimizer because each gadget weight
    dominates the coefficients it guards) and only the remaining variables are
    enumerated; the variable cap applies to the enumerated count.  Energies
    are exact for integer-valued coefficients.
    """
    t0 = time.perf_counter()
    params = {"max_variables": max_variables, "reduction": reduction is not None}
    aux_labels = set(reduction.aux_labels()) if reduction is not None else set()
    free = [v for v in qubo.variables if v not in aux_labels]
    if len(free) > max_variables:
        raise ValueError(
            f"exhaustive solve over {len(free)} variables exceeds the cap of {max_variables}"
        )
    n_free = len(free)
    if len(qubo.variables) == 0:
        sample = Sample({}, qubo.offset, 0)
        return SampleSet([sample], "exact", params, (time.perf_counter() - t0) * 1000.0)

    order = free + [d.aux for d in (reduction.aux_defs if reduction is not None else ())]
    position = {label: i for i, label in enumerate(order)}
    linear = np.zeros(len(order))
    for label, coeff in qubo.linear.items():
        linear[position[label]] = coeff
    pairs = [(position[a], position[b], coeff) for (a, b), coeff in sorted(qubo.quadratic.items())]

    best_energy = math.inf
    best_rows: list[int] = []
    total = 1 << n_free
    chunk = 1 << min(_CHUNK_BITS, n_free)
    for start in range(0, total, chunk):
        stop = min(start + chunk, total)
        counters = np.arange(start, stop, dtype=np.int64)
        X = np.zeros((stop - start, len(order)))
        for bit in range(n_free):
            X[:, bit] = (counters >> bit) & 1
        if reduction is not None:
            for d in reduction.aux_defs:
                X[:, position[d.aux]] = X[:, position[d.pair[0]]] * X[:, position[d.pair[1]]]
        energies = qubo.offset + X @ linear
        for ia, ib, coeff in pairs:
            energies += coeff * X[:, ia] * X[:, ib]
        chunk_min = float(energies.min())
        if chunk_min < best_energy:
            best_energy = chunk_min
            best_rows = []
        if chunk_min == best_energy:
            best_rows.extend(int(start + i) for i in np.flatnonzero(energies == best_energy))

    samples = []
    for row in best_rows:
        assignment = {free[bit]: (row >> bit) & 1 for bit in range(n_free)}
        if reduction is not None:
            assignment = reduction.extend(assignment)
        samples.append(Sample(assignment, qubo.energy(assignment), 0))
    return SampleSet(samples, "exact", params, (time.perf_counter() - t0) * 1000.0)


@njit(cache=True, parallel=True)
def _sa_kernel(couplings, linear, sweeps, beta_initial, beta_final, child_seeds):  # pragma: no cover
    restarts = child_seeds.shape[0]
    n = linear.shape[0]
    best_bits = np.zeros((restarts, n), dtype=np.int8)
    traces = np.zeros((restarts, sweeps))
    if sweeps > 1:
        ratio = (beta_final / beta_initial) ** (1.0 / (sweeps - 1))
    else:
        ratio = 1.0
    for r in prange(restarts):
        np.random.seed(child_seeds[r])
        x = np.empty(n, dtype=np.int8)
        for i in range(n):
            x[i] = 1 if np.random.random() < 0.5 else 0
        # field[i] = linear[i] + sum_j couplings[i, j] * x[j]; flip delta = (1-2x_i)*field[i]
        field = linear.copy()
        energy = 0.0
        for i in range(n):
            if x[i] == 1:
                energy += linear[i]
                for j in range(i + 1, n):
                    if x[j] == 1:
                        energy += couplings[i, j]
                for j in range(n):
                    field[j] += couplings[j, i]
        best_energy = energy
        best_x = x.copy()
        beta = beta_initial
        for sweep in range(sweeps):
            for _ in range(n):
                i = np.random.randint(0, n)
                d = 1 - 2 * x[i]
                delta = d * field[i]
                cost = beta * delta
                if delta <= 0.0 or (cost <= 36.0 and np.random.random() < np.exp(-cost)):
                    x[i] += d
                    energy += delta
                    for j in range(n):
                        field[j] += d * couplings[j, i]
                    if energy < best_energy:
                        best_energy = energy
                        best_x = x.copy()
            traces[r, sweep] = best_energy
            beta *= ratio
        # final quench: deterministic first-improvement descent to a local minimum
        improved = True
        while improved:
            improved = False
            for i in range(n):
                d = 1 - 2 * x[i]
                delta = d * field[i]
                if delta < 0.0:
                    x[i] += d
                    energy += delta
                    for j in range(n):
                        field[j] += d * couplings[j, i]
                    improved = True
            if energy < best_energy:
                best_energy = energy
                best_x = x.copy()
        best_bits[r] = best_x
    return best_bits, traces


def solve_sa(qubo: Qubo, params: AnnealParams = AnnealParams(), record_trace: bool = False) -> SampleSet:
    """Single-bit-flip Metropolis annealing, geometric inverse-temperature ramp.

    Each restart runs ``sweeps`` full passes of n uniform-random flip
    proposals, warming beta geometrically from ``beta_initial`` to
    ``beta_final``, and records its best-seen assignment.
    """
    t0 = time.perf_counter()
    if len(qubo.variables) == 0:
        return _offset_only(qubo, "sa", params, t0)
    linear, couplings = dense_arrays(qubo)
    child_seeds = _child_seeds(params.seed, params.restarts)
    best_bits, raw_traces = _sa_kernel(
        couplings, linear, params.sweeps, params.beta_initial, params.beta_final, child_seeds
    )
    results = [(restart, best_bits[restart]) for restart in range(params.restarts)]
    traces = [raw_traces[r] + qubo.offset for r in range(params.restarts)] if record_trace else None
    return _finish(qubo, results, "sa", params, t0, traces)


@njit(cache=True, parallel=True)
def _tabu_kernel(couplings, linear, tenure, max_iterations, child_seeds):  # pragma: no cover
    restarts = child_seeds.shape[0]
    n = linear.shape[0]
    best_bits = np.zeros((restarts, n), dtype=np.int8)
    traces = np.zeros((restarts, max_iterations))
    steps_taken = np.zeros(restarts, dtype=np.int64)
    for r in prange(restarts):
        np.random.seed(child_seeds[r])
        x = np.empty(n, dtype=np.int8)
        for i in range(n):
            x[i] = 1 if np.random.random() < 0.5 else 0
        field = linear.copy()
        energy = 0.0
        for i in range(n):
            if x[i] == 1:
                energy += linear[i]
                for j in range(i + 1, n):
                    if x[j] == 1:
                        energy += couplings[i, j]
                for j in range(n):
                    field[j] += couplings[j, i]
        best_energy = energy
        best_x = x.copy()
        tabu_until = np.full(n, -1, dtype=np.int64)
        steps = 0
        for iteration in range(max_iterations):
            best_move = -1
            best_delta = np.inf
            ties = 0
            for i in range(n):
                delta = (1 - 2 * x[i]) * field[i]
                admissible = tabu_until[i] < iteration or energy + delta < best_energy
                if not admissible:
                    continue
                if delta < best_delta:
                    best_delta = delta
                    best_move = i
                    ties = 1
                elif delta == best_delta:
                    # uniform choice among equally good moves (reservoir sampling)
                    ties += 1
                    if np.random.randint(0, ties) == 0:
                        best_move = i
            if best_move < 0:
                break  # every move tabu and none beats the best seen
            i = best_move
            d = 1 - 2 * x[i]
            x[i] += d
            energy += best_delta
            for j in range(n):
                field[j] += d * couplings[j, i]
            tabu_until[i] = iteration + tenure
            if energy < best_energy:
                best_energy = energy
                best_x = x.copy()
            traces[r, iteration] = best_energy
            steps = iteration + 1
        best_bits[r] = best_x
        steps_taken[r] = steps
    return best_bits, traces, steps_taken


def solve_tabu(qubo: Qubo, params: TabuParams = TabuParams(), record_trace: bool = False) -> SampleSet:
    """Steepest-descent 1-flip tabu search with recency tenure and aspiration.

    Per restart: always take the best admissible flip, choosing uniformly at
    random among equally good moves; a flip is admissible when its variable
    left the tabu list or the move beats the best energy seen.  Stops at
    ``max_iterations`` or when no move is admissible.  The tenure is clamped
    below the variable count.
    """
    t0 = time.perf_counter()
    if len(qubo.variables) == 0:
        return _offset_only(qubo, "tabu", params, t0)
    linear, couplings = dense_arrays(qubo)
    n = len(qubo.variables)
    tenure = min(params.tenure, n - 1) if n > 1 else 1
    child_seeds = _child_seeds(params.seed, params.restarts)
    best_bits, raw_traces, steps = _tabu_kernel(
        couplings, linear, tenure, params.max_iterations, child_seeds
    )
    results = [(restart, best_bits[restart]) for restart in range(params.restarts)]
    traces = (
        [raw_traces[r, : steps[r]] + qubo.offset for r in range(params.restarts)]
        if record_trace
        else None
    )
    return _finish(qubo, results, "tabu", params, t0, traces)
