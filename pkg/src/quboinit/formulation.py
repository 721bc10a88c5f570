"""Clustering as binary matrix factorization: build the QUBO, decode solutions.

The data matrix V (d features x n points) is approximated by W @ H, where W is
a d x k integer matrix of candidate centroids (radix-2 encoded bits) and H is a
k x n binary indicator matrix selecting one centroid per point.  Minimizing
the squared Frobenius residual ||V - WH||^2 plus a one-hot penalty on H's
columns, after reduction to degree 2, yields a QUBO whose ground states decode
to optimized initial centroids.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .encoding import BitExpansion, RadixScheme, expansion_for_cell
from .polynomial import (
    MissingVariableError,
    PseudoBooleanPolynomial,
    Qubo,
    ReductionMap,
    quadratize,
)

AUTO = "auto"


@dataclass(frozen=True)
class PenaltyConfig:
    """Multipliers for the two constraint penalties.

    ``delta2`` weights the one-hot penalty on H columns; ``delta1`` weights the
    product-substitution gadgets added during quadratization.  Either may be
    ``"auto"``: delta2 then resolves to ``1 + ||V||_F^2`` (a one-hot violation
    can never pay for itself) and delta1 to the per-substitution dominating
    bound computed by :func:`quboinit.polynomial.quadratize`.
    """

    delta2: float | str = AUTO
    delta1: float | str = AUTO

    def __post_init__(self):
        for name, value in (("delta2", self.delta2), ("delta1", self.delta1)):
            if value == AUTO:
                continue
            if not isinstance(value, (int, float)) or value <= 0:
                raise ValueError(f"{name} must be 'auto' or a positive number, got {value!r}")


@dataclass
class FactorizationInstance:
    """One clustering problem: data matrix, cluster count, encoding, penalties.

    ``V`` has shape (d, n): rows are feature dimensions, columns are points.
    Every entry must lie in the scheme's representable range (real-valued data
    is scaled and rounded upstream).
    """

    V: np.ndarray
    k: int
    scheme: RadixScheme
    penalties: PenaltyConfig = field(default_factory=PenaltyConfig)

    def __post_init__(self):
        self.V = np.asarray(self.V, dtype=float)
        if self.V.ndim != 2:
            raise ValueError(f"V must be a 2-D matrix, got shape {self.V.shape}")
        d, n = self.V.shape
        if d < 1 or n < 1:
            raise ValueError(f"V must be non-empty, got shape {self.V.shape}")
        if not 1 <= self.k <= n:
            raise ValueError(f"need 1 <= k <= n, got k={self.k}, n={n}")
        lo, hi = self.scheme.min_value, self.scheme.max_value
        if (self.V < lo).any() or (self.V > hi).any():
            bad = self.V[(self.V < lo) | (self.V > hi)].flat[0]
            raise ValueError(f"V entry {bad} outside representable range [{lo}, {hi}]")

    @property
    def d(self) -> int:
        return self.V.shape[0]

    @property
    def n(self) -> int:
        return self.V.shape[1]


class VariableLayout:
    """Deterministic map from matrix cells to variable labels.

    W entry (i, l) occupies the radix bit group ``w_<i>_<l>_*``; the indicator
    for point j belonging to cluster l is the single variable ``h_<l>_<j>``.
    ``aux`` holds the quadratization auxiliaries once the QUBO is built.
    """

    def __init__(self, d: int, n: int, k: int, scheme: RadixScheme, aux: ReductionMap = ReductionMap()):
        self.d = d
        self.n = n
        self.k = k
        self.scheme = scheme
        self.aux = aux
        self.w_bits: dict[tuple[int, int], BitExpansion] = {
            (i, l): expansion_for_cell(i, l, scheme, "w") for i in range(d) for l in range(k)
        }
        self.h_vars: dict[tuple[int, int], str] = {
            (l, j): f"h_{l}_{j}" for l in range(k) for j in range(n)
        }

    def h_label(self, l: int, j: int) -> str:
        return self.h_vars[(l, j)]

    def all_variables(self) -> tuple[str, ...]:
        """Every W-bit and H label, auxiliaries excluded."""
        labels: list[str] = []
        for expansion in self.w_bits.values():
            labels.extend(expansion.labels())
        labels.extend(self.h_vars.values())
        return tuple(labels)

    @property
    def w_count(self) -> int:
        return self.d * self.k * self.scheme.n_bits

    @property
    def h_count(self) -> int:
        return self.k * self.n

    def variable_count(self) -> int:
        return self.w_count + self.h_count + len(self.aux.aux_defs)

    def to_metadata(self) -> dict:
        return {
            "d": self.d,
            "n": self.n,
            "k": self.k,
            "p": self.scheme.p,
            "sign_mode": self.scheme.sign_mode,
        }

    @classmethod
    def from_metadata(cls, meta: dict, aux: ReductionMap = ReductionMap()) -> "VariableLayout":
        scheme = RadixScheme(p=int(meta["p"]), sign_mode=meta["sign_mode"])
        return cls(int(meta["d"]), int(meta["n"]), int(meta["k"]), scheme, aux)


def build_objective(instance: FactorizationInstance) -> tuple[PseudoBooleanPolynomial, VariableLayout]:
    """Expand ||V - WH||_F^2 over the encoded W bits and indicator H variables.

    Each residual cell contributes the square of ``V_ij - sum_l w_il h_lj``
    with w_il replaced by its bit expansion; after idempotence the result has
    monomials of degree at most 4 and constant term ``sum(V**2)``.
    """
    layout = VariableLayout(instance.d, instance.n, instance.k, instance.scheme)
    objective = PseudoBooleanPolynomial()
    for j in range(instance.n):
        for i in range(instance.d):
            residual = PseudoBooleanPolynomial(constant=instance.V[i, j])
            for l in range(instance.k):
                h = layout.h_label(l, j)
                for label, weight in layout.w_bits[(i, l)].terms:
                    residual.add_term((label, h), -float(weight))
            objective += residual * residual
    return objective, layout


def onehot_penalty(
    instance: FactorizationInstance, layout: VariableLayout, delta2: float
) -> PseudoBooleanPolynomial:
    """Penalty ``delta2 * (1 - sum_l h_lj)^2`` summed over point columns j.

    Zero exactly when every column selects one cluster; per column it expands
    to constant delta2, linear -delta2 per indicator, and +2*delta2 per
    indicator pair.
    """
    if delta2 <= 0:
        raise ValueError(f"delta2 must be positive, got {delta2}")
    penalty = PseudoBooleanPolynomial()
    for j in range(instance.n):
        column = PseudoBooleanPolynomial(constant=1.0)
        for l in range(instance.k):
            column.add_term((layout.h_label(l, j),), -1.0)
        penalty += delta2 * (column * column)
    return penalty


def resolve_penalties(instance: FactorizationInstance) -> PenaltyConfig:
    """Replace an ``auto`` delta2 with the dominating bound ``1 + sum(V**2)``.

    An ``auto`` delta1 stays symbolic: it resolves per substitution inside
    quadratize, where the relevant coefficient sums are known.
    """
    config = instance.penalties
    if config.delta2 == AUTO:
        delta2: float | str = 1.0 + float((instance.V ** 2).sum())
    else:
        delta2 = float(config.delta2)
    return PenaltyConfig(delta2=delta2, delta1=config.delta1)


def build_qubo(instance: FactorizationInstance) -> tuple[Qubo, VariableLayout]:
    """Objective plus one-hot penalty, quadratized; deterministic per instance.

    Variable order: all layout labels sorted lexicographically, then reduction
    auxiliaries in creation order.  Total count is
    d*k*(p+2) + k*n + len(aux).
    """
    objective, layout = build_objective(instance)
    penalties = resolve_penalties(instance)
    objective += onehot_penalty(instance, layout, float(penalties.delta2))
    weight = None if penalties.delta1 == AUTO else float(penalties.delta1)
    qubo, reduction = quadratize(
        objective, penalty_weight=weight, variables=sorted(layout.all_variables())
    )
    layout.aux = reduction
    return qubo, layout


@dataclass(frozen=True, eq=False)
class FactorizationSolution:
    """Decoded solver sample: integer W, binary H, and bookkeeping.

    ``objective`` is recomputed from the decoded matrices, independently of the
    solver's reported ``energy``.  ``empty_clusters`` lists clusters whose H
    row selects no point.
    """

    W: np.ndarray
    H: np.ndarray
    energy: float | None
    objective: float
    onehot_violations: int
    empty_clusters: tuple[int, ...]


def decode_solution(
    assignment,
    layout: VariableLayout,
    instance: FactorizationInstance,
    energy: float | None = None,
) -> FactorizationSolution:
    """Read W and H out of a 0/1 assignment over the layout variables.

    Auxiliary variables in the assignment are ignored; missing layout
    variables raise :class:`MissingVariableError`.
    """
    W = np.zeros((instance.d, instance.k), dtype=int)
    for (i, l), expansion in layout.w_bits.items():
        value = 0
        for label, weight in expansion.terms:
            try:
                bit = assignment[label]
            except KeyError:
                raise MissingVariableError(label) from None
            value += weight * (1 if bit else 0)
        W[i, l] = value
    H = np.zeros((instance.k, instance.n), dtype=int)
    for (l, j), label in layout.h_vars.items():
        try:
            H[l, j] = 1 if assignment[label] else 0
        except KeyError:
            raise MissingVariableError(label) from None
    violations = int((H.sum(axis=0) != 1).sum())
    empty = tuple(int(l) for l in np.flatnonzero(H.sum(axis=1) == 0))
    return FactorizationSolution(
        W=W,
        H=H,
        energy=energy,
        objective=objective_value(instance.V, W, H),
        onehot_violations=violations,
        empty_clusters=empty,
    )


def extract_centroids(solution: FactorizationSolution) -> np.ndarray:
    """Centroids as a (k, d) array: row l is column l of W.

    Under exactly one-hot H these are the distinct columns of W @ H; columns of
    empty clusters (flagged on the solution) are returned unchanged.
    """
    return solution.W.T.astype(float).copy()


def objective_value(V, W, H) -> float:
    """Squared Frobenius residual ``sum((V - W @ H)**2)``."""
    V = np.asarray(V, dtype=float)
    W = np.asarray(W, dtype=float)
    H = np.asarray(H, dtype=float)
    if V.ndim != 2 or W.ndim != 2 or H.ndim != 2:
        raise ValueError("V, W, H must be 2-D matrices")
    if W.shape[1] != H.shape[0] or V.shape != (W.shape[0], H.shape[1]):
        raise ValueError(
            f"shape mismatch: V {V.shape} vs W {W.shape} @ H {H.shape}"
        )
    return float(((V - W @ H) ** 2).sum())
