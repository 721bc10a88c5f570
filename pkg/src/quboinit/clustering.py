"""Naive (Lloyd's) k-means and the cluster-quality metrics used for benchmarks.

Assignment uses squared Euclidean distance with ties broken toward the lowest
cluster index; the update step keeps the previous centroid for a cluster that
lost all its points; convergence means the assignments stopped changing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(eq=False)
class Dataset:
    """Points as an (n, d) array, optionally with generating class labels."""

    points: np.ndarray
    true_labels: np.ndarray | None = None

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float)
        if self.points.ndim != 2 or self.points.shape[0] < 1:
            raise ValueError(f"points must be a non-empty (n, d) array, got shape {self.points.shape}")
        if self.true_labels is not None:
            self.true_labels = np.asarray(self.true_labels, dtype=int)
            if self.true_labels.shape != (self.points.shape[0],):
                raise ValueError("true_labels length must match the number of points")

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dims(self) -> int:
        return self.points.shape[1]


@dataclass(eq=False)
class KMeansReport:
    centroids: np.ndarray
    labels: np.ndarray
    inertia: float
    iterations: int
    converged: bool


def _assign(points: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    distances = ((points[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
    return distances.argmin(axis=1)  # argmin takes the lowest index on ties


def _update(points: np.ndarray, labels: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    updated = centroids.copy()
    for cluster in range(centroids.shape[0]):
        members = points[labels == cluster]
        if len(members):
            updated[cluster] = members.mean(axis=0)
    return updated


def lloyd_kmeans(data: Dataset, init_centroids, max_iter: int = 10000, trace=None) -> KMeansReport:
    """Alternate assignment and mean update from the given starting centroids.

    One iteration is a completed assignment+update round; the run stops when a
    fresh assignment repeats the previous one (converged) or at ``max_iter``.
    ``trace(iteration, centroids, labels, inertia)`` is called after each
    round when supplied.
    """
    points = data.points
    centroids = np.array(init_centroids, dtype=float)
    if centroids.ndim != 2 or centroids.shape[1] != points.shape[1]:
        raise ValueError(
            f"centroid shape {centroids.shape} does not match point dimension {points.shape[1]}"
        )
    k = centroids.shape[0]
    if k < 1:
        raise ValueError("need at least one centroid")
    if k > data.n:
        raise ValueError(f"k={k} exceeds the number of points n={data.n}")
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")

    labels = _assign(points, centroids)
    iterations = 0
    converged = False
    while iterations < max_iter:
        centroids = _update(points, labels, centroids)
        iterations += 1
        new_labels = _assign(points, centroids)
        if trace is not None:
            trace(iterations, centroids.copy(), new_labels.copy(), inertia(data, centroids, new_labels))
        if np.array_equal(new_labels, labels):
            converged = True
            break
        labels = new_labels
    else:
        labels = new_labels

    return KMeansReport(
        centroids=centroids,
        labels=labels,
        inertia=inertia(data, centroids, labels),
        iterations=iterations,
        converged=converged,
    )


def random_init(data: Dataset, k: int, seed: int) -> np.ndarray:
    """k distinct observations sampled without replacement, deterministic per seed."""
    if k > data.n:
        raise ValueError(f"cannot draw k={k} distinct points from n={data.n}")
    rng = np.random.default_rng(seed)
    chosen = rng.choice(data.n, size=k, replace=False)
    return data.points[chosen].copy()


def inertia(data: Dataset, centroids, labels) -> float:
    """Sum of squared distances from each point to its assigned centroid."""
    centroids = np.asarray(centroids, dtype=float)
    labels = np.asarray(labels, dtype=int)
    if labels.shape != (data.n,):
        raise ValueError("labels length must match the number of points")
    if centroids.ndim != 2 or centroids.shape[1] != data.dims:
        raise ValueError("centroid dimension must match the data")
    if labels.min() < 0 or labels.max() >= centroids.shape[0]:
        raise ValueError("label refers to a missing centroid")
    return float(((data.points - centroids[labels]) ** 2).sum())


def silhouette(data: Dataset, labels) -> float:
    """Mean silhouette coefficient with plain Euclidean distances.

    For each point, a is its mean distance to its own cluster (self excluded)
    and b the smallest mean distance to another cluster; the score is
    (b - a) / max(a, b), taken as 0 for singleton clusters (and when both a
    and b vanish).  Requires at least two clusters among the labels.
    """
    labels = np.asarray(labels, dtype=int)
    if labels.shape != (data.n,):
        raise ValueError("labels length must match the number of points")
    clusters = np.unique(labels)
    if len(clusters) < 2:
        raise ValueError("silhouette requires at least 2 clusters in the labeling")
    diffs = data.points[:, None, :] - data.points[None, :, :]
    distances = np.sqrt((diffs ** 2).sum(axis=2))
    scores = np.zeros(data.n)
    for i in range(data.n):
        own = labels == labels[i]
        own_size = int(own.sum())
        if own_size == 1:
            continue  # singleton convention: score 0
        a = distances[i, own].sum() / (own_size - 1)
        b = min(distances[i, labels == other].mean() for other in clusters if other != labels[i])
        denom = max(a, b)
        if denom > 0:
            scores[i] = (b - a) / denom
    return float(scores.mean())


def _entropy(counts: np.ndarray) -> float:
    total = counts.sum()
    if total == 0:
        return 0.0
    p = counts[counts > 0] / total
    return float(-(p * np.log(p)).sum())


def homogeneity_completeness_v(true_labels, pred_labels) -> tuple[float, float, float]:
    """Entropy-based agreement between a reference and a predicted labeling.

    h = 1 - H(C|K)/H(C) and c = 1 - H(K|C)/H(K) (each 1 when the denominator
    entropy is zero), v is their harmonic mean (0 when h + c = 0).  Entropies
    use natural log; any fixed base gives the same ratios.
    """
    true_labels = np.asarray(true_labels, dtype=int)
    pred_labels = np.asarray(pred_labels, dtype=int)
    if true_labels.shape != pred_labels.shape or true_labels.ndim != 1:
        raise ValueError("labelings must be 1-D and of equal length")
    n = len(true_labels)
    if n < 1:
        raise ValueError("labelings must be non-empty")

    _, ti = np.unique(true_labels, return_inverse=True)
    _, pi = np.unique(pred_labels, return_inverse=True)
    contingency = np.zeros((ti.max() + 1, pi.max() + 1))
    np.add.at(contingency, (ti, pi), 1.0)

    h_true = _entropy(contingency.sum(axis=1))
    h_pred = _entropy(contingency.sum(axis=0))
    h_true_given_pred = sum(
        (contingency[:, j].sum() / n) * _entropy(contingency[:, j])
        for j in range(contingency.shape[1])
    )
    h_pred_given_true = sum(
        (contingency[i, :].sum() / n) * _entropy(contingency[i, :])
        for i in range(contingency.shape[0])
    )
    homogeneity = 1.0 if h_true == 0 else 1.0 - h_true_given_pred / h_true
    completeness = 1.0 if h_pred == 0 else 1.0 - h_pred_given_true / h_pred
    # conditional entropy never exceeds the marginal; clip float residue
    homogeneity = min(1.0, max(0.0, homogeneity))
    completeness = min(1.0, max(0.0, completeness))
    if homogeneity + completeness == 0:
        v_measure = 0.0
    else:
        v_measure = 2 * homogeneity * completeness / (homogeneity + completeness)
    return homogeneity, completeness, v_measure
