"""Dataset generation and conditioning: Gaussian blobs, CSV files, PCA, scaling.

The QUBO pipeline needs integer coordinates inside the radix encoding's range,
so real-valued data passes through a per-dimension affine map (with an exact
inverse for reporting centroids in original units).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .clustering import Dataset
from .encoding import RadixScheme


@dataclass(frozen=True)
class BlobSpec:
    """Isotropic Gaussian blobs around uniformly drawn centers."""

    n_samples: int
    k_centers: int
    std: float = 1.0
    center_box: tuple[float, float] = (-10.0, 10.0)
    seed: int = 0
    dims: int = 2

    def __post_init__(self):
        if self.center_box[0] >= self.center_box[1]:
            raise ValueError(f"center_box must satisfy lo < hi, got {self.center_box}")
        if self.n_samples < self.k_centers:
            raise ValueError("n_samples must be >= k_centers")
        if self.std <= 0:
            raise ValueError("std must be positive")
        if self.k_centers < 1 or self.dims < 1:
            raise ValueError("k_centers and dims must be >= 1")


def generate_blobs(spec: BlobSpec) -> Dataset:
    """Sample the blobs; deterministic per seed, samples grouped by center.

    Counts split as evenly as possible, the remainder going to the lowest
    center indices; true_labels records each sample's generating center.
    """
    rng = np.random.default_rng(spec.seed)
    lo, hi = spec.center_box
    centers = rng.uniform(lo, hi, size=(spec.k_centers, spec.dims))
    base, extra = divmod(spec.n_samples, spec.k_centers)
    pieces = []
    labels = []
    for idx in range(spec.k_centers):
        count = base + (1 if idx < extra else 0)
        noise = rng.normal(0.0, spec.std, size=(count, spec.dims))
        pieces.append(centers[idx] + noise)
        labels.append(np.full(count, idx, dtype=int))
    return Dataset(points=np.vstack(pieces), true_labels=np.concatenate(labels))


def _expected_header(dims: int, with_label: bool) -> list[str]:
    header = [f"x{i}" for i in range(dims)]
    if with_label:
        header.append("label")
    return header


def save_csv(dataset: Dataset, path) -> None:
    """Header ``x0,...,x{d-1}[,label]``; floats serialized exactly (repr)."""
    with_label = dataset.true_labels is not None
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(_expected_header(dataset.dims, with_label))
        for idx in range(dataset.n):
            row = [repr(float(v)) for v in dataset.points[idx]]
            if with_label:
                row.append(str(int(dataset.true_labels[idx])))
            writer.writerow(row)


def load_csv(path) -> Dataset:
    with open(path, newline="") as handle:
        rows = list(csv.reader(handle))
    if not rows:
        raise ValueError(f"{path}: file is empty")
    header = rows[0]
    with_label = bool(header) and header[-1] == "label"
    dims = len(header) - (1 if with_label else 0)
    if dims < 1 or header != _expected_header(dims, with_label):
        raise ValueError(f"{path}: line 1: expected header x0,...,x{{d-1}}[,label], got {header}")
    points = []
    labels = []
    for line_no, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise ValueError(f"{path}: line {line_no}: expected {len(header)} fields, got {len(row)}")
        try:
            points.append([float(token) for token in row[:dims]])
        except ValueError:
            raise ValueError(f"{path}: line {line_no}: non-numeric coordinate in {row[:dims]}") from None
        if with_label:
            try:
                label = int(row[-1])
            except ValueError:
                raise ValueError(f"{path}: line {line_no}: non-integer label {row[-1]!r}") from None
            if label < 0:
                raise ValueError(f"{path}: line {line_no}: label must be non-negative, got {label}")
            labels.append(label)
    if not points:
        raise ValueError(f"{path}: file has a header but no data rows")
    return Dataset(points=np.array(points), true_labels=np.array(labels) if with_label else None)


def save_centroids_csv(centroids, path) -> None:
    """Centroid files share the data layout: coordinate columns, no label."""
    save_csv(Dataset(points=np.asarray(centroids, dtype=float)), path)


def load_centroids_csv(path) -> np.ndarray:
    return load_csv(path).points


@dataclass(frozen=True, eq=False)
class PcaModel:
    mean: np.ndarray
    components: np.ndarray  # (n_components, d), orthonormal rows
    explained_variance: np.ndarray


def pca_fit(data: Dataset, components: int = 2) -> PcaModel:
    """Principal axes from the eigendecomposition of the sample covariance.

    Components are ordered by decreasing explained variance, each flipped so
    its largest-magnitude entry is positive (deterministic output).
    """
    if data.dims < components:
        raise ValueError(f"need at least {components} dimensions, got {data.dims}")
    if data.n < 2:
        raise ValueError("need at least 2 points to fit a covariance")
    mean = data.points.mean(axis=0)
    centered = data.points - mean
    covariance = centered.T @ centered / (data.n - 1)
    eigenvalues, eigenvectors = np.linalg.eigh(covariance)
    order = np.argsort(eigenvalues, kind="stable")[::-1][:components]
    axes = eigenvectors[:, order].T.copy()
    for row in axes:
        anchor = np.argmax(np.abs(row))
        if row[anchor] < 0:
            row *= -1.0
    return PcaModel(
        mean=mean,
        components=axes,
        explained_variance=np.maximum(eigenvalues[order], 0.0),
    )


def pca_transform(model: PcaModel, data: Dataset) -> Dataset:
    projected = (data.points - model.mean) @ model.components.T
    return Dataset(points=projected, true_labels=data.true_labels)


@dataclass(frozen=True, eq=False)
class AffineTransform:
    """Per-dimension map ``y = x * scale + offset`` with exact inverse."""

    scale: np.ndarray
    offset: np.ndarray

    def apply(self, points) -> np.ndarray:
        return np.asarray(points, dtype=float) * self.scale + self.offset

    def invert(self, values) -> np.ndarray:
        return (np.asarray(values, dtype=float) - self.offset) / self.scale

    def is_identity(self) -> bool:
        return bool((self.scale == 1.0).all() and (self.offset == 0.0).all())

    def to_dict(self) -> dict:
        return {"scale": [float(s) for s in self.scale], "offset": [float(o) for o in self.offset]}

    @classmethod
    def from_dict(cls, doc: dict) -> "AffineTransform":
        return cls(scale=np.array(doc["scale"], dtype=float), offset=np.array(doc["offset"], dtype=float))


def identity_transform(dims: int) -> AffineTransform:
    return AffineTransform(scale=np.ones(dims), offset=np.zeros(dims))


def fit_scaling(data: Dataset, scheme: RadixScheme) -> AffineTransform:
    """Min-max map of each dimension onto the scheme's full integer range.

    A constant dimension maps to 0 (scale 1) and inverts back to its value.
    After apply + round every coordinate is representable.
    """
    lo = float(scheme.min_value)
    hi = float(scheme.max_value)
    mins = data.points.min(axis=0)
    maxs = data.points.max(axis=0)
    scale = np.ones(data.dims)
    offset = np.zeros(data.dims)
    for dim in range(data.dims):
        if maxs[dim] > mins[dim]:
            scale[dim] = (hi - lo) / (maxs[dim] - mins[dim])
            offset[dim] = lo - scale[dim] * mins[dim]
        else:
            offset[dim] = -mins[dim]
    return AffineTransform(scale=scale, offset=offset)


def resolve_transform(data: Dataset, scheme: RadixScheme) -> AffineTransform:
    """Identity when the data is already integral and in range, else fit_scaling.

    Integer-valued data inside the representable range is passed through
    undistorted, so decoded centroids land on the original grid.
    """
    points = data.points
    integral = np.allclose(points, np.rint(points), atol=1e-9)
    if integral and points.min() >= scheme.min_value and points.max() <= scheme.max_value:
        return identity_transform(data.dims)
    return fit_scaling(data, scheme)
