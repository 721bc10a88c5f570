"""QUBO-optimized initial centroids for prototype-based clustering.

The pipeline: encode a candidate centroid matrix in signed radix-2 bits,
expand the matrix-factorization residual ||V - WH||^2 into a pseudo-Boolean
polynomial, reduce it to a QUBO, minimize with classical solvers, decode the
ground state into starting centroids, and benchmark them against random
initialization inside a full k-means + metrics run.
"""

from .clustering import (
    Dataset,
    KMeansReport,
    homogeneity_completeness_v,
    inertia,
    lloyd_kmeans,
    random_init,
    silhouette,
)
from .data import (
    AffineTransform,
    BlobSpec,
    PcaModel,
    fit_scaling,
    generate_blobs,
    load_csv,
    pca_fit,
    pca_transform,
    resolve_transform,
    save_csv,
)
from .encoding import BitExpansion, RadixScheme, decode_bits, encode_integer, expansion_for_cell
from .formulation import (
    FactorizationInstance,
    FactorizationSolution,
    PenaltyConfig,
    VariableLayout,
    build_objective,
    build_qubo,
    decode_solution,
    extract_centroids,
    objective_value,
    onehot_penalty,
    resolve_penalties,
)
from .polynomial import (
    MissingVariableError,
    PseudoBooleanPolynomial,
    Qubo,
    ReductionMap,
    qubo_from_json,
    qubo_to_json,
    quadratize,
    rosenberg_gadget,
)
from .solvers import (
    AnnealParams,
    Sample,
    SampleSet,
    TabuParams,
    samples_from_json,
    samples_to_json,
    solve_exhaustive,
    solve_sa,
    solve_tabu,
)

__version__ = "0.1.0"
