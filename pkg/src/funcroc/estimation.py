"""Sample means, covariance operators and their spectral decompositions.

The discretized covariance operator acts on curve values through the
quadrature weights, (Gamma f)(s) = sum_j K(s, t_j) w_j f(t_j).  Its
eigenproblem is solved in the symmetrized form W^{1/2} K W^{1/2}, which
keeps the spectrum real and yields eigenfunctions orthonormal under the
quadrature inner product.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    DegenerateOperatorError,
    GridMismatchError,
    InsufficientSampleError,
    InvalidKernelError,
)
from .grids import Curve, FunctionalSample, Grid

__all__ = [
    "CovarianceKernel",
    "EigenSystem",
    "sample_mean",
    "sample_covariance",
    "combine_covariances",
    "eigendecompose",
    "choose_dimension",
    "project_scores",
]

_SYMMETRY_RTOL = 1e-10


@dataclass(frozen=True)
class CovarianceKernel:
    """A discretized covariance operator: entry (i, j) approximates gamma(t_i, t_j)."""

    grid: Grid
    matrix: np.ndarray

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=float, copy=True)
        m = len(self.grid)
        if matrix.shape != (m, m):
            raise ValueError("kernel matrix must be square and match the grid")
        if not np.all(np.isfinite(matrix)):
            raise ValueError("kernel matrix must be finite")
        scale = max(1.0, float(np.abs(matrix).max()))
        if np.abs(matrix - matrix.T).max() > _SYMMETRY_RTOL * scale:
            raise InvalidKernelError("kernel matrix is not symmetric within tolerance")
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)


@dataclass(frozen=True)
class EigenSystem:
    """Leading eigenpairs of a covariance operator.

    ``eigenvalues`` are nonincreasing and nonnegative (negative numerical
    eigenvalues are clipped to zero).  Column ``l`` of ``eigenfunctions``
    holds the l-th eigenfunction evaluated on the grid; the columns are
    orthonormal under the quadrature inner product.  ``total_variance`` is
    the sum of the full clipped spectrum, so that explained-variability
    fractions refer to the whole decomposition even when only the leading
    part is retained.
    """

    grid: Grid
    eigenvalues: np.ndarray
    eigenfunctions: np.ndarray
    total_variance: float

    @property
    def count(self) -> int:
        return self.eigenvalues.size

    def eigenfunction(self, ell: int) -> Curve:
        """The ell-th eigenfunction as a curve."""
        return Curve(self.grid, self.eigenfunctions[:, ell])


def sample_mean(s: FunctionalSample) -> Curve:
    """Pointwise mean curve of a sample."""
    return Curve(s.grid, s.values.mean(axis=0))


def sample_covariance(s: FunctionalSample) -> CovarianceKernel:
    """Sample covariance kernel with divisor n.

    Entry (i, j) is the average over subjects of the centered products
    (X - Xbar)(t_i) (X - Xbar)(t_j).
    """
    if s.n < 2:
        raise InsufficientSampleError("covariance estimation needs at least two curves")
    centered = s.values - s.values.mean(axis=0)
    matrix = centered.T @ centered / s.n
    matrix = (matrix + matrix.T) / 2.0
    return CovarianceKernel(s.grid, matrix)


def combine_covariances(
    a: CovarianceKernel,
    b: CovarianceKernel,
    mode: str,
    n_a: int | None = None,
    n_b: int | None = None,
) -> CovarianceKernel:
    """Convex combination of two covariance kernels.

    ``mode="pooled"`` weights by sample sizes n_a/(n_a+n_b) and
    n_b/(n_a+n_b); ``mode="average"`` weights both by 1/2.
    """
    if not a.grid.compatible_with(b.grid):
        raise GridMismatchError("covariance kernels live on different grids")
    if mode == "pooled":
        if n_a is None or n_b is None or n_a < 1 or n_b < 1:
            raise ValueError("pooled mode requires positive sample sizes n_a and n_b")
        total = n_a + n_b
        w_a, w_b = n_a / total, n_b / total
    elif mode == "average":
        w_a = w_b = 0.5
    else:
        raise ValueError(f"unknown combination mode: {mode!r}")
    return CovarianceKernel(a.grid, w_a * a.matrix + w_b * b.matrix)


def eigendecompose(kernel: CovarianceKernel, count: int) -> EigenSystem:
    """Solve the weighted eigenproblem of a discretized covariance operator.

    Returns the ``count`` leading eigenpairs.  Eigenfunction signs are fixed
    so that the largest-magnitude coordinate of each eigenfunction is
    positive, which makes decompositions deterministic across runs.
    """
    m = len(kernel.grid)
    if not 1 <= count <= m:
        raise ValueError("count must lie between 1 and the grid size")
    sqrt_w = np.sqrt(kernel.grid.weights)
    symmetrized = sqrt_w[:, None] * kernel.matrix * sqrt_w[None, :]
    symmetrized = (symmetrized + symmetrized.T) / 2.0
    values, vectors = scipy.linalg.eigh(symmetrized)
    order = np.argsort(values)[::-1]
    values = np.clip(values[order], 0.0, None)
    vectors = vectors[:, order]
    functions = vectors / sqrt_w[:, None]
    for ell in range(count):
        column = functions[:, ell]
        if column[np.argmax(np.abs(column))] < 0:
            functions[:, ell] = -column
    return EigenSystem(
        grid=kernel.grid,
        eigenvalues=values[:count].copy(),
        eigenfunctions=functions[:, :count].copy(),
        total_variance=float(values.sum()),
    )


def choose_dimension(e: EigenSystem, fraction: float) -> int:
    """Smallest k whose leading eigenvalues explain at least ``fraction``.

    The denominator is the total variance of the full decomposition the
    system was computed from, not just the retained part.
    """
    if not 0.0 < fraction <= 1.0:
        raise ValueError("fraction must lie in (0, 1]")
    if e.total_variance <= 0.0:
        raise DegenerateOperatorError("operator has an all-zero spectrum")
    cumulative = np.cumsum(e.eigenvalues)
    # tiny slack so exact-boundary fractions are not lost to roundoff
    target = fraction * e.total_variance * (1.0 - 1e-12)
    reached = np.nonzero(cumulative >= target)[0]
    if reached.size == 0:
        raise ValueError(
            "requested fraction is not attained by the retained eigenvalues; "
            "decompose with a larger count"
        )
    return int(reached[0]) + 1


def project_scores(s: FunctionalSample, basis: EigenSystem, k: int) -> np.ndarray:
    """Quadrature projections of each curve onto the first k eigenfunctions.

    Returns an (n, k) matrix with entry (i, l) = <X_i, phi_l>.
    """
    if not s.grid.compatible_with(basis.grid):
        raise GridMismatchError("sample and basis live on different grids")
    if not 1 <= k <= basis.count:
        raise ValueError("k must lie between 1 and the basis count")
    weighted = basis.grid.weights[:, None] * basis.eigenfunctions[:, :k]
    return s.values @ weighted
