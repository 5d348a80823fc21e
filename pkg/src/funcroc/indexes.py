"""Discriminant indexes: scalar rules that score curves.

Six rules are provided.  Three are parameter free (maximum, minimum and
integral of the trajectory).  The mean-difference rule projects onto the
normalized difference of the group mean curves.  The optimal linear rule
maximizes the ratio of the projected mean separation to the projected
standard deviation over a finite-dimensional eigenfunction span, optionally
with a roughness penalty.  The quadratic rule applies a Gaussian
discriminant in the coordinates of the leading eigenfunctions of the
pooled covariance operator, which remains informative when the two groups
differ in covariance rather than in mean.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np
import scipy.linalg

from .errors import (
    DegenerateDirectionError,
    GridMismatchError,
    InsufficientSampleError,
    SingularCovarianceError,
    SingularSystemError,
)
from .estimation import (
    EigenSystem,
    choose_dimension,
    combine_covariances,
    eigendecompose,
    project_scores,
    sample_covariance,
    sample_mean,
)
from .grids import Curve, FunctionalSample, Group, norm

__all__ = [
    "MaxIndex",
    "MinIndex",
    "IntegralIndex",
    "LinearIndex",
    "QuadraticIndex",
    "DiscriminantIndex",
    "PenaltySpec",
    "apply_index",
    "index_scores",
    "fit_mean_difference",
    "fit_optimal_linear",
    "fit_quadratic",
    "quadratic_population",
    "second_difference_penalty",
]


@dataclass(frozen=True)
class MaxIndex:
    """Largest value of the trajectory."""


@dataclass(frozen=True)
class MinIndex:
    """Smallest value of the trajectory."""


@dataclass(frozen=True)
class IntegralIndex:
    """Quadrature integral of the trajectory."""


@dataclass(frozen=True)
class LinearIndex:
    """Projection <beta, X> onto a fixed direction.

    Fitted indexes carry a unit-norm ``beta``; the scores and every rank
    statistic built from them are invariant to positive rescaling of beta.
    """

    beta: Curve

    def __post_init__(self):
        if norm(self.beta) == 0.0:
            raise ValueError("beta must be nonzero")


@dataclass(frozen=True)
class QuadraticIndex:
    """Quadratic score -x' L x + 2 a' x of the eigenfunction coordinates x."""

    basis: EigenSystem
    k: int
    lambda_mat: np.ndarray
    alpha_vec: np.ndarray

    def __post_init__(self):
        if not 1 <= self.k <= self.basis.count:
            raise ValueError("k must lie between 1 and the basis count")
        lam = np.array(self.lambda_mat, dtype=float, copy=True)
        alpha = np.array(self.alpha_vec, dtype=float, copy=True)
        if lam.shape != (self.k, self.k):
            raise ValueError("lambda_mat must be k x k")
        if alpha.shape != (self.k,):
            raise ValueError("alpha_vec must have length k")
        scale = max(1.0, float(np.abs(lam).max()))
        if np.abs(lam - lam.T).max() > 1e-10 * scale:
            raise ValueError("lambda_mat must be symmetric")
        lam.setflags(write=False)
        alpha.setflags(write=False)
        object.__setattr__(self, "lambda_mat", lam)
        object.__setattr__(self, "alpha_vec", alpha)


DiscriminantIndex = Union[MaxIndex, MinIndex, IntegralIndex, LinearIndex, QuadraticIndex]


@dataclass(frozen=True)
class PenaltySpec:
    """Roughness penalty for the optimal linear fit.

    ``lam`` is the nonnegative penalty weight.  ``matrix``, when given, is
    the penalty Gram matrix in basis coordinates and must match the
    dimension chosen at fit time; when omitted, a second-difference
    curvature Gram matrix of the basis functions is built during fitting.
    """

    lam: float
    matrix: np.ndarray | None = None

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError("penalty weight must be nonnegative")
        if self.matrix is not None:
            matrix = np.array(self.matrix, dtype=float, copy=True)
            if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
                raise ValueError("penalty matrix must be square")
            scale = max(1.0, float(np.abs(matrix).max()))
            if np.abs(matrix - matrix.T).max() > 1e-10 * scale:
                raise ValueError("penalty matrix must be symmetric")
            matrix.setflags(write=False)
            object.__setattr__(self, "matrix", matrix)


def index_scores(idx: DiscriminantIndex, s: FunctionalSample) -> np.ndarray:
    """Evaluate an index on every curve of a sample at once."""
    if isinstance(idx, MaxIndex):
        return s.values.max(axis=1)
    if isinstance(idx, MinIndex):
        return s.values.min(axis=1)
    if isinstance(idx, IntegralIndex):
        return s.values @ s.grid.weights
    if isinstance(idx, LinearIndex):
        if not s.grid.compatible_with(idx.beta.grid):
            raise GridMismatchError("sample and index live on different grids")
        return s.values @ (s.grid.weights * idx.beta.values)
    if isinstance(idx, QuadraticIndex):
        scores = project_scores(s, idx.basis, idx.k)
        quadratic = np.einsum("ij,jk,ik->i", scores, idx.lambda_mat, scores)
        return -quadratic + 2.0 * scores @ idx.alpha_vec
    raise TypeError(f"unknown index type: {type(idx).__name__}")


def apply_index(idx: DiscriminantIndex, x: Curve) -> float:
    """Evaluate an index on a single curve."""
    holder = FunctionalSample(x.grid, x.values[None, :], group=Group.HEALTHY)
    return float(index_scores(idx, holder)[0])


def _mean_difference(d: FunctionalSample, h: FunctionalSample) -> Curve:
    if not d.grid.compatible_with(h.grid):
        raise GridMismatchError("samples live on different grids")
    return Curve(d.grid, sample_mean(d).values - sample_mean(h).values)


def _check_direction_scale(diff_norm: float, d, h) -> None:
    scale = max(norm(sample_mean(d)), norm(sample_mean(h)), 1.0)
    if diff_norm <= 1e-13 * scale:
        raise DegenerateDirectionError(
            "group mean curves coincide; no discriminating direction exists"
        )


def fit_mean_difference(d: FunctionalSample, h: FunctionalSample) -> LinearIndex:
    """Linear index along the normalized difference of the group means."""
    diff = _mean_difference(d, h)
    length = norm(diff)
    _check_direction_scale(length, d, h)
    return LinearIndex(Curve(d.grid, diff.values / length))


def second_difference_penalty(basis: EigenSystem, k: int) -> np.ndarray:
    """Curvature penalty Gram matrix of the first k basis functions.

    Entry (l, r) is the quadrature inner product of the discrete second
    derivatives of basis functions l and r; always symmetric PSD.
    """
    points = basis.grid.points
    curvatures = np.empty((len(basis.grid), k))
    for ell in range(k):
        first = np.gradient(basis.eigenfunctions[:, ell], points)
        curvatures[:, ell] = np.gradient(first, points)
    weighted = basis.grid.weights[:, None] * curvatures
    gram = curvatures.T @ weighted
    return (gram + gram.T) / 2.0


def fit_optimal_linear(
    d: FunctionalSample,
    h: FunctionalSample,
    mode: str = "average",
    var_fraction: float = 0.95,
    penalty: PenaltySpec | None = None,
) -> LinearIndex:
    """Linear index maximizing the projected mean separation over noise.

    The search space is the span of the leading eigenfunctions of the
    pooled covariance operator, with the dimension chosen as the smallest
    one explaining ``var_fraction`` of the pooled variability.  ``mode``
    selects the covariance entering the denominator of the criterion:
    ``"pooled"`` (sample-size weighted, appropriate when equal group
    covariances are assumed) or ``"average"`` (unweighted mean of the two
    group covariances, safer when they may differ).  In the pooled case the
    coordinate system diagonalizes the denominator and the solution reduces
    to eigenvalue-rescaled mean-difference coordinates.

    The closed-form maximizer solves (G + lam * P) b = delta in basis
    coordinates, where delta holds the projected mean differences and G the
    projected denominator covariance.  The returned direction has unit
    quadrature norm and nonnegative inner product with the mean difference.
    """
    if mode not in ("pooled", "average"):
        raise ValueError(f"unknown mode: {mode!r}")
    if d.n < 2 or h.n < 2:
        raise InsufficientSampleError("both groups need at least two curves")
    diff = _mean_difference(d, h)

    cov_d = sample_covariance(d)
    cov_h = sample_covariance(h)
    pooled = combine_covariances(cov_d, cov_h, "pooled", n_a=d.n, n_b=h.n)
    denominator = pooled if mode == "pooled" else combine_covariances(cov_d, cov_h, "average")

    basis = eigendecompose(pooled, count=len(d.grid))
    k = choose_dimension(basis, var_fraction)

    grid = d.grid
    phi = basis.eigenfunctions[:, :k]
    weighted_phi = grid.weights[:, None] * phi
    delta = weighted_phi.T @ diff.values
    _check_direction_scale(float(np.linalg.norm(delta)), d, h)

    gram = weighted_phi.T @ denominator.matrix @ weighted_phi
    gram = (gram + gram.T) / 2.0
    if penalty is not None and penalty.lam > 0.0:
        pen = penalty.matrix
        if pen is None:
            pen = second_difference_penalty(basis, k)
        elif pen.shape != (k, k):
            raise ValueError(
                f"penalty matrix has shape {pen.shape}, but the fit selected k={k}"
            )
        gram = gram + penalty.lam * pen

    try:
        factor = scipy.linalg.cho_factor(gram)
        coefficients = scipy.linalg.cho_solve(factor, delta)
    except scipy.linalg.LinAlgError as exc:
        raise SingularSystemError(
            "projected covariance system is singular; increase the penalty "
            "weight or lower the variance fraction"
        ) from exc

    beta_values = phi @ coefficients
    beta = Curve(grid, beta_values)
    length = norm(beta)
    if length == 0.0:
        raise DegenerateDirectionError("optimal direction collapsed to zero")
    beta_values = beta_values / length
    if float(np.dot(grid.weights * beta_values, diff.values)) < 0.0:
        beta_values = -beta_values
    return LinearIndex(Curve(grid, beta_values))


def _spd_inverse(matrix: np.ndarray, ridge: float, group: str) -> np.ndarray:
    regularized = matrix + ridge * np.eye(matrix.shape[0])
    try:
        factor = scipy.linalg.cho_factor(regularized)
    except scipy.linalg.LinAlgError as exc:
        raise SingularCovarianceError(group) from exc
    return scipy.linalg.cho_solve(factor, np.eye(matrix.shape[0]))


def fit_quadratic(
    d: FunctionalSample,
    h: FunctionalSample,
    var_fraction: float = 0.95,
    ridge: float = 0.0,
) -> QuadraticIndex:
    """Gaussian quadratic discriminant in pooled eigenfunction coordinates.

    Both samples are projected onto the leading eigenfunctions of the
    pooled covariance operator; the score means and full covariance
    matrices of each group (divisor n) define the quadratic coefficients
    L = inv(S_D + ridge I) - inv(S_H + ridge I) and
    a = inv(S_D + ridge I) mu_D - inv(S_H + ridge I) mu_H.
    """
    if not d.grid.compatible_with(h.grid):
        raise GridMismatchError("samples live on different grids")
    if d.n < 2 or h.n < 2:
        raise InsufficientSampleError("both groups need at least two curves")
    if ridge < 0:
        raise ValueError("ridge must be nonnegative")

    cov_d = sample_covariance(d)
    cov_h = sample_covariance(h)
    pooled = combine_covariances(cov_d, cov_h, "pooled", n_a=d.n, n_b=h.n)
    basis = eigendecompose(pooled, count=len(d.grid))
    k = choose_dimension(basis, var_fraction)
    if d.n < k + 1:
        raise InsufficientSampleError(
            f"diseased group has {d.n} curves but the quadratic fit needs at least {k + 1}"
        )
    if h.n < k + 1:
        raise InsufficientSampleError(
            f"healthy group has {h.n} curves but the quadratic fit needs at least {k + 1}"
        )

    scores_d = project_scores(d, basis, k)
    scores_h = project_scores(h, basis, k)
    mu_d = scores_d.mean(axis=0)
    mu_h = scores_h.mean(axis=0)
    centered_d = scores_d - mu_d
    centered_h = scores_h - mu_h
    sigma_d = centered_d.T @ centered_d / d.n
    sigma_h = centered_h.T @ centered_h / h.n

    inv_d = _spd_inverse(sigma_d, ridge, "diseased")
    inv_h = _spd_inverse(sigma_h, ridge, "healthy")
    lambda_mat = inv_d - inv_h
    lambda_mat = (lambda_mat + lambda_mat.T) / 2.0
    alpha_vec = inv_d @ mu_d - inv_h @ mu_h
    return QuadraticIndex(basis=basis, k=k, lambda_mat=lambda_mat, alpha_vec=alpha_vec)


def quadratic_population(
    mu_d: np.ndarray,
    mu_h: np.ndarray,
    sigma_d: np.ndarray,
    sigma_h: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """Population quadratic coefficients from exact moments.

    Returns (L, a) with L = inv(Sigma_D) - inv(Sigma_H) and
    a = inv(Sigma_D) mu_D - inv(Sigma_H) mu_H.  For diagonal covariances
    the entries of L reduce to (lambda_H - lambda_D) / (lambda_D lambda_H).
    """
    mu_d = np.asarray(mu_d, dtype=float)
    mu_h = np.asarray(mu_h, dtype=float)
    k = mu_d.size
    if mu_h.shape != (k,):
        raise ValueError("mean vectors must have equal length")
    inverses = []
    for name, sigma in (("sigma_d", sigma_d), ("sigma_h", sigma_h)):
        sigma = np.asarray(sigma, dtype=float)
        if sigma.shape != (k, k):
            raise ValueError(f"{name} must be k x k")
        scale = max(1.0, float(np.abs(sigma).max()))
        if np.abs(sigma - sigma.T).max() > 1e-10 * scale:
            raise ValueError(f"{name} must be symmetric")
        try:
            factor = scipy.linalg.cho_factor(sigma)
        except scipy.linalg.LinAlgError as exc:
            raise ValueError(f"{name} must be positive definite") from exc
        inverses.append(scipy.linalg.cho_solve(factor, np.eye(k)))
    inv_d, inv_h = inverses
    lambda_mat = inv_d - inv_h
    lambda_mat = (lambda_mat + lambda_mat.T) / 2.0
    alpha_vec = inv_d @ mu_d - inv_h @ mu_h
    return lambda_mat, alpha_vec
