"""Robust hyperplane and nullspace solvers used by local optimization.

All solvers share one IRLS skeleton: starting from the least-singular
direction(s) of the data, they alternate reweighting (inverse residual with a
small floor, or Huber) with a weighted eigen-update, and stop once the
corresponding surrogate objective decreases by less than ``tol`` or after
``tau_max`` iterations. The reweighting is a majorize-minimize step, so each
objective is non-increasing along iterates; tests rely on that guarantee.

Every solver accepts an optional ``trace`` list that receives the objective
value at the initial point and after each update.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import InsufficientDataError, InvalidInputError
from .linalg import least_eigvecs, least_singular_vector, top_eigvecs


@dataclass(frozen=True)
class IrlsConfig:
    """Shared IRLS settings.

    tau_max : iteration cap.
    tol : convergence accuracy on the objective decrease.
    weight_floor : denominator regularizer for inverse-residual weights;
        distinct from ``tol`` (the floor smooths |r| near zero, the tolerance
        stops the outer loop).
    """

    tau_max: int = 100
    tol: float = 1e-5
    weight_floor: float = 1e-9

    def __post_init__(self):
        if self.tau_max < 1 or self.tol <= 0.0 or self.weight_floor <= 0.0:
            raise InvalidInputError("tau_max >= 1, tol > 0 and weight_floor > 0 required")


def smoothed_abs(r: np.ndarray, delta: float) -> np.ndarray:
    """Huber-style smoothing of |r|: r^2/(2 delta) + delta/2 inside |r| <= delta."""
    r = np.abs(r)
    return np.where(r <= delta, r * r / (2.0 * delta) + delta / 2.0, r)


def huber_loss(r: np.ndarray, c: float) -> np.ndarray:
    r = np.abs(r)
    return np.where(r <= c, 0.5 * r * r, c * r - 0.5 * c * c)


def _as_data_matrix(y: np.ndarray) -> np.ndarray:
    y = np.asarray(y, dtype=np.float64)
    if y.ndim != 2:
        raise InvalidInputError(f"expected a (d, n) data matrix, got shape {y.shape}")
    return y


def _as_blocks(data: np.ndarray) -> np.ndarray:
    data = np.asarray(data, dtype=np.float64)
    if data.ndim == 2:  # (d, n) columns -> groups of size 1
        data = data.T[:, :, None]
    if data.ndim != 3:
        raise InvalidInputError(f"expected (n, d, m) blocks, got shape {data.shape}")
    return data


def _irls_single_vector(blocks: np.ndarray, weight_fn, loss_fn, cfg: IrlsConfig,
                        trace: list | None) -> np.ndarray:
    """Shared loop for all single-normal solvers.

    ``blocks`` is (n, d, m); group residuals are ||B_i^T b||_2. The weighted
    covariance sum_i w_i B_i B_i^T is evaluated as one rank-(n*m) gemm on the
    stacked constraint rows, which keeps the per-iteration reduction order
    fixed (bit-reproducible) and fast.
    """
    n, d, m = blocks.shape
    if n * m < d - 1:
        raise InsufficientDataError(f"need at least d-1={d - 1} constraints, got {n * m}")
    rows = np.ascontiguousarray(blocks.transpose(0, 2, 1).reshape(n * m, d))

    def residuals(vec: np.ndarray) -> np.ndarray:
        per_row = (rows @ vec).reshape(n, m)
        return np.linalg.norm(per_row, axis=1)

    b = least_singular_vector(rows)
    resid = residuals(b)
    obj = float(np.sum(loss_fn(resid)))
    if trace is not None:
        trace.append(obj)
    for _ in range(cfg.tau_max):
        w_rows = np.repeat(weight_fn(resid), m)
        b = least_eigvecs((rows * w_rows[:, None]).T @ rows, 1)[:, 0]
        resid = residuals(b)
        new_obj = float(np.sum(loss_fn(resid)))
        if trace is not None:
            trace.append(new_obj)
        if obj - new_obj < cfg.tol:
            break
        obj = new_obj
    return b


def dpcp_irls(y: np.ndarray, cfg: IrlsConfig = IrlsConfig(), trace: list | None = None) -> np.ndarray:
    """Robust hyperplane normal minimizing the sum of |b^T y_i| on the sphere.

    Parameters
    ----------
    y : (d, n) data matrix, columns are (typically unit) embeddings, n >= d-1.
    cfg : IRLS settings.
    trace : optional list collecting the smoothed objective per iterate.

    Returns
    -------
    Unit d-vector, the fixed point of reweighted least-eigenvector iterations
    with weights 1 / max(|b^T y_i|, weight_floor), initialized at the least
    singular direction of the data.
    """
    return dpcp_irls_group(_as_data_matrix(y).T[:, :, None], cfg, trace)


def dpcp_irls_group(blocks: np.ndarray, cfg: IrlsConfig = IrlsConfig(), trace: list | None = None) -> np.ndarray:
    """Group variant: minimize the sum of ||B_i^T b||_2 over unit b.

    ``blocks`` is (n, d, m); for m = 1 this is exactly :func:`dpcp_irls` on
    the same columns. Used for the two-constraint homography blocks (and any
    group-structured embedding).
    """
    blocks = _as_blocks(blocks)
    delta = cfg.weight_floor
    return _irls_single_vector(
        blocks,
        weight_fn=lambda r: 1.0 / np.maximum(r, delta),
        loss_fn=lambda r: smoothed_abs(r, delta),
        cfg=cfg,
        trace=trace,
    )


def huber_irls(
    data: np.ndarray,
    c_huber: float,
    cfg: IrlsConfig = IrlsConfig(),
    trace: list | None = None,
) -> np.ndarray:
    """Huber-loss analogue of :func:`dpcp_irls` / :func:`dpcp_irls_group`.

    ``data`` may be a (d, n) column matrix or (n, d, m) blocks. Weights are 1
    for residuals within ``c_huber`` and c_huber/|r| beyond it, so the large
    c_huber limit reproduces the plain least-singular-vector fit.
    """
    if c_huber <= 0.0:
        raise InvalidInputError("c_huber must be positive")
    return _irls_single_vector(
        _as_blocks(data),
        weight_fn=lambda r: np.where(r <= c_huber, 1.0, c_huber / np.maximum(r, c_huber)),
        loss_fn=lambda r: huber_loss(r, c_huber),
        cfg=cfg,
        trace=trace,
    )


def dpcp_irls_basis(
    y: np.ndarray,
    codim: int = 3,
    cfg: IrlsConfig = IrlsConfig(),
    trace: list | None = None,
) -> np.ndarray:
    """Robust orthonormal basis of a ``codim``-dimensional nullspace.

    Minimizes the sum of ||B^T y_i||_2 over orthonormal (d, codim) B; all
    ``codim`` directions are updated jointly each iteration (simultaneous
    least eigenvectors of the weighted covariance), which keeps B orthonormal
    by construction.
    """
    y = _as_data_matrix(y)
    d, n = y.shape
    if not 1 <= codim < d:
        raise InvalidInputError(f"codimension {codim} out of range for d={d}")
    if n < d - codim:
        raise InsufficientDataError(f"need at least d-c={d - codim} columns, got {n}")

    delta = cfg.weight_floor
    basis = least_eigvecs(y @ y.T, codim)
    resid = np.linalg.norm(basis.T @ y, axis=0)
    obj = float(np.sum(smoothed_abs(resid, delta)))
    if trace is not None:
        trace.append(obj)
    for _ in range(cfg.tau_max):
        w = 1.0 / np.maximum(resid, delta)
        basis = least_eigvecs((y * w) @ y.T, codim)
        resid = np.linalg.norm(basis.T @ y, axis=0)
        new_obj = float(np.sum(smoothed_abs(resid, delta)))
        if trace is not None:
            trace.append(new_obj)
        if obj - new_obj < cfg.tol:
            break
        obj = new_obj
    return basis


def nullspace_weights(basis: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Per-column distances ||B^T y_i||_2 from the data to the nullspace basis."""
    basis = np.asarray(basis, dtype=np.float64)
    y = _as_data_matrix(y)
    return np.linalg.norm(basis.T @ y, axis=0)


def weighted_principal_subspace(y: np.ndarray, weights: np.ndarray, k: int = 5) -> np.ndarray:
    """Top-k principal directions of the weighted data (descending eigenvalue).

    Eigenvectors of sum_i w_i^2 y_i y_i^T, i.e. the principal directions of
    the column-scaled matrix [w_1 y_1, ..., w_n y_n].
    """
    y = _as_data_matrix(y)
    weights = np.asarray(weights, dtype=np.float64)
    d, n = y.shape
    if n < k:
        raise InsufficientDataError(f"need at least k={k} columns, got {n}")
    if weights.shape != (n,) or np.any(weights < 0.0):
        raise InvalidInputError("weights must be one non-negative value per column")
    return top_eigvecs((y * weights**2) @ y.T, k)
