"""Closed-form linear-Gaussian MI and CMI with local values.

All values are in bits. Covariances use centered data and 1/(n-1); there is
no ridge repair: a singular covariance is an error, because silently
regularizing would distort greedy comparisons. Determinants come from
Cholesky factors, which doubles as the positive-definiteness check.

The batched kernel evaluates one conditional mutual information for a stack
of replacement first-argument columns; the permutation tests lean on it.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.linalg import solve_triangular

from ..errors import EstimatorError, InsufficientSamplesError, SingularCovarianceError
from .base import Estimator, InfoValue, as_columns

_LN2 = math.log(2.0)
_LOGDET_FLOOR = math.log(1e-300)
_NEGATIVE_SLACK = -1e-9


def _chol_logdet(matrix: np.ndarray) -> tuple[np.ndarray, float]:
    """Cholesky factor and log-determinant of a symmetric PD matrix."""
    if matrix.shape[0] == 0:
        return np.zeros((0, 0)), 0.0
    try:
        factor = np.linalg.cholesky(matrix)
    except np.linalg.LinAlgError:
        raise SingularCovarianceError(
            f"covariance of dimension {matrix.shape[0]} is not positive definite"
        )
    logdet = 2.0 * float(np.log(np.diag(factor)).sum())
    if logdet <= _LOGDET_FLOOR:
        raise SingularCovarianceError(f"covariance determinant underflows (logdet={logdet:.1f})")
    return factor, logdet


def _quadratic_forms(factor: np.ndarray, centered: np.ndarray) -> np.ndarray:
    """Per-row u' Sigma^{-1} u via the Cholesky factor."""
    if centered.shape[1] == 0:
        return np.zeros(centered.shape[0])
    half = solve_triangular(factor, centered.T, lower=True)
    return np.einsum("dn,dn->n", half, half)


def gaussian_cmi(x, y, z=None, with_local: bool = True) -> InfoValue:
    """Conditional mutual information under a joint-Gaussian model.

    CMI = 1/2 log2( det S_xz det S_yz / (det S_z det S_xyz) ); with an empty
    conditioning set this reduces exactly to the mutual information. Local
    values are the per-observation Gaussian log-density ratios, whose mean
    recovers the determinant form identically.

    Degeneracy rules: a singular conditioning block is an error; a singular
    (x,z) or (y,z) block with a healthy conditioning block means that side is
    deterministic given z and contributes nothing, so the value is exactly 0;
    a singular full joint with healthy sides signals cross-block collinearity
    (e.g. y a copy of x) and is an error.
    """
    x = as_columns(x)
    y = as_columns(y)
    z = as_columns(z) if z is not None and np.size(z) else np.empty((x.shape[0], 0))
    n = x.shape[0]
    if y.shape[0] != n or z.shape[0] != n:
        raise EstimatorError("x, y, z must share the observation axis")
    # The measure is symmetric in (x, y); fixing a canonical internal order
    # makes the float result exactly symmetric too.
    if (y.shape[1], y.tobytes()) < (x.shape[1], x.tobytes()):
        x, y = y, x
    dx, dy, dz = x.shape[1], y.shape[1], z.shape[1]
    if n < dx + dy + dz + 2:
        raise InsufficientSamplesError(
            f"need at least {dx + dy + dz + 2} observations, got {n}"
        )
    data = np.concatenate([x, y, z], axis=1)
    centered = data - data.mean(axis=0)
    cov = centered.T @ centered / (n - 1)

    ix = np.arange(dx)
    iy = np.arange(dx, dx + dy)
    iz = np.arange(dx + dy, dx + dy + dz)
    ixz = np.concatenate([ix, iz])
    iyz = np.concatenate([iy, iz])

    _chol_logdet(cov[np.ix_(iz, iz)])  # singular conditioning is always an error
    try:
        f_xz, ld_xz = _chol_logdet(cov[np.ix_(ixz, ixz)])
        f_yz, ld_yz = _chol_logdet(cov[np.ix_(iyz, iyz)])
    except SingularCovarianceError:
        local = np.zeros(n) if with_local else None
        return InfoValue(value=0.0, local=local)
    f_z, ld_z = _chol_logdet(cov[np.ix_(iz, iz)])
    f_xyz, ld_xyz = _chol_logdet(cov)

    value = 0.5 * (ld_xz + ld_yz - ld_z - ld_xyz) / _LN2
    if value < _NEGATIVE_SLACK:
        raise EstimatorError(f"information value {value} below numerical slack; data ill-conditioned")
    if not with_local:
        return InfoValue(value=value)
    q_xz = _quadratic_forms(f_xz, centered[:, ixz])
    q_yz = _quadratic_forms(f_yz, centered[:, iyz])
    q_z = _quadratic_forms(f_z, centered[:, iz])
    q_xyz = _quadratic_forms(f_xyz, centered)
    local = (ld_xz + ld_yz - ld_z - ld_xyz + q_xz + q_yz - q_z - q_xyz) / (2.0 * _LN2)
    return InfoValue(value=value, local=local)


def gaussian_mi(x, y, with_local: bool = True) -> InfoValue:
    """Linear-Gaussian mutual information; univariate case is -1/2 log2(1-r^2)."""
    return gaussian_cmi(x, y, None, with_local=with_local)


def _batch_logdet(stack: np.ndarray) -> np.ndarray:
    """Log-determinants of a (m, d, d) stack of SPD matrices via Cholesky."""
    if stack.shape[1] == 0:
        return np.zeros(stack.shape[0])
    try:
        factors = np.linalg.cholesky(stack)
    except np.linalg.LinAlgError:
        raise SingularCovarianceError("a permuted covariance is not positive definite")
    diags = np.diagonal(factors, axis1=1, axis2=2)
    logdets = 2.0 * np.log(diags).sum(axis=1)
    if logdets.min() <= _LOGDET_FLOOR:
        raise SingularCovarianceError("a permuted covariance determinant underflows")
    return logdets


def gaussian_cmi_batch(x_batch: np.ndarray, y, z=None, chunk_rows: int = 64_000_000) -> np.ndarray:
    """CMI(x_i; y | z) for each replacement block x_i in an (m, n, dx) stack.

    The (y, z) part of the covariance is fixed and computed once; each batch
    member contributes only its own variance and cross-covariance, assembled
    into stacked small matrices and factorized together.
    """
    x_batch = np.asarray(x_batch, dtype=np.float64)
    if x_batch.ndim == 2:
        x_batch = x_batch[:, :, np.newaxis]
    m, n, dx = x_batch.shape
    y = as_columns(y)
    z = as_columns(z) if z is not None and np.size(z) else np.empty((n, 0))
    dy, dz = y.shape[1], z.shape[1]
    if n < dx + dy + dz + 2:
        raise InsufficientSamplesError(
            f"need at least {dx + dy + dz + 2} observations, got {n}"
        )
    fixed = np.concatenate([y, z], axis=1)
    fixed_c = fixed - fixed.mean(axis=0)
    s_ff = fixed_c.T @ fixed_c / (n - 1)
    _chol_logdet(s_ff[dy:, dy:])  # singular conditioning is always an error
    try:
        _, ld_yz = _chol_logdet(s_ff)
    except SingularCovarianceError:
        return np.zeros(m)  # y deterministic given z: nothing left to share
    _, ld_z = _chol_logdet(s_ff[dy:, dy:])

    d_full = dx + dy + dz
    out = np.empty(m, dtype=np.float64)
    step = max(1, int(chunk_rows // max(1, n * dx)))
    for start in range(0, m, step):
        xc = x_batch[start : start + step]
        xc = xc - xc.mean(axis=1, keepdims=True)
        mm = xc.shape[0]
        s_xx = np.einsum("mnd,mne->mde", xc, xc) / (n - 1)
        s_xf = np.einsum("mnd,nf->mdf", xc, fixed_c) / (n - 1)

        full = np.empty((mm, d_full, d_full))
        full[:, :dx, :dx] = s_xx
        full[:, :dx, dx:] = s_xf
        full[:, dx:, :dx] = np.transpose(s_xf, (0, 2, 1))
        full[:, dx:, dx:] = s_ff
        ld_xyz = _batch_logdet(full)

        d_xz = dx + dz
        xz = np.empty((mm, d_xz, d_xz))
        xz[:, :dx, :dx] = s_xx
        xz[:, :dx, dx:] = s_xf[:, :, dy:]
        xz[:, dx:, :dx] = np.transpose(s_xf[:, :, dy:], (0, 2, 1))
        xz[:, dx:, dx:] = s_ff[dy:, dy:]
        ld_xz = _batch_logdet(xz)

        out[start : start + mm] = 0.5 * (ld_xz + ld_yz - ld_z - ld_xyz) / _LN2
    return out


class GaussianEstimator(Estimator):
    """Adapter exposing the linear-Gaussian estimator behind the common API."""

    name = "gaussian"

    def cmi(self, x, y, z=None) -> InfoValue:
        return gaussian_cmi(x, y, z, with_local=True)

    def cmi_value(self, x, y, z=None) -> float:
        return gaussian_cmi(x, y, z, with_local=False).value

    def cmi_surrogate_batch(self, x_batch, y, z=None) -> np.ndarray:
        return gaussian_cmi_batch(x_batch, y, z)

    def candidates_cmi(self, columns, y, z=None) -> np.ndarray:
        columns = np.atleast_2d(np.asarray(columns, dtype=np.float64))
        if columns.shape[1] == 0:
            return np.zeros(0)
        return gaussian_cmi_batch(columns.T[:, :, np.newaxis], y, z)
