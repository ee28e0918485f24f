"""Dense complex linear algebra used by every other module.

Matrices are plain ``numpy`` arrays of dtype complex128. Factorizations come
from LAPACK through numpy/scipy; this module adds the rank, kernel and
singularity conventions the rest of the package relies on.
"""
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import ConvergenceFailure, DimensionMismatch, SingularMatrix
from .tolerance import resolve


def as_matrix(x, name="matrix"):
    """Return ``x`` as a finite 2-D complex array (vectors become columns)."""
    m = np.array(x, dtype=complex)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    elif m.ndim == 1:
        m = m.reshape(-1, 1)
    elif m.ndim != 2:
        raise DimensionMismatch(f"{name} must be 2-D, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} has non-finite entries")
    return m


def _square(m, name="matrix"):
    m = as_matrix(m, name)
    if m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got {m.shape}")
    return m


def max_norm(m):
    m = np.asarray(m)
    return float(np.max(np.abs(m))) if m.size else 0.0


def _lu(m):
    # singularity is reported through the pivot check, not scipy's warning
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", sla.LinAlgWarning)
        return sla.lu_factor(m, check_finite=False)


def solve_linear(m, rhs):
    """Solve ``m x = rhs`` by partial-pivoted LU.

    Raises SingularMatrix when a pivot falls below ``pivot * max|m|``.
    """
    m = _square(m)
    vector = np.ndim(rhs) == 1
    b = as_matrix(rhs, "rhs")
    if b.shape[0] != m.shape[0]:
        raise DimensionMismatch(f"rhs has {b.shape[0]} rows, matrix has {m.shape[0]}")
    lu, piv = _lu(m)
    scale = max_norm(m)
    smallest = float(np.min(np.abs(np.diag(lu)))) if m.size else 0.0
    if scale == 0.0 or smallest < resolve(None).pivot * scale:
        raise SingularMatrix(f"pivot {smallest:.3e} below threshold (max|m| = {scale:.3e})")
    x = sla.lu_solve((lu, piv), b, check_finite=False)
    return x[:, 0] if vector else x


def inv(m):
    m = _square(m)
    return solve_linear(m, np.eye(m.shape[0], dtype=complex))


def det(m):
    """Determinant as the signed product of LU pivots."""
    m = _square(m)
    if m.shape[0] == 0:
        return 1.0 + 0j
    lu, piv = _lu(m)
    swaps = int(np.count_nonzero(piv != np.arange(len(piv))))
    sign = -1.0 if swaps % 2 else 1.0
    return complex(sign * np.prod(np.diag(lu)))


@dataclass(frozen=True)
class SvdResult:
    u: np.ndarray
    sigma: np.ndarray
    v_adj: np.ndarray

    @property
    def sigma_max(self):
        return float(self.sigma[0]) if self.sigma.size else 0.0

    @property
    def sigma_min(self):
        return float(self.sigma[-1]) if self.sigma.size else 0.0

    def reconstruct(self):
        r, c = self.u.shape[0], self.v_adj.shape[0]
        d = np.zeros((r, c), dtype=complex)
        k = len(self.sigma)
        d[:k, :k] = np.diag(self.sigma)
        return self.u @ d @ self.v_adj


def svd(m):
    m = as_matrix(m)
    if m.size == 0:
        raise DimensionMismatch("svd of an empty matrix")
    try:
        u, s, vh = np.linalg.svd(m, full_matrices=True)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(
            f"SVD did not converge for shape {m.shape}, max|m| = {max_norm(m):.3e}"
        ) from exc
    return SvdResult(u=u, sigma=s, v_adj=vh)


def _cutoff(s, tol):
    return resolve(tol).rank * (float(s.sigma[0]) if s.sigma.size else 0.0)


def rank(m, tol=None):
    s = svd(m)
    if s.sigma_max == 0.0:
        return 0
    return int(np.count_nonzero(s.sigma > _cutoff(s, tol)))


def kernel_basis(m, tol=None, scale=None):
    """Orthonormal columns spanning the numerical kernel of ``m``.

    Singular values at or below ``tol * sigma_max`` count as zero. ``scale``
    raises the reference to ``max(sigma_max, scale)``, for matrices such as
    ``I - M`` with ``|M| <= 1`` whose natural size is 1 even when they are tiny.
    """
    m = as_matrix(m)
    cols = m.shape[1]
    s = svd(m)
    ref = s.sigma_max if scale is None else max(s.sigma_max, float(scale))
    if ref == 0.0:
        return np.eye(cols, dtype=complex)
    r = int(np.count_nonzero(s.sigma > resolve(tol).rank * ref))
    return s.v_adj[r:].conj().T.copy()


def complement_basis(basis, dim):
    """Orthonormal basis of the orthogonal complement of span(basis) in C^dim."""
    basis = np.asarray(basis, dtype=complex).reshape(dim, -1)
    if basis.shape[1] == 0:
        return np.eye(dim, dtype=complex)
    q, _ = np.linalg.qr(basis, mode="complete")
    return q[:, basis.shape[1]:]


def pseudoinverse(m, tol=None):
    """Moore-Penrose inverse; singular values at or below the cutoff are dropped."""
    m = as_matrix(m)
    s = svd(m)
    cut = _cutoff(s, tol)
    k = len(s.sigma)
    keep = s.sigma > cut if s.sigma_max > 0 else np.zeros(k, dtype=bool)
    inv_s = np.where(keep, 1.0 / np.where(keep, s.sigma, 1.0), 0.0)
    return (s.v_adj[:k].conj().T * inv_s) @ s.u[:, :k].conj().T


def penrose_defects(m, mp):
    """Max-norm residuals of the four Penrose identities."""
    m = as_matrix(m)
    mp = as_matrix(mp)
    return (
        max_norm(m @ mp @ m - m),
        max_norm(mp @ m @ mp - mp),
        max_norm((m @ mp).conj().T - m @ mp),
        max_norm((mp @ m).conj().T - mp @ m),
    )


def unitarity_defect(m):
    m = _square(m)
    return max_norm(m.conj().T @ m - np.eye(m.shape[0]))


def is_unitary(m, tol=1e-9):
    return unitarity_defect(m) <= tol


def is_hermitian(m, tol=1e-9):
    m = _square(m)
    return max_norm(m - m.conj().T) <= tol


def random_unitary(n, rng):
    """Orthonormalized complex Gaussian columns (QR with the phase ambiguity removed)."""
    g = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(g)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_hermitian(n, rng, scale=1.0):
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return scale * (g + g.conj().T) / 2


def principal_angles(x, y):
    """Principal angles between column spans, largest first."""
    x = as_matrix(x)
    y = as_matrix(y)
    if x.shape[1] == 0 or y.shape[1] == 0:
        return np.zeros(0)
    return sla.subspace_angles(x, y)


def projector(basis):
    """Orthogonal projector onto the span of orthonormal columns."""
    basis = np.asarray(basis, dtype=complex)
    return basis @ basis.conj().T
