"""Transfer matrices for scatterers with p channels on each side.

The first p channels of S are the left side, the last p the right side.
Lambda maps left amplitudes (outgoing, incoming) to right ones and belongs to
U(p, p) with metric J = diag(I, -I).
"""
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from . import cmatrix as cm
from .errors import DegenerateTransfer, DimensionMismatch, DomainViolation, RankDeficientBlock
from .tolerance import resolve


def metric_j(p):
    return np.diag(np.r_[np.ones(p), -np.ones(p)]).astype(complex)


def _halves(m):
    m = cm.as_matrix(m)
    if m.shape[0] != m.shape[1] or m.shape[0] % 2:
        raise DimensionMismatch(f"need a 2p x 2p matrix, got {m.shape}")
    p = m.shape[0] // 2
    return p, m[:p, :p], m[:p, p:], m[p:, :p], m[p:, p:]


@dataclass(frozen=True, eq=False)
class TransferMatrix:
    p: int
    lam: np.ndarray
    degenerate: bool = False
    # orthonormal basis of Ker S12 (empty unless degenerate)
    s12_kernel: np.ndarray = None

    def j_defect(self):
        j = metric_j(self.p)
        return cm.max_norm(self.lam.conj().T @ j @ self.lam - j)

    def apply(self, vec, tol=1e-9):
        """Apply Lambda; for degenerate transfers only on the admissible subspace."""
        vec = np.asarray(vec, dtype=complex).reshape(-1)
        if vec.shape[0] != 2 * self.p:
            raise DimensionMismatch(f"vector needs {2 * self.p} entries")
        if self.degenerate and self.s12_kernel is not None and self.s12_kernel.shape[1]:
            lower = vec[self.p:]
            leak = np.linalg.norm(self.s12_kernel.conj().T @ lower)
            if leak > tol * max(1.0, np.linalg.norm(vec)):
                raise DomainViolation(
                    f"lower half has component {leak:.3e} in Ker S12; transfer undefined there"
                )
        return self.lam @ vec


def transfer_from_smatrix(s, tol=None):
    tol = resolve(tol)
    p, s11, s12, s21, s22 = _halves(s)
    sv = cm.svd(s12)
    degenerate = not sv.sigma_min > tol.rank * max(sv.sigma_max, 1.0)
    if degenerate:
        x = cm.pseudoinverse(s12, tol)
        kernel = cm.kernel_basis(s12, tol)
    else:
        x = cm.inv(s12)
        kernel = np.zeros((p, 0), dtype=complex)
    lam = np.block([[x, -x @ s11], [s22 @ x, s21 - s22 @ x @ s11]])
    return TransferMatrix(p, lam, degenerate, kernel)


def smatrix_from_transfer(t, tol=None):
    tol = resolve(tol)
    if t.degenerate:
        raise DegenerateTransfer("no scattering matrix corresponds to a degenerate transfer matrix")
    p, l11, l12, l21, l22 = _halves(t.lam)
    s = np.linalg.svd(l11, compute_uv=False)
    if not s[-1] > tol.rank * max(s[0], 1.0):
        raise DegenerateTransfer(f"Lambda_11 is singular (sigma_min = {s[-1]:.3e})")
    x = cm.inv(l11)
    return np.block([[-x @ l12, x], [l22 - l21 @ x @ l12, l21 @ x]])


def phase_matrix(lengths, lam):
    """U(a) = diag(e^{-ika}, e^{ika})."""
    k = np.sqrt(float(lam))
    e = np.exp(1j * k * np.asarray(lengths, dtype=float))
    return np.diag(np.r_[1 / e, e])


def compose_transfer(t1, t2, lengths, lam):
    """Transfer matrix of scatterer 1 followed, after lines of the given lengths, by scatterer 2."""
    if t1.degenerate or t2.degenerate:
        raise DegenerateTransfer("cannot compose degenerate transfer matrices")
    if t1.p != t2.p or len(lengths) != t1.p:
        raise DimensionMismatch("transfer matrices and lengths must share p")
    lam = t2.lam @ phase_matrix(lengths, lam) @ t1.lam
    return TransferMatrix(t1.p, lam, False, np.zeros((t1.p, 0), dtype=complex))


@dataclass(frozen=True, eq=False)
class PointTransfer:
    m_matrix: np.ndarray
    lam: np.ndarray
    t1: complex
    t2: complex
    r: complex
    l: complex

    def smatrix(self):
        return np.array([[self.l, self.t2], [self.t1, self.r]])


def point_transfer(pi, lam):
    """Closed-form transfer data of a point interaction at energy lam."""
    k = np.sqrt(float(lam))
    e = np.exp(1j * pi.mu)
    m0 = e * np.array([[pi.a, pi.b], [pi.c, pi.d]], dtype=complex)
    # the left line's derivative points away from the vertex, flipping two signs
    flip = np.diag([1.0, -1.0])
    w = np.array([[1, 1], [1j * k, -1j * k]])
    lam_m = cm.solve_linear(w, flip @ m0 @ flip @ w)
    den = pi.a - 1j * pi.b * k + 1j * pi.c / k + pi.d
    return PointTransfer(
        m_matrix=m0,
        lam=lam_m,
        t1=2 * e / den,
        t2=2 / e / den,
        r=(pi.a - 1j * pi.b * k - 1j * pi.c / k - pi.d) / den,
        l=(-pi.a - 1j * pi.b * k - 1j * pi.c / k + pi.d) / den,
    )


def block_det_identity(s, tol=None):
    """(det Lambda, det S21 / det S12) for a scattering matrix with invertible S12."""
    tol = resolve(tol)
    p, s11, s12, s21, s22 = _halves(s)
    sv = np.linalg.svd(s12, compute_uv=False)
    if not sv[-1] > tol.rank * max(sv[0], 1.0):
        raise RankDeficientBlock(f"S12 has sigma_min = {sv[-1]:.3e}")
    t = transfer_from_smatrix(s, tol)
    return cm.det(t.lam), cm.det(s21) / cm.det(s12)


def random_pseudo_unitary(p, rng, scale=0.5):
    """exp(i J H) for a random Hermitian H, an element of U(p, p)."""
    h = cm.random_hermitian(2 * p, rng, scale)
    return sla.expm(1j * metric_j(p) @ h)
