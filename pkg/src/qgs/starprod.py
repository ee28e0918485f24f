"""Generalized star product of unitary matrices.

``U1 *_V U2`` contracts the trailing ``p`` channels of ``U1`` against the
leading ``p`` channels of ``U2`` through the ``p x p`` unitary ``V``. When
``I - V U1_22 V* U2_11`` is singular (a resonance) the resolvents ``K1``,
``K2`` are replaced by inverses restricted to the orthogonal complement of
the kernel; the outer factors annihilate the kernel so the product stays
well defined and unitary.
"""
import warnings
from dataclasses import dataclass

import numpy as np

from . import cmatrix as cm
from .errors import DimensionMismatch, IllConditionedWarning, RankDeficientBlock
from .tolerance import resolve


def _blocks(u, k):
    """Split ``u`` with a leading block of size ``k``."""
    return u[:k, :k], u[:k, k:], u[k:, :k], u[k:, k:]


@dataclass(frozen=True, eq=False)
class StarOperands:
    u1: np.ndarray
    u2: np.ndarray
    p: int
    v: np.ndarray = None
    check: bool = True

    def __post_init__(self):
        u1 = cm.as_matrix(self.u1, "u1")
        u2 = cm.as_matrix(self.u2, "u2")
        p = int(self.p)
        n1, n2 = u1.shape[0], u2.shape[0]
        if u1.shape != (n1, n1) or u2.shape != (n2, n2):
            raise DimensionMismatch("star operands must be square")
        if not (1 <= p <= min(n1, n2) and 2 * p < n1 + n2):
            raise DimensionMismatch(f"invalid overlap p = {p} for sizes {n1}, {n2}")
        v = np.eye(p, dtype=complex) if self.v is None else cm.as_matrix(self.v, "v")
        if v.shape != (p, p):
            raise DimensionMismatch(f"v must be {p}x{p}, got {v.shape}")
        if self.check:
            limit = resolve(None).unitary
            for name, mat in (("u1", u1), ("u2", u2), ("v", v)):
                d = cm.unitarity_defect(mat)
                if d > limit:
                    raise ValueError(f"{name} is not unitary (defect {d:.3e})")
        object.__setattr__(self, "u1", u1)
        object.__setattr__(self, "u2", u2)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "v", v)

    @property
    def n1(self):
        return self.u1.shape[0]

    @property
    def n2(self):
        return self.u2.shape[0]

    def blocks1(self):
        return _blocks(self.u1, self.n1 - self.p)

    def blocks2(self):
        return _blocks(self.u2, self.p)


@dataclass(frozen=True, eq=False)
class CompatibilityReport:
    compatible: bool
    c_basis: np.ndarray
    b_basis: np.ndarray
    c_tilde_basis: np.ndarray
    b_tilde_basis: np.ndarray
    k1: np.ndarray
    k2: np.ndarray
    sigma_min: float
    restricted_sigma_min: float

    @property
    def resonance_dim(self):
        return self.c_basis.shape[1]


def _restricted_inverse(t, kernel):
    """Invert ``t`` on the complement of ``kernel`` and extend by zero.

    Returns the inverse and the smallest singular value of the restriction.
    """
    q = cm.complement_basis(kernel, t.shape[0])
    if q.shape[1] == 0:
        return np.zeros_like(t), np.inf
    r = q.conj().T @ t @ q
    smin = float(np.linalg.svd(r, compute_uv=False)[-1])
    return q @ cm.inv(r) @ q.conj().T, smin


def analyze_compatibility(ops, tol=None):
    tol = resolve(tol)
    p, v = ops.p, ops.v
    vh = v.conj().T
    a22 = ops.blocks1()[3]
    b11 = ops.blocks2()[0]
    eye = np.eye(p, dtype=complex)
    m_c = eye - v @ a22 @ vh @ b11
    m_b = eye - vh @ b11 @ v @ a22
    c = cm.kernel_basis(m_c, tol, scale=1.0)
    b = cm.kernel_basis(m_b, tol, scale=1.0)
    c_t = cm.kernel_basis(eye - a22 @ vh @ b11 @ v, tol, scale=1.0)
    b_t = cm.kernel_basis(eye - b11 @ v @ a22 @ vh, tol, scale=1.0)
    inv_c, s_c = _restricted_inverse(m_c, c)
    inv_b, s_b = _restricted_inverse(m_b, b)
    return CompatibilityReport(
        compatible=c.shape[1] == 0 and b.shape[1] == 0,
        c_basis=c,
        b_basis=b,
        c_tilde_basis=c_t,
        b_tilde_basis=b_t,
        k1=inv_c @ v,
        k2=inv_b @ vh,
        sigma_min=float(np.linalg.svd(m_c, compute_uv=False)[-1]),
        restricted_sigma_min=min(s_c, s_b),
    )


def _assemble(ops, k1, k2):
    a11, a12, a21, a22 = ops.blocks1()
    b11, b12, b21, b22 = ops.blocks2()
    v = ops.v
    vh = v.conj().T
    u11 = a11 + a12 @ k2 @ b11 @ v @ a21
    u12 = a12 @ k2 @ b12
    u21 = b21 @ k1 @ a21
    u22 = b22 + b21 @ k1 @ a22 @ vh @ b12
    return np.block([[u11, u12], [u21, u22]])


@dataclass(frozen=True, eq=False)
class StarResult:
    u: np.ndarray
    report: CompatibilityReport
    ill_conditioned: bool
    unitarity_defect: float


def star_detailed(ops, tol=None):
    tol = resolve(tol)
    report = analyze_compatibility(ops, tol)
    u = _assemble(ops, report.k1, report.k2)
    ill = report.compatible and report.sigma_min < tol.ill_conditioned
    if ill:
        warnings.warn(
            f"star product nearly non-compatible: sigma_min = {report.sigma_min:.3e}",
            IllConditionedWarning,
            stacklevel=3,
        )
    return StarResult(u, report, ill, cm.unitarity_defect(u))


def star(u1, u2, p, v=None, tol=None, check=True):
    """U1 *_V U2 (V = I when omitted)."""
    return star_detailed(StarOperands(u1, u2, p, v, check), tol).u


def star_unit(p):
    """The unit [[0, I], [I, 0]] of size 2p."""
    if p < 1:
        raise ValueError("p must be at least 1")
    eye = np.eye(p, dtype=complex)
    zero = np.zeros((p, p), dtype=complex)
    return np.block([[zero, eye], [eye, zero]])


def star_inverse(u, tol=None):
    """The unique unitary U' with U' *_p U = U *_p U' = E for a 2p x 2p unitary U."""
    tol = resolve(tol)
    u = cm.as_matrix(u, "u")
    if u.shape[0] != u.shape[1] or u.shape[0] % 2:
        raise DimensionMismatch(f"star_inverse needs a 2p x 2p matrix, got {u.shape}")
    p = u.shape[0] // 2
    u11, u12, u21, u22 = _blocks(u, p)
    for name, blk in (("U12", u12), ("U21", u21)):
        s = np.linalg.svd(blk, compute_uv=False)
        if s[-1] <= tol.rank * max(s[0], 1.0):
            raise RankDeficientBlock(f"{name} has sigma_min = {s[-1]:.3e}")
    eye = np.eye(p, dtype=complex)
    u12_inv = cm.inv(u12)
    d_inv = cm.inv(u21 - u22 @ u12_inv @ u11)
    w11 = -u12_inv @ u11 @ d_inv
    w12 = u12_inv + u12_inv @ u11 @ d_inv @ u22 @ u12_inv
    w21 = d_inv
    w22 = -d_inv @ cm.inv(eye - u22 @ w11) @ u22 @ w12
    return np.block([[w11, w12], [w21, w22]])


def tau(u, k):
    """Swap the diagonal and off-diagonal blocks of ``u`` split at leading size ``k``."""
    u = cm.as_matrix(u)
    u11, u12, u21, u22 = _blocks(u, k)
    return np.block([[u22, u21], [u12, u11]])


def check_transposition_law(u1, u2, p, v=None, tol=None):
    """Max defect of (U1 *_V U2)^tau = U2^tau *_{V*} U1^tau."""
    n1, n2 = len(u1), len(u2)
    v = np.eye(p, dtype=complex) if v is None else cm.as_matrix(v)
    lhs = tau(star(u1, u2, p, v, tol), n1 - p)
    rhs = star(tau(u2, p), tau(u1, n1 - p), p, v.conj().T, tol)
    return cm.max_norm(lhs - rhs)


def check_associativity(u1, u2, u3, v, v_prime, p, p_prime, tol=None):
    """Max defect between (U1 *_V U2) *_V' U3 and U1 *_V (U2 *_V' U3).

    The first product uses U2's leading p channels and the second its
    trailing p' channels, so both bracketings exist only when p + p' <= n2.
    """
    n2, n3 = len(u2), len(u3)
    if p + p_prime > n2 or p_prime > n3:
        raise DimensionMismatch(
            f"need p + p' <= n2 and p' <= n3 (p={p}, p'={p_prime}, n2={n2}, n3={n3})"
        )
    left = star(star(u1, u2, p, v, tol), u3, p_prime, v_prime, tol)
    right = star(u1, star(u2, u3, p_prime, v_prime, tol), p, v, tol)
    return cm.max_norm(left - right)


def check_continuity(u1, u2, u3, v, p, tol=None):
    """Ratio |U1 *_V U2 - U1 *_V U3| / |U2 - U3| in the max norm (0 when U2 = U3)."""
    den = cm.max_norm(np.asarray(u2) - np.asarray(u3))
    if den == 0.0:
        return 0.0
    num = cm.max_norm(star(u1, u2, p, v, tol) - star(u1, u3, p, v, tol))
    return num / den


def lemma_annihilation_defects(ops, report=None):
    """Residuals of U2_21 c, U1_12 b, U1_21* c~ and U2_12* b~ over the kernel bases."""
    report = report or analyze_compatibility(ops)
    a12, a21 = ops.blocks1()[1:3]
    b12, b21 = ops.blocks2()[1:3]

    def res(mat, basis):
        return cm.max_norm(mat @ basis) if basis.shape[1] else 0.0

    return (
        res(b21, report.c_basis),
        res(a12, report.b_basis),
        res(a21.conj().T, report.c_tilde_basis),
        res(b12.conj().T, report.b_tilde_basis),
    )


def k_identity_defects(ops, report=None):
    """Residuals of the six fixed-point identities satisfied by K1 and K2."""
    report = report or analyze_compatibility(ops)
    k1, k2 = report.k1, report.k2
    v = ops.v
    vh = v.conj().T
    a22 = ops.blocks1()[3]
    b11 = ops.blocks2()[0]
    checks = (
        k1 - (v + v @ a22 @ vh @ b11 @ k1),
        k1 - (v + v @ a22 @ k2 @ b11 @ v),
        k1 - (v + k1 @ a22 @ vh @ b11 @ v),
        k2 - (vh + vh @ b11 @ v @ a22 @ k2),
        k2 - (vh + vh @ b11 @ k1 @ a22 @ vh),
        k2 - (vh + k2 @ b11 @ v @ a22 @ vh),
    )
    return tuple(cm.max_norm(c) for c in checks)
