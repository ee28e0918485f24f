"""Scattering matrices from the linear system Z(lambda) (S; alpha; beta) = -(A - ikB)(I; 0; 0).

On internal line j the solution is ``alpha_j e^{ikx} + beta_j e^{-ikx}``;
on external line e it is ``e^{-ikx} + S_ee e^{ikx}`` plus the outgoing
waves sent to the other lines.
"""
from dataclasses import dataclass

import numpy as np

from . import cmatrix as cm
from .errors import ExceptionalPoint, NoChannels, NotSelfAdjoint, SingularMatrix
from .graphs import conjugate, is_real_operator, validate_self_adjoint
from .tolerance import resolve


def _check_lambda(lam):
    lam = float(lam)
    if not lam > 0 or not np.isfinite(lam):
        raise ValueError(f"lambda must be positive and finite, got {lam}")
    return lam


def build_z(g, lam):
    """Z = A X(lambda) + i sqrt(lambda) B Y(lambda)."""
    lam = _check_lambda(lam)
    k = np.sqrt(lam)
    n, m = g.n_external, g.m
    size = g.size
    e = np.exp(1j * k * np.asarray(g.internal_lengths))
    x = np.zeros((size, size), dtype=complex)
    y = np.zeros((size, size), dtype=complex)
    x[:n, :n] = np.eye(n)
    y[:n, :n] = np.eye(n)
    if m:
        mid, far = slice(n, n + m), slice(n + m, size)
        x[mid, mid] = np.eye(m)
        x[mid, far] = np.eye(m)
        x[far, mid] = np.diag(e)
        x[far, far] = np.diag(1 / e)
        y[mid, mid] = np.eye(m)
        y[mid, far] = -np.eye(m)
        y[far, mid] = -np.diag(e)
        y[far, far] = np.diag(1 / e)
    return g.bc_a @ x + 1j * k * (g.bc_b @ y)


def _rhs(g, lam):
    k = np.sqrt(lam)
    return -(g.bc_a - 1j * k * g.bc_b)[:, : g.n_external]


def z_kernel_dim(g, lam, tol=None):
    return cm.kernel_basis(build_z(g, lam), tol).shape[1]


@dataclass(frozen=True)
class ScatteringResult:
    lam: float
    s: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    exceptional: bool
    kernel_dim: int
    sigma_ratio: float
    residual: float


def _solve_system(g, lam, tol):
    z = build_z(g, lam)
    rhs = _rhs(g, lam)
    sv = cm.svd(z)
    ratio = sv.sigma_min / sv.sigma_max if sv.sigma_max > 0 else 0.0
    x = None
    if ratio > tol.rank:
        try:
            x = cm.solve_linear(z, rhs)
        except SingularMatrix:
            x = None
    exceptional = x is None
    if exceptional:
        # minimum-norm least squares; the S block is unique, (alpha, beta) are not
        x = cm.pseudoinverse(z, tol) @ rhs
    kdim = int(np.count_nonzero(sv.sigma <= tol.rank * sv.sigma_max)) if exceptional else 0
    residual = cm.max_norm(z @ x - rhs)
    return x, exceptional, kdim, ratio, residual


def scattering_matrix(g, lam, tol=None, validate=True):
    tol = resolve(tol)
    lam = _check_lambda(lam)
    if g.n_external == 0:
        raise NoChannels("scattering needs at least one external line")
    if validate:
        report = validate_self_adjoint(g, tol)
        if not report.passed:
            raise NotSelfAdjoint(report)
    x, exceptional, kdim, ratio, residual = _solve_system(g, lam, tol)
    n, m = g.n_external, g.m
    return ScatteringResult(
        lam=lam,
        s=x[:n],
        alpha=x[n:n + m],
        beta=x[n + m:],
        exceptional=exceptional,
        kernel_dim=kdim,
        sigma_ratio=ratio,
        residual=residual,
    )


def smatrix(g, lam, tol=None):
    return scattering_matrix(g, lam, tol).s


@dataclass(frozen=True)
class SymmetryReport:
    conjugate_defect: float
    real: bool
    transpose_defect: float | None


def check_transposition_symmetry(g, lam, tol=None):
    """Compare S for (A, B) with the transpose of S for (conj A, conj B)."""
    s = scattering_matrix(g, lam, tol).s
    s_bar = scattering_matrix(conjugate(g), lam, tol).s
    real = is_real_operator(g)
    return SymmetryReport(
        conjugate_defect=cm.max_norm(s_bar.T - s),
        real=real,
        transpose_defect=cm.max_norm(s - s.T) if real else None,
    )


def check_alpha_beta_relations(g, lam, tol=None):
    """Max defect of alpha = conj(beta') S'^T and beta = conj(alpha') S'^T, primes for (conj A, conj B)."""
    if g.m == 0:
        return 0.0
    r = scattering_matrix(g, lam, tol)
    rb = scattering_matrix(conjugate(g), lam, tol)
    if r.exceptional or rb.exceptional:
        raise ExceptionalPoint(f"internal amplitudes are not unique at lambda = {lam}")
    st = rb.s.T
    return max(
        cm.max_norm(r.alpha - rb.beta.conj() @ st),
        cm.max_norm(r.beta - rb.alpha.conj() @ st),
    )


@dataclass(frozen=True)
class EigenvalueHit:
    lam: float
    multiplicity: int
    overlap_dim: int
    sigma_ratio: float

    def __post_init__(self):
        if not self.multiplicity >= self.overlap_dim >= 0:
            raise ValueError("need multiplicity >= overlap_dim >= 0")


def sigma_ratio(g, lam):
    s = np.linalg.svd(build_z(g, lam), compute_uv=False)
    return float(s[-1] / s[0]) if s[0] > 0 else 0.0


def overlap_dim(g, lam, edges, tol=None):
    """dim Ker Z minus the dimension of its part vanishing on the given internal edges."""
    kernel = cm.kernel_basis(build_z(g, lam), tol)
    dim = kernel.shape[1]
    if dim == 0 or not edges:
        return 0
    n, m = g.n_external, g.m
    rows = list(range(n))
    for j in edges:
        rows += [n + j, n + m + j]
    # the kernel basis is orthonormal, so an absolute cutoff is scale-free here
    sv = np.linalg.svd(kernel[rows], compute_uv=False)
    return int(np.count_nonzero(sv > 1e-6))


_INV_PHI = (np.sqrt(5.0) - 1.0) / 2.0


def golden_section(f, a, b, width):
    """Minimize a unimodal ``f`` on [a, b] until the bracket is narrower than ``width``."""
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > width:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
    return (c, fc) if fc <= fd else (d, fd)


def find_embedded_eigenvalues(g, lambda_range, grid, tol=None, overlap_edges=None, xrtol=1e-13):
    """Scan sigma_min/sigma_max of Z on a grid and refine each local minimum.

    Narrow minima falling between grid points can be missed; use a denser grid
    when eigenvalues cluster.
    """
    tol = resolve(tol)
    lo, hi = (float(v) for v in lambda_range)
    if not 0 < lo < hi:
        raise ValueError(f"need 0 < start < end, got {lambda_range}")
    if grid < 2:
        raise ValueError("grid must be at least 2")
    if g.size == 0:
        return []
    lams = np.linspace(lo, hi, grid)
    vals = np.array([sigma_ratio(g, x) for x in lams])
    hits = []
    for i in range(grid):
        left = vals[i - 1] if i > 0 else np.inf
        right = vals[i + 1] if i < grid - 1 else np.inf
        if not (vals[i] <= left and vals[i] <= right):
            continue
        a = lams[max(i - 1, 0)]
        b = lams[min(i + 1, grid - 1)]
        lam, ratio = golden_section(lambda x: sigma_ratio(g, x), a, b, xrtol * lams[i])
        lam = float(lam)
        if vals[i] < ratio:
            lam, ratio = float(lams[i]), float(vals[i])
        if ratio > tol.rank:
            continue
        if hits and abs(hits[-1].lam - lam) <= 1e-8 * lam:
            continue
        mult = z_kernel_dim(g, lam, tol)
        ov = overlap_dim(g, lam, overlap_edges, tol) if overlap_edges else 0
        hits.append(EigenvalueHit(lam, mult, min(ov, mult), ratio))
    return hits
