"""Metric graphs described by global boundary conditions ``A psi + B psi' = 0``.

Column order of ``A`` and ``B`` (size ``N = n + 2m``): external values
``psi_e(0)``, internal left values ``psi_i(0)``, internal right values
``psi_i(a_i)``. The derivative vector uses the same order with signs
``psi_e'(0)``, ``psi_i'(0)``, ``-psi_i'(a_i)``, so every derivative points
away from the vertex it is evaluated at.
"""
from dataclasses import dataclass

import numpy as np

from . import cmatrix as cm
from .errors import DimensionMismatch
from .tolerance import resolve


@dataclass(frozen=True, eq=False)
class MetricGraph:
    n_external: int
    internal_lengths: tuple
    bc_a: np.ndarray
    bc_b: np.ndarray

    def __post_init__(self):
        lengths = tuple(float(x) for x in self.internal_lengths)
        if any(not np.isfinite(x) or x <= 0 for x in lengths):
            raise ValueError(f"internal lengths must be positive, got {lengths}")
        if self.n_external < 0:
            raise ValueError("n_external must be non-negative")
        a = cm.as_matrix(self.bc_a, "A")
        b = cm.as_matrix(self.bc_b, "B")
        size = self.n_external + 2 * len(lengths)
        if a.shape != (size, size) or b.shape != (size, size):
            raise DimensionMismatch(
                f"A {a.shape} and B {b.shape} must both be {size}x{size}"
            )
        a.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "internal_lengths", lengths)
        object.__setattr__(self, "bc_a", a)
        object.__setattr__(self, "bc_b", b)

    @property
    def n(self):
        return self.n_external

    @property
    def m(self):
        return len(self.internal_lengths)

    @property
    def size(self):
        return self.n_external + 2 * self.m

    def __eq__(self, other):
        if not isinstance(other, MetricGraph):
            return NotImplemented
        return (
            self.n_external == other.n_external
            and self.internal_lengths == other.internal_lengths
            and np.array_equal(self.bc_a, other.bc_a)
            and np.array_equal(self.bc_b, other.bc_b)
        )

    __hash__ = None


@dataclass(frozen=True)
class PointInteraction:
    """Coupling of two half-lines: psi_2 = e^{i mu}(a psi_1 - b psi_1'), psi_2' = e^{i mu}(c psi_1 - d psi_1')."""

    a: float
    b: float
    c: float
    d: float
    mu: float = 0.0

    def __post_init__(self):
        if abs(self.a * self.d - self.b * self.c - 1.0) > 1e-12:
            raise ValueError(f"need a*d - b*c = 1, got {self.a * self.d - self.b * self.c!r}")

    @classmethod
    def delta(cls, strength):
        return cls(1.0, 0.0, float(strength), 1.0, 0.0)


@dataclass(frozen=True)
class ValidationReport:
    hermiticity_defect: float
    rank: int
    expected_rank: int
    passed: bool

    def __str__(self):
        status = "ok" if self.passed else "FAILED"
        return (f"{status}: |AB* - BA*|_max = {self.hermiticity_defect:.3e}, "
                f"rank(A,B) = {self.rank}/{self.expected_rank}")


def validate_self_adjoint(g, tol=None):
    tol = resolve(tol)
    a, b = g.bc_a, g.bc_b
    ab = a @ b.conj().T
    defect = cm.max_norm(ab - ab.conj().T)
    scale = max(1.0, cm.max_norm(a) * cm.max_norm(b))
    r = cm.rank(np.hstack([a, b]), tol) if g.size else 0
    passed = defect <= tol.hermitian * scale and r == g.size
    return ValidationReport(defect, r, g.size, passed)


def is_real_operator(g, tol=1e-8):
    """True iff Ker(A, B) and Ker(conj A, conj B) coincide."""
    ab = np.hstack([g.bc_a, g.bc_b])
    k1 = cm.kernel_basis(ab)
    k2 = cm.kernel_basis(ab.conj())
    if k1.shape[1] != k2.shape[1]:
        return False
    r12 = cm.max_norm(k2 - k1 @ (k1.conj().T @ k2))
    r21 = cm.max_norm(k1 - k2 @ (k2.conj().T @ k1))
    return max(r12, r21) <= tol


def gauge(g, c):
    """Equivalent boundary conditions (C A, C B) for invertible C."""
    c = cm.as_matrix(c)
    return MetricGraph(g.n_external, g.internal_lengths, c @ g.bc_a, c @ g.bc_b)


def conjugate(g):
    return MetricGraph(g.n_external, g.internal_lengths, g.bc_a.conj(), g.bc_b.conj())


def point_interaction_graph(p):
    e = np.exp(1j * p.mu)
    a = np.array([[-e * p.a, 1.0], [-e * p.c, 0.0]], dtype=complex)
    b = np.array([[e * p.b, 0.0], [e * p.d, 1.0]], dtype=complex)
    return MetricGraph(2, (), a, b)


def delta_graph(strength):
    return point_interaction_graph(PointInteraction.delta(strength))


def dirichlet_graph(n):
    """n decoupled half-lines with psi(0) = 0."""
    return MetricGraph(n, (), np.eye(n), np.zeros((n, n)))


def kirchhoff_star_graph(n):
    """One vertex, n external lines, continuity and zero derivative sum."""
    if n < 1:
        raise ValueError("kirchhoff_star_graph needs n >= 1")
    a = np.zeros((n, n))
    b = np.zeros((n, n))
    for j in range(n - 1):
        a[j, j] = 1.0
        a[j, j + 1] = -1.0
    b[n - 1, :] = 1.0
    return MetricGraph(n, (), a, b)


def example42_vertex(a):
    """Two Kirchhoff vertices joined by one internal line of length ``a``.

    External lines 0 and 2 sit at the vertex with psi_i(0); lines 1 and 3 at
    the vertex with psi_i(a).
    """
    am = np.zeros((6, 6))
    bm = np.zeros((6, 6))
    # columns: ext 0..3, psi_i(0) at 4, psi_i(a) at 5
    am[0, 0], am[0, 2] = 1, -1
    am[1, 0], am[1, 4] = 1, -1
    bm[2, [0, 2, 4]] = 1
    am[3, 1], am[3, 3] = 1, -1
    am[4, 1], am[4, 5] = 1, -1
    bm[5, [1, 3, 5]] = 1
    return MetricGraph(4, (a,), am, bm)


def relabel_external(g, order):
    """Graph whose external line j is external line ``order[j]`` of ``g``."""
    order = list(order)
    if sorted(order) != list(range(g.n_external)):
        raise ValueError(f"{order} is not a permutation of the external lines")
    cols = order + list(range(g.n_external, g.size))
    return MetricGraph(g.n_external, g.internal_lengths, g.bc_a[:, cols], g.bc_b[:, cols])


def example43_vertex(a):
    """The same vertex graph with the two lines of each vertex listed adjacently."""
    return relabel_external(example42_vertex(a), [0, 2, 1, 3])


def random_graph(n, m, rng, length_range=(0.5, 2.0), scale=1.0):
    """Self-adjoint graph with A a random Hermitian matrix and B = I."""
    lengths = tuple(rng.uniform(*length_range, size=m))
    size = n + 2 * m
    a = cm.random_hermitian(size, rng, scale)
    return MetricGraph(n, lengths, a, np.eye(size))


def random_vertex_graph(n, m, rng, length_range=(0.5, 2.0)):
    """Self-adjoint graph with B = I - U and A = i(I + U) for a random unitary U."""
    lengths = tuple(rng.uniform(*length_range, size=m))
    size = n + 2 * m
    u = cm.random_unitary(size, rng)
    return MetricGraph(n, lengths, 1j * (np.eye(size) + u), np.eye(size) - u)
