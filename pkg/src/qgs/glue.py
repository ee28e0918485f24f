"""Gluing graphs along external lines and the matching scattering-matrix composition.

Connecting ports ``left_ports`` of graph 1 to ``right_ports`` of graph 2 with
internal lines of lengths ``a`` gives

    S = S1' *_p V(a) S2' V(a),    V(a) = diag(e^{ika}, I),

where S1' lists the glued ports last and S2' lists them first. The composed
channels are graph 1's remaining lines followed by graph 2's.
"""
from dataclasses import dataclass

import numpy as np

from . import cmatrix as cm
from .errors import DimensionMismatch, IndexOutOfRange, NotSelfAdjoint, PortCollision
from .graphs import MetricGraph, validate_self_adjoint
from .scatter import overlap_dim, scattering_matrix, z_kernel_dim
from .starprod import StarOperands, star_detailed
from .tolerance import resolve


@dataclass(frozen=True)
class GlueSpec:
    left_ports: tuple
    right_ports: tuple
    lengths: tuple

    def __post_init__(self):
        left = tuple(int(i) for i in self.left_ports)
        right = tuple(int(i) for i in self.right_ports)
        lengths = tuple(float(x) for x in self.lengths)
        if not (len(left) == len(right) == len(lengths)) or not left:
            raise DimensionMismatch(
                f"need equally many left ports, right ports and lengths (got "
                f"{len(left)}, {len(right)}, {len(lengths)})"
            )
        if len(set(left)) != len(left) or len(set(right)) != len(right):
            raise PortCollision(f"repeated port in {left} / {right}")
        if any(b <= a for a, b in zip(left, left[1:])):
            raise PortCollision(f"left ports must be strictly increasing, got {left}")
        if any(not x > 0 for x in lengths):
            raise ValueError(f"lengths must be positive, got {lengths}")
        object.__setattr__(self, "left_ports", left)
        object.__setattr__(self, "right_ports", right)
        object.__setattr__(self, "lengths", lengths)

    @property
    def p(self):
        return len(self.left_ports)

    def check_sizes(self, n1, n2):
        if self.p > min(n1, n2):
            raise DimensionMismatch(f"cannot glue {self.p} ports of graphs with {n1}, {n2} lines")
        for ports, n in ((self.left_ports, n1), (self.right_ports, n2)):
            bad = [i for i in ports if not 0 <= i < n]
            if bad:
                raise PortCollision(f"ports {bad} out of range 0..{n - 1}")

    def kept(self, n1, n2):
        keep1 = [i for i in range(n1) if i not in self.left_ports]
        keep2 = [i for i in range(n2) if i not in self.right_ports]
        return keep1, keep2


@dataclass(frozen=True, eq=False)
class CompositionResult:
    s_composed: np.ndarray
    compatible: bool
    resonance_dim: int
    merged: MetricGraph = None
    unitarity_defect: float = 0.0
    sigma_min: float = np.inf


def glue_phase(lengths, lam, n2):
    """V(a) = diag(e^{i sqrt(lam) a_k}, I) of size n2."""
    k = np.sqrt(float(lam))
    d = np.ones(n2, dtype=complex)
    d[: len(lengths)] = np.exp(1j * k * np.asarray(lengths))
    return np.diag(d)


def compose_smatrices(s1, s2, spec, lam, tol=None):
    s1 = cm.as_matrix(s1, "s1")
    s2 = cm.as_matrix(s2, "s2")
    n1, n2 = s1.shape[0], s2.shape[0]
    spec.check_sizes(n1, n2)
    keep1, keep2 = spec.kept(n1, n2)
    order1 = keep1 + list(spec.left_ports)
    order2 = list(spec.right_ports) + keep2
    s1p = s1[np.ix_(order1, order1)]
    s2p = s2[np.ix_(order2, order2)]
    v = glue_phase(spec.lengths, lam, n2)
    res = star_detailed(StarOperands(s1p, v @ s2p @ v, spec.p), tol)
    return CompositionResult(
        s_composed=res.u,
        compatible=res.report.compatible,
        resonance_dim=res.report.resonance_dim,
        unitarity_defect=res.unitarity_defect,
        sigma_min=res.report.sigma_min,
    )


def merge_graphs(g1, g2, spec, validate=True):
    """Single graph with the glued ports turned into new internal lines (appended last).

    New line k runs from graph 1's vertex (x = 0) to graph 2's vertex (x = a_k).
    """
    n1, n2 = g1.n_external, g2.n_external
    spec.check_sizes(n1, n2)
    keep1, keep2 = spec.kept(n1, n2)
    m1, m2, p = g1.m, g2.m, spec.p
    n = len(keep1) + len(keep2)
    m = m1 + m2 + p
    size = n + 2 * m
    col1 = np.zeros(g1.size, dtype=int)
    col2 = np.zeros(g2.size, dtype=int)
    for j, i in enumerate(keep1):
        col1[i] = j
    for j, i in enumerate(keep2):
        col2[i] = len(keep1) + j
    for j in range(m1):
        col1[n1 + j] = n + j
        col1[n1 + m1 + j] = n + m + j
    for j in range(m2):
        col2[n2 + j] = n + m1 + j
        col2[n2 + m2 + j] = n + m + m1 + j
    for t, (i1, i2) in enumerate(zip(spec.left_ports, spec.right_ports)):
        # graph 2's outward derivative at its port equals -psi'(a) on the new line
        col1[i1] = n + m1 + m2 + t
        col2[i2] = n + m + m1 + m2 + t
    a = np.zeros((size, size), dtype=complex)
    b = np.zeros((size, size), dtype=complex)
    a[: g1.size, col1] = g1.bc_a
    b[: g1.size, col1] = g1.bc_b
    a[g1.size:, col2] = g2.bc_a
    b[g1.size:, col2] = g2.bc_b
    lengths = g1.internal_lengths + g2.internal_lengths + spec.lengths
    merged = MetricGraph(n, lengths, a, b)
    if validate:
        report = validate_self_adjoint(merged)
        if not report.passed:
            raise NotSelfAdjoint(report)
    return merged


def glued_edges(g1, g2, spec):
    """Internal indices of the new lines in the merged graph."""
    start = g1.m + g2.m
    return list(range(start, start + spec.p))


def compose_graphs(g1, g2, spec, lam, tol=None):
    s1 = scattering_matrix(g1, lam, tol).s
    s2 = scattering_matrix(g2, lam, tol).s
    res = compose_smatrices(s1, s2, spec, lam, tol)
    return CompositionResult(
        s_composed=res.s_composed,
        compatible=res.compatible,
        resonance_dim=res.resonance_dim,
        merged=merge_graphs(g1, g2, spec),
        unitarity_defect=res.unitarity_defect,
        sigma_min=res.sigma_min,
    )


def verify_composition(g1, g2, spec, lam, tol=None):
    """Max-norm gap between the star-composed S and the direct solve on the merged graph."""
    res = compose_graphs(g1, g2, spec, lam, tol)
    direct = scattering_matrix(res.merged, lam, tol).s
    return cm.max_norm(res.s_composed - direct)


@dataclass(frozen=True)
class MultiplicityReport:
    lam: float
    merged: int
    part1: int
    part2: int
    resonance_dim: int
    overlap_dim: int

    @property
    def holds(self):
        return self.merged == self.part1 + self.part2 + self.resonance_dim


def resonance_dim(s1, s2, spec, lam, tol=None):
    """dim Ker(I - S1'_22 V(a) S2'_11 V(a)) on the glued channels.

    Unlike the star product this also covers gluings that leave no external lines.
    """
    s1 = cm.as_matrix(s1, "s1")
    s2 = cm.as_matrix(s2, "s2")
    spec.check_sizes(s1.shape[0], s2.shape[0])
    left, right = list(spec.left_ports), list(spec.right_ports)
    ph = np.diag(np.exp(1j * np.sqrt(float(lam)) * np.asarray(spec.lengths)))
    m = np.eye(spec.p) - s1[np.ix_(left, left)] @ ph @ s2[np.ix_(right, right)] @ ph
    return cm.kernel_basis(m, tol, scale=1.0).shape[1]


def multiplicity_accounting(g1, g2, spec, lam, tol=None):
    tol = resolve(tol)
    merged = merge_graphs(g1, g2, spec)
    s1 = scattering_matrix(g1, lam, tol).s
    s2 = scattering_matrix(g2, lam, tol).s
    return MultiplicityReport(
        lam=float(lam),
        merged=z_kernel_dim(merged, lam, tol) if merged.size else 0,
        part1=z_kernel_dim(g1, lam, tol),
        part2=z_kernel_dim(g2, lam, tol),
        resonance_dim=resonance_dim(s1, s2, spec, lam, tol),
        overlap_dim=overlap_dim(merged, lam, glued_edges(g1, g2, spec), tol),
    )


def self_glue(g, port_i, port_j, length, validate=True):
    """Join external lines i and j of one graph by a new internal line (from i to j)."""
    n, m = g.n_external, g.m
    if port_i == port_j:
        raise PortCollision("cannot glue a line to itself")
    for q in (port_i, port_j):
        if not 0 <= q < n:
            raise PortCollision(f"port {q} out of range 0..{n - 1}")
    if not length > 0:
        raise ValueError("length must be positive")
    keep = [i for i in range(n) if i not in (port_i, port_j)]
    n_new, m_new = n - 2, m + 1
    col = np.zeros(g.size, dtype=int)
    for j, i in enumerate(keep):
        col[i] = j
    for j in range(m):
        col[n + j] = n_new + j
        col[n + m + j] = n_new + m_new + j
    col[port_i] = n_new + m
    col[port_j] = n_new + m_new + m
    size = n_new + 2 * m_new
    a = np.zeros((size, size), dtype=complex)
    b = np.zeros((size, size), dtype=complex)
    a[:, col] = g.bc_a
    b[:, col] = g.bc_b
    out = MetricGraph(n_new, g.internal_lengths + (float(length),), a, b)
    if validate:
        report = validate_self_adjoint(out)
        if not report.passed:
            raise NotSelfAdjoint(report)
    return out


def compose_self_glue(s, port_i, port_j, length, lam, tol=None):
    """S after joining lines i and j, via a free midpoint scatterer on a line of the given length."""
    s = cm.as_matrix(s)
    if s.shape[0] <= 2:
        raise DimensionMismatch("self-gluing through the star product needs at least 3 lines")
    mid = np.array([[0, 1], [1, 0]], dtype=complex)
    ports = sorted((port_i, port_j))
    right = (0, 1) if ports[0] == port_i else (1, 0)
    spec = GlueSpec(ports, right, (length / 2, length / 2))
    return compose_smatrices(s, mid, spec, lam, tol)


def split_tadpole(g, edge):
    """Insert a vertex with continuous value and derivative at the midpoint of an internal line.

    The line keeps its index with half the length; its second half is a new
    line appended last.
    """
    n, m = g.n_external, g.m
    if not 0 <= edge < m:
        raise IndexOutOfRange(f"edge {edge} out of range 0..{m - 1}")
    m_new = m + 1
    size = n + 2 * m_new
    col = np.zeros(g.size, dtype=int)
    col[:n] = np.arange(n)
    for j in range(m):
        col[n + j] = n + j
        col[n + m + j] = n + m_new + j
    # the old far end now belongs to the new half
    col[n + m + edge] = n + m_new + m
    a = np.zeros((size, size), dtype=complex)
    b = np.zeros((size, size), dtype=complex)
    a[: g.size, col] = g.bc_a
    b[: g.size, col] = g.bc_b
    mid_end = n + m_new + edge
    new_start = n + m
    a[g.size, mid_end], a[g.size, new_start] = 1, -1
    b[g.size + 1, mid_end], b[g.size + 1, new_start] = 1, 1
    half = g.internal_lengths[edge] / 2
    lengths = list(g.internal_lengths)
    lengths[edge] = half
    return MetricGraph(n, tuple(lengths) + (half,), a, b)
