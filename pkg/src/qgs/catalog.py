"""Named built-in graphs, so standard configurations need no hand-written files."""
import numpy as np

from . import graphs as gr
from .glue import GlueSpec, merge_graphs

DEFAULT_A = 1.0
DEFAULT_B = 1.0


def example41_graph(a=DEFAULT_A, c1=1.0, c2=2.0):
    """A line with delta interactions of strengths c1, c2 at distance a."""
    spec = GlueSpec((1,), (0,), (a,))
    return merge_graphs(gr.delta_graph(c1), gr.delta_graph(c2), spec)


def example42_glue(a=DEFAULT_A, b=DEFAULT_B):
    """Parts and glue spec: two vertex graphs joined along two lines of length b."""
    v = gr.example42_vertex(a)
    return v, v, GlueSpec((2, 3), (0, 1), (b, b))


def example43_glue(a=DEFAULT_A, b=DEFAULT_B):
    v = gr.example43_vertex(a)
    return v, v, GlueSpec((2, 3), (0, 1), (b, b))


def _floats(arg, count, name):
    parts = [p for p in arg.split(",") if p.strip()]
    if len(parts) != count:
        raise ValueError(f"{name} expects {count} comma-separated numbers, got {arg!r}")
    return [float(p) for p in parts]


def builtin_names():
    return ["example41", "example42", "example42-merged", "example43", "example43-merged",
            "delta:c", "pointint:a,b,c,d,mu", "kirchhoff:n", "dirichlet:n"]


def builtin(name, a=None, b=None):
    """Resolve a built-in graph by name; ``a`` and ``b`` set line lengths where used."""
    a = DEFAULT_A if a is None else float(a)
    b = DEFAULT_B if b is None else float(b)
    head, _, arg = name.partition(":")
    if head == "example41":
        return example41_graph(a)
    if head == "example42":
        return gr.example42_vertex(a)
    if head == "example43":
        return gr.example43_vertex(a)
    if head == "example42-merged":
        return merge_graphs(*example42_glue(a, b))
    if head == "example43-merged":
        return merge_graphs(*example43_glue(a, b))
    if head == "delta":
        return gr.delta_graph(_floats(arg, 1, "delta")[0])
    if head == "pointint":
        pa, pb, pc, pd, mu = _floats(arg, 5, "pointint")
        return gr.point_interaction_graph(gr.PointInteraction(pa, pb, pc, pd, mu))
    if head == "kirchhoff":
        return gr.kirchhoff_star_graph(int(arg))
    if head == "dirichlet":
        return gr.dirichlet_graph(int(arg))
    raise KeyError(f"unknown built-in graph {name!r}; known: {', '.join(builtin_names())}")


def example42_smatrix(a, lam):
    """Closed-form S of the four-channel vertex graph, lines ordered so 0, 2 share a vertex."""
    k = np.sqrt(lam)
    e = np.exp(1j * k * a)
    ei = 1 / e
    p = e + 3 * ei
    q = 2 * (e - 3 * ei)
    return np.array([[p, -4, q, -4], [-4, p, -4, q], [q, -4, p, -4], [-4, q, -4, p]]) / (e - 9 * ei)


def example43_smatrix(a, lam):
    order = [0, 2, 1, 3]
    return example42_smatrix(a, lam)[np.ix_(order, order)]


def two_port_chain(s1, s2, a, lam):
    """Closed-form composition of two 2x2 scatterers joined by a line of length a."""
    ph = np.exp(1j * np.sqrt(lam) * a)
    den = 1 - s1[1, 1] * s2[0, 0] * ph ** 2
    return np.array([
        [s1[0, 0] + s1[0, 1] * s2[0, 0] * s1[1, 0] * ph ** 2 / den, s1[0, 1] * s2[0, 1] * ph / den],
        [s2[1, 0] * s1[1, 0] * ph / den, s2[1, 1] + s1[1, 1] * s2[1, 0] * s2[0, 1] * ph ** 2 / den],
    ])
