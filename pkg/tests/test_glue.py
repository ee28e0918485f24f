import numpy as np
import pytest

from qgs import cmatrix as cm
from qgs import glue
from qgs import graphs as gr
from qgs.catalog import example41_graph, example42_glue, example43_glue, two_port_chain
from qgs.errors import DimensionMismatch, IndexOutOfRange, PortCollision
from qgs.scatter import find_embedded_eigenvalues, scattering_matrix, smatrix
from qgs.starprod import star_unit


def test_glue_spec_validation():
    with pytest.raises(DimensionMismatch):
        glue.GlueSpec((0, 1), (0,), (1.0, 1.0))
    with pytest.raises(PortCollision):
        glue.GlueSpec((0, 0), (0, 1), (1.0, 1.0))
    with pytest.raises(PortCollision):
        glue.GlueSpec((1, 0), (0, 1), (1.0, 1.0))
    with pytest.raises(ValueError):
        glue.GlueSpec((0,), (0,), (0.0,))
    spec = glue.GlueSpec((3,), (0,), (1.0,))
    with pytest.raises(PortCollision):
        spec.check_sizes(2, 2)
    with pytest.raises(DimensionMismatch):
        glue.GlueSpec((0, 1, 2), (0, 1, 2), (1, 1, 1)).check_sizes(3, 2)


def test_free_scatterers_compose_to_phase():
    lam = 1.7
    free = star_unit(1)
    res = glue.compose_smatrices(free, free, glue.GlueSpec((1,), (0,), (1.0,)), lam)
    ph = np.exp(1j * np.sqrt(lam))
    assert cm.max_norm(res.s_composed - np.array([[0, ph], [ph, 0]])) <= 1e-14
    assert res.compatible and res.resonance_dim == 0


def test_port_order_is_respected(rng):
    g1, g2 = gr.random_graph(3, 1, rng), gr.random_graph(3, 0, rng)
    for left, right in [((0, 2), (2, 1)), ((1, 2), (0, 2)), ((0,), (1,))]:
        spec = glue.GlueSpec(left, right, tuple(rng.uniform(0.5, 2, len(left))))
        assert glue.verify_composition(g1, g2, spec, 2.2) <= 1e-9


def test_example41_closed_form_and_oracle(rng):
    a = 1.3
    g1, g2 = gr.delta_graph(1.0), gr.delta_graph(2.0)
    spec = glue.GlueSpec((1,), (0,), (a,))
    merged = example41_graph(a)
    for lam in rng.uniform(0.2, 10.0, 10):
        s1, s2 = smatrix(g1, lam), smatrix(g2, lam)
        composed = glue.compose_smatrices(s1, s2, spec, lam).s_composed
        assert cm.max_norm(composed - two_port_chain(s1, s2, a, lam)) <= 1e-12
        assert cm.max_norm(composed - smatrix(merged, lam)) <= 1e-8


def test_example42_composition_off_and_at_resonance():
    g1, g2, spec = example42_glue(np.pi, np.pi)
    for lam in (0.7, 2.5, 6.1):
        assert glue.verify_composition(g1, g2, spec, lam) <= 1e-8
    for lam in (1.0, 4.0, 9.0):
        res = glue.compose_graphs(g1, g2, spec, lam)
        assert not res.compatible and res.resonance_dim == 1
        assert res.unitarity_defect <= 1e-8
        assert glue.verify_composition(g1, g2, spec, lam) <= 1e-6


def test_merge_structure_and_validity():
    g1, g2, spec = example42_glue(1.0, 2.0)
    merged = glue.merge_graphs(g1, g2, spec)
    assert merged.n_external == 4 and merged.m == 4
    assert merged.internal_lengths == (1.0, 1.0, 2.0, 2.0)
    assert gr.validate_self_adjoint(merged).passed
    assert glue.glued_edges(g1, g2, spec) == [2, 3]
    assert gr.is_real_operator(merged)


def test_merge_free_lines_and_neumann_interval():
    free = gr.kirchhoff_star_graph(2)
    line = glue.merge_graphs(free, free, glue.GlueSpec((1,), (0,), (0.8,)))
    lam = 3.3
    ph = np.exp(1j * np.sqrt(lam) * 0.8)
    assert cm.max_norm(smatrix(line, lam) - np.array([[0, ph], [ph, 0]])) <= 1e-12
    neumann = gr.MetricGraph(1, (), np.zeros((1, 1)), np.eye(1))
    interval = glue.merge_graphs(neumann, neumann, glue.GlueSpec((0,), (0,), (1.0,)))
    assert interval.n_external == 0 and interval.m == 1
    hits = find_embedded_eigenvalues(interval, (1.0, 45.0), 300)
    assert [h.lam for h in hits] == pytest.approx([np.pi ** 2, 4 * np.pi ** 2], abs=1e-6)


def test_merge_preserves_non_real():
    g = gr.point_interaction_graph(gr.PointInteraction(1, 0, 1, 1, 0.5))
    merged = glue.merge_graphs(g, gr.delta_graph(1.0), glue.GlueSpec((1,), (0,), (1.0,)))
    assert not gr.is_real_operator(merged)


def test_multiplicity_accounting():
    g1, g2, spec = example42_glue(np.pi, np.pi)
    rep = glue.multiplicity_accounting(g1, g2, spec, 4.0)
    assert rep.holds and rep.part1 == rep.part2 == 0 and rep.resonance_dim >= 1
    assert rep.overlap_dim == rep.resonance_dim
    g1, g2, spec = example43_glue(1.0, np.pi)
    rep = glue.multiplicity_accounting(g1, g2, spec, 1.0)
    assert rep.holds and rep.part1 == rep.part2 == 0 and rep.merged == 1
    rep = glue.multiplicity_accounting(g1, g2, spec, 2.2)
    assert rep.holds and (rep.merged, rep.resonance_dim, rep.overlap_dim) == (0, 0, 0)


def test_resonance_matches_overlapping_eigenvalues(rng):
    for g1, g2, spec in (example42_glue(np.pi, np.pi), example43_glue(1.0, np.pi)):
        merged = glue.merge_graphs(g1, g2, spec)
        edges = glue.glued_edges(g1, g2, spec)
        hits = find_embedded_eigenvalues(merged, (0.5, 10.0), 300, overlap_edges=edges)
        for h in hits:
            res = glue.compose_graphs(g1, g2, spec, h.lam)
            assert res.resonance_dim > 0 and h.overlap_dim > 0
        for lam in rng.uniform(0.5, 10.0, 10):
            assert glue.compose_graphs(g1, g2, spec, lam).resonance_dim == 0


def test_part_eigenvalues_count_in_merged_graph():
    # a free line plus a decoupled Dirichlet interval of length 1 (eigenvalue pi^2)
    a = np.zeros((4, 4))
    b = np.zeros((4, 4))
    a[0, 0], a[0, 1] = 1, -1
    b[1, 0], b[1, 1] = 1, 1
    a[2, 2] = a[3, 3] = 1
    part = gr.MetricGraph(2, (1.0,), a, b)
    assert gr.validate_self_adjoint(part).passed
    spec = glue.GlueSpec((1,), (0,), (0.7,))
    rep = glue.multiplicity_accounting(part, part, spec, np.pi ** 2)
    assert (rep.part1, rep.part2, rep.resonance_dim) == (1, 1, 0)
    assert rep.holds and rep.merged == 2 and rep.overlap_dim == 0


def test_resonance_without_remaining_lines():
    # two Neumann half-line ends joined: the interval has eigenvalues (j pi / a)^2
    neumann = gr.MetricGraph(1, (), np.zeros((1, 1)), np.eye(1))
    spec = glue.GlueSpec((0,), (0,), (1.0,))
    rep = glue.multiplicity_accounting(neumann, neumann, spec, np.pi ** 2)
    assert rep.holds and rep.merged == 1 and rep.resonance_dim == 1 and rep.overlap_dim == 1


def test_gluing_to_free_scatterer_with_short_lines(rng):
    s = cm.random_unitary(4, rng)
    res = glue.compose_smatrices(star_unit(2), s, glue.GlueSpec((2, 3), (0, 1), (1e-8, 1e-8)), 2.0)
    assert cm.max_norm(res.s_composed - s) <= 1e-7


def test_self_glue_matches_star_route(rng):
    for _ in range(5):
        g = gr.random_graph(4, 1, rng)
        i, j = rng.choice(4, 2, replace=False)
        lam = float(rng.uniform(0.3, 6))
        direct = smatrix(glue.self_glue(g, int(i), int(j), 1.1), lam)
        via_star = glue.compose_self_glue(smatrix(g, lam), int(i), int(j), 1.1, lam).s_composed
        assert cm.max_norm(direct - via_star) <= 1e-9
    with pytest.raises(PortCollision):
        glue.self_glue(gr.random_graph(3, 0, rng), 1, 1, 1.0)


def test_split_tadpole_examples(rng):
    g = gr.example42_vertex(1.4)
    once = glue.split_tadpole(g, 0)
    twice = glue.split_tadpole(once, 1)
    assert once.internal_lengths == (0.7, 0.7) and twice.m == 3
    for lam in rng.uniform(0.2, 12.0, 5):
        assert cm.max_norm(smatrix(once, lam) - smatrix(g, lam)) <= 1e-9
        assert cm.max_norm(smatrix(twice, lam) - smatrix(g, lam)) <= 1e-9
    with pytest.raises(IndexOutOfRange):
        glue.split_tadpole(g, 1)


def test_split_single_loop():
    # one vertex with an external line and a loop: Kirchhoff over all three ends
    a = np.array([[1, -1, 0], [1, 0, -1], [0, 0, 0]], dtype=float)
    b = np.array([[0, 0, 0], [0, 0, 0], [1, 1, 1]], dtype=float)
    tadpole = gr.MetricGraph(1, (2.0,), a, b)
    split = glue.split_tadpole(tadpole, 0)
    assert split.m == 2 and gr.validate_self_adjoint(split).passed
    r = scattering_matrix(split, 1.3)
    assert cm.unitarity_defect(r.s) <= 1e-10
    assert cm.max_norm(r.s - smatrix(tadpole, 1.3)) <= 1e-10
