"""Randomized property suites shared by the CLI ``verify`` command."""
from dataclasses import dataclass

import numpy as np

from . import cmatrix as cm
from . import graphs as gr
from . import starprod as sp
from . import transfer as tr
from .glue import GlueSpec, compose_smatrices, verify_composition
from .scatter import check_transposition_symmetry, smatrix


@dataclass(frozen=True)
class SuiteResult:
    name: str
    max_defect: float
    threshold: float
    cases: int

    @property
    def passed(self):
        return self.max_defect <= self.threshold

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return (f"{self.name}: {status} max_defect={self.max_defect:.3e} "
                f"threshold={self.threshold:.0e} cases={self.cases}")


def suite_unitarity(rng, count=50):
    worst = 0.0
    for _ in range(count):
        g = gr.random_graph(int(rng.integers(1, 5)), int(rng.integers(0, 3)), rng)
        for lam in (0.3, 1.0, 7.7):
            worst = max(worst, cm.unitarity_defect(smatrix(g, lam)))
    return SuiteResult("unitarity", worst, 1e-8, count * 3)


def suite_star(rng, count=20):
    worst = 0.0
    for _ in range(count):
        u = cm.random_unitary(4, rng)
        e = sp.star_unit(1)
        worst = max(worst, cm.max_norm(sp.star(e, u, 1) - u), cm.max_norm(sp.star(u, e, 1) - u))
        u1, u2, u3 = (cm.random_unitary(n, rng) for n in (3, 4, 3))
        v, w = cm.random_unitary(1, rng), cm.random_unitary(2, rng)
        worst = max(worst, sp.check_associativity(u1, u2, u3, v, w, 1, 2))
        worst = max(worst, sp.check_transposition_law(u1, u2, 2, cm.random_unitary(2, rng)))
        x = cm.random_unitary(4, rng)
        xi = sp.star_inverse(x)
        unit = sp.star_unit(2)
        worst = max(worst, cm.max_norm(sp.star(x, xi, 2) - unit), cm.max_norm(sp.star(xi, x, 2) - unit))
    return SuiteResult("star", worst, 1e-8, count)


def suite_compose(rng, count=20):
    worst = 0.0
    for _ in range(count):
        n1, n2 = int(rng.integers(2, 5)), int(rng.integers(2, 5))
        p = int(rng.integers(1, min(2, n1, n2) + 1))
        if 2 * p >= n1 + n2:
            p = 1
        g1 = gr.random_graph(n1, int(rng.integers(0, 2)), rng)
        g2 = gr.random_graph(n2, int(rng.integers(0, 2)), rng)
        left = tuple(sorted(rng.choice(n1, p, replace=False).tolist()))
        right = tuple(rng.choice(n2, p, replace=False).tolist())
        spec = GlueSpec(left, right, tuple(rng.uniform(0.5, 2.0, p)))
        worst = max(worst, verify_composition(g1, g2, spec, float(rng.uniform(0.3, 8.0))))
    return SuiteResult("compose", worst, 1e-7, count)


def suite_transfer(rng, count=20):
    worst = 0.0
    for _ in range(count):
        s1, s2 = cm.random_unitary(4, rng), cm.random_unitary(4, rng)
        lam = float(rng.uniform(0.3, 8.0))
        lengths = rng.uniform(0.5, 2.0, 2)
        t1, t2 = tr.transfer_from_smatrix(s1), tr.transfer_from_smatrix(s2)
        worst = max(worst, t1.j_defect(), cm.max_norm(tr.smatrix_from_transfer(t1) - s1))
        composed = compose_smatrices(s1, s2, GlueSpec((2, 3), (0, 1), lengths), lam).s_composed
        direct = tr.transfer_from_smatrix(composed).lam
        worst = max(worst, cm.max_norm(direct - tr.compose_transfer(t1, t2, lengths, lam).lam))
        lhs, rhs = tr.block_det_identity(s1)
        worst = max(worst, abs(lhs - rhs) / max(abs(rhs), 1e-300))
    return SuiteResult("transfer", worst, 1e-7, count)


def suite_symmetry(rng, count=20):
    worst = 0.0
    for _ in range(count):
        g = gr.random_graph(int(rng.integers(1, 4)), int(rng.integers(0, 3)), rng)
        worst = max(worst, check_transposition_symmetry(g, float(rng.uniform(0.3, 8.0))).conjugate_defect)
    return SuiteResult("symmetry", worst, 1e-9, count)


SUITES = {
    "unitarity": suite_unitarity,
    "star": suite_star,
    "compose": suite_compose,
    "transfer": suite_transfer,
    "symmetry": suite_symmetry,
}


def run_suites(names, seed=0):
    rng = np.random.default_rng(seed)
    return [SUITES[name](rng) for name in names]
