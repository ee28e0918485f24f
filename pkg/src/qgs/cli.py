"""Command-line interface: ``qgs {smatrix,compose,eigs,transfer,verify}``.

Exit codes: 0 ok, 2 parse error, 3 not self-adjoint, 4 numeric failure,
5 port error.
"""
import argparse
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import catalog
from . import cmatrix as cm
from . import io as qio
from .errors import (DimensionMismatch, NotSelfAdjoint, PortCollision, QgsError)
from .glue import GlueSpec, compose_graphs, verify_composition
from .graphs import validate_self_adjoint
from .scatter import find_embedded_eigenvalues, scattering_matrix
from .transfer import transfer_from_smatrix
from .verify import SUITES, run_suites

EXIT_OK, EXIT_PARSE, EXIT_SELF_ADJOINT, EXIT_NUMERIC, EXIT_PORTS = 0, 2, 3, 4, 5


class CliError(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def load_graph(ref, a=None, b=None):
    """A graph from a JSON file, or a built-in when ``ref`` starts with ``builtin:``."""
    if ref.startswith("builtin:"):
        try:
            g = catalog.builtin(ref[len("builtin:"):], a, b)
        except (KeyError, ValueError) as exc:
            raise CliError(EXIT_PARSE, str(exc)) from exc
    else:
        try:
            g = qio.read_graph(ref)
        except qio.GraphParseError as exc:
            raise CliError(EXIT_PARSE, str(exc)) from exc
    report = validate_self_adjoint(g)
    if not report.passed:
        raise CliError(EXIT_SELF_ADJOINT, f"{ref}: boundary conditions are not self-adjoint ({report})")
    return g


def _graph_arg(args, attr="graph"):
    ref = getattr(args, attr)
    if getattr(args, "builtin", None):
        if ref:
            raise CliError(EXIT_PARSE, "give either a graph file or --builtin, not both")
        ref = "builtin:" + args.builtin
    if not ref:
        raise CliError(EXIT_PARSE, "no graph given")
    return load_graph(ref, getattr(args, "a", None), getattr(args, "b", None))


def lambda_grid(args):
    lo = args.lambda_min if args.lam is None else args.lam
    if lo is None:
        raise CliError(EXIT_PARSE, "need --lambda or --lambda-min")
    if args.grid < 1:
        raise CliError(EXIT_PARSE, "grid must be at least 1")
    if not lo > 0:
        raise CliError(EXIT_PARSE, "lambda must be positive")
    if args.grid == 1:
        return np.array([lo])
    hi = args.lambda_max
    if hi is None or not hi > lo:
        raise CliError(EXIT_PARSE, "need 0 < --lambda-min < --lambda-max for grid > 1")
    return np.linspace(lo, hi, args.grid)


def _open_out(path):
    if path in (None, "-"):
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline=""), True


def cmd_smatrix(args):
    g = _graph_arg(args)
    lams = lambda_grid(args)
    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
        # map keeps grid order whatever the completion order
        results = list(pool.map(lambda x: scattering_matrix(g, x), lams))
    out, close = _open_out(args.out)
    try:
        qio.write_csv(out, qio.sweep_header(g.n_external), [qio.sweep_row(r) for r in results])
    finally:
        if close:
            out.close()
    return EXIT_OK


def parse_ports(text):
    pairs = []
    for item in text.split(","):
        left, sep, right = item.strip().partition(":")
        if not sep:
            raise CliError(EXIT_PORTS, f"port pair {item!r} is not of the form L:R")
        try:
            pairs.append((int(left), int(right)))
        except ValueError as exc:
            raise CliError(EXIT_PORTS, f"port pair {item!r} is not integer") from exc
    return pairs


def parse_floats(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise CliError(EXIT_PARSE, f"bad number list {text!r}") from exc


def cmd_compose(args):
    g1 = load_graph(args.graph1, args.a, args.b)
    g2 = load_graph(args.graph2, args.a, args.b)
    pairs = sorted(parse_ports(args.ports))
    lengths = parse_floats(args.lengths)
    if len(pairs) != len(lengths):
        raise CliError(EXIT_PORTS, f"{len(pairs)} port pairs but {len(lengths)} lengths")
    try:
        spec = GlueSpec([l for l, _ in pairs], [r for _, r in pairs], lengths)
        res = compose_graphs(g1, g2, spec, args.lam)
    except (PortCollision, DimensionMismatch) as exc:
        raise CliError(EXIT_PORTS, str(exc)) from exc
    qio.write_csv(sys.stdout, ["row", "col", "re", "im"], qio.matrix_rows(res.s_composed))
    print(f"compatible={str(res.compatible).lower()}")
    print(f"resonance_dim={res.resonance_dim}")
    print(f"unitarity_defect={res.unitarity_defect:.3e}")
    if args.verify:
        print(f"oracle_defect={verify_composition(g1, g2, spec, args.lam):.3e}")
    return EXIT_OK


def cmd_eigs(args):
    g = _graph_arg(args)
    if not 0 < args.lambda_min < args.lambda_max:
        raise CliError(EXIT_PARSE, "need 0 < --lambda-min < --lambda-max")
    edges = parse_ints(args.overlap_edges) if args.overlap_edges else None
    hits = find_embedded_eigenvalues(g, (args.lambda_min, args.lambda_max), args.grid,
                                     overlap_edges=edges)
    rows = [[qio.fmt(h.lam), str(h.multiplicity), str(h.overlap_dim), qio.fmt(h.sigma_ratio)]
            for h in hits]
    qio.write_csv(sys.stdout, ["lambda", "multiplicity", "overlap_dim", "sigma_ratio"], rows)
    return EXIT_OK


def parse_ints(text):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise CliError(EXIT_PARSE, f"bad integer list {text!r}") from exc


def cmd_transfer(args):
    g = _graph_arg(args)
    if g.n_external % 2:
        raise CliError(EXIT_NUMERIC, "transfer matrices need an even number of external lines")
    t = transfer_from_smatrix(scattering_matrix(g, args.lam).s)
    qio.write_csv(sys.stdout, ["row", "col", "re", "im"], qio.matrix_rows(t.lam))
    print(f"degenerate={str(t.degenerate).lower()}")
    print(f"j_defect={t.j_defect():.3e}")
    print(f"det={qio.fmt(cm.det(t.lam).real)},{qio.fmt(cm.det(t.lam).imag)}")
    return EXIT_OK


def cmd_verify(args):
    names = list(SUITES) if args.suite == "all" else [args.suite]
    results = run_suites(names, seed=args.seed)
    for r in results:
        print(r.line())
    return EXIT_OK if all(r.passed for r in results) else EXIT_NUMERIC


def _add_lengths(p):
    p.add_argument("--a", type=float, default=None, help="length a for built-in graphs")
    p.add_argument("--b", type=float, default=None, help="length b for built-in graphs")


def build_parser():
    parser = argparse.ArgumentParser(prog="qgs", description="Scattering on quantum graphs.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("smatrix", help="S(lambda) over a grid, as CSV")
    p.add_argument("graph", nargs="?", help="graph JSON file or builtin:NAME")
    p.add_argument("--builtin", help="built-in graph name, e.g. example42 or delta:2")
    p.add_argument("--lambda", dest="lam", type=float, help="single energy (same as grid 1)")
    p.add_argument("--lambda-min", type=float)
    p.add_argument("--lambda-max", type=float)
    p.add_argument("--grid", type=int, default=1)
    p.add_argument("--out", help="output path (default stdout)")
    p.add_argument("--jobs", type=int, default=1, help="worker threads for the grid")
    _add_lengths(p)
    p.set_defaults(func=cmd_smatrix)

    p = sub.add_parser("compose", help="glue two graphs and compose their S-matrices")
    p.add_argument("graph1")
    p.add_argument("graph2")
    p.add_argument("--ports", required=True, help="comma-separated L:R port pairs")
    p.add_argument("--lengths", required=True, help="comma-separated line lengths")
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--verify", action="store_true", help="compare with the merged-graph solve")
    _add_lengths(p)
    p.set_defaults(func=cmd_compose)

    p = sub.add_parser("eigs", help="embedded eigenvalues in a range")
    p.add_argument("graph", nargs="?")
    p.add_argument("--builtin")
    p.add_argument("--lambda-min", type=float, required=True)
    p.add_argument("--lambda-max", type=float, required=True)
    p.add_argument("--grid", type=int, default=400)
    p.add_argument("--overlap-edges", help="internal edge indices for overlap_dim")
    _add_lengths(p)
    p.set_defaults(func=cmd_eigs)

    p = sub.add_parser("transfer", help="transfer matrix of a 2p-channel graph")
    p.add_argument("graph", nargs="?")
    p.add_argument("--builtin")
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    _add_lengths(p)
    p.set_defaults(func=cmd_transfer)

    p = sub.add_parser("verify", help="run randomized property suites")
    p.add_argument("--suite", choices=sorted(SUITES) + ["all"], default="all")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except CliError as exc:
        print(f"qgs: error: {exc}", file=sys.stderr)
        return exc.code
    except NotSelfAdjoint as exc:
        print(f"qgs: error: {exc}", file=sys.stderr)
        return EXIT_SELF_ADJOINT
    except (PortCollision,) as exc:
        print(f"qgs: error: {exc}", file=sys.stderr)
        return EXIT_PORTS
    except (QgsError, ValueError, np.linalg.LinAlgError) as exc:
        print(f"qgs: error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
