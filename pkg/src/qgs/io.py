"""Graph files (JSON) and CSV output.

A graph file holds ``external`` (n), ``internal`` (list of lengths) and the
boundary matrices ``A`` and ``B`` as row-major lists of ``[re, im]`` pairs.
"""
import csv
import json

import numpy as np

from .errors import QgsError
from .graphs import MetricGraph


class GraphParseError(QgsError):
    pass


def _decode_matrix(raw, size, name):
    if not isinstance(raw, list) or len(raw) != size * size:
        raise GraphParseError(f"{name} needs {size * size} [re, im] entries")
    vals = np.empty(size * size, dtype=complex)
    for idx, item in enumerate(raw):
        if (not isinstance(item, (list, tuple)) or len(item) != 2
                or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in item)):
            raise GraphParseError(f"{name}[{idx}] is not an [re, im] pair: {item!r}")
        vals[idx] = complex(float(item[0]), float(item[1]))
    return vals.reshape(size, size)


def graph_from_dict(data):
    try:
        n = data["external"]
        lengths = data["internal"]
        raw_a, raw_b = data["A"], data["B"]
    except (KeyError, TypeError) as exc:
        raise GraphParseError(f"missing field {exc}") from exc
    if not isinstance(n, int) or isinstance(n, bool) or n < 0:
        raise GraphParseError(f"external must be a non-negative integer, got {n!r}")
    if not isinstance(lengths, list):
        raise GraphParseError("internal must be a list of lengths")
    size = n + 2 * len(lengths)
    a = _decode_matrix(raw_a, size, "A")
    b = _decode_matrix(raw_b, size, "B")
    try:
        return MetricGraph(n, tuple(float(x) for x in lengths), a, b)
    except (ValueError, TypeError) as exc:
        raise GraphParseError(str(exc)) from exc


def graph_to_dict(g):
    def enc(m):
        return [[float(z.real), float(z.imag)] for z in np.asarray(m).reshape(-1)]

    return {"external": g.n_external, "internal": list(g.internal_lengths),
            "A": enc(g.bc_a), "B": enc(g.bc_b)}


def read_graph(path):
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise GraphParseError(f"cannot read {path}: {exc}") from exc
    return graph_from_dict(data)


def write_graph(g, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(graph_to_dict(g), fh, indent=1)
        fh.write("\n")


def fmt(x):
    return "%.17g" % x


def sweep_header(n):
    cols = ["lambda"]
    for i in range(n):
        for j in range(n):
            cols += [f"s_{i}_{j}_re", f"s_{i}_{j}_im"]
    return cols + ["exceptional", "kernel_dim"]


def sweep_row(result):
    row = [fmt(result.lam)]
    for z in result.s.reshape(-1):
        row += [fmt(z.real), fmt(z.imag)]
    return row + [str(int(result.exceptional)), str(result.kernel_dim)]


def matrix_rows(m):
    """Rows ``(i, j, re, im)`` of a complex matrix."""
    m = np.asarray(m)
    return [[str(i), str(j), fmt(m[i, j].real), fmt(m[i, j].imag)]
            for i in range(m.shape[0]) for j in range(m.shape[1])]


def write_csv(stream, header, rows):
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
