"""File formats: edge-list and adjacency-matrix graphs, dataset CSV, model
JSON, and file fingerprints.

Graph files are auto-detected by extension: ``.edges`` is the text edge list
(first non-comment line holds the node count, then one ``i j`` pair per
line, ``#`` starts a comment), ``.csv`` is a D x D adjacency matrix of 0/1
with entry (r, c) = 1 meaning r -> c.  Dataset CSVs are comma-separated
real columns with an optional ``x0,...`` header row.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

from .errors import ParseError
from .graph import Dag, build_dag
from .synth import LinearScm


def sha256_file(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _int_token(token: str, path, line: int, column: int | None = None) -> int:
    try:
        return int(token)
    except ValueError:
        raise ParseError(f"expected an integer, got {token!r}",
                         path=path, line=line, column=column) from None


def read_edge_list(path) -> Dag:
    lines = Path(path).read_text().splitlines()
    num_nodes = None
    edges = []
    for lineno, raw in enumerate(lines, start=1):
        text = raw.split("#", 1)[0].strip()
        if not text:
            continue
        tokens = text.split()
        if num_nodes is None:
            if len(tokens) != 1:
                raise ParseError("first line must hold the node count alone",
                                 path=path, line=lineno)
            num_nodes = _int_token(tokens[0], path, lineno)
            continue
        if len(tokens) != 2:
            raise ParseError(f"expected 'i j', got {text!r}", path=path, line=lineno)
        i = _int_token(tokens[0], path, lineno, column=1)
        j = _int_token(tokens[1], path, lineno, column=2)
        edges.append((i, j))
    if num_nodes is None:
        raise ParseError("empty graph file", path=path, line=1)
    return build_dag(num_nodes, edges)


def read_adjacency_csv(path) -> Dag:
    lines = [ln for ln in Path(path).read_text().splitlines() if ln.strip()]
    if not lines:
        raise ParseError("empty graph file", path=path, line=1)
    rows = []
    for lineno, raw in enumerate(lines, start=1):
        entries = []
        for colno, token in enumerate(raw.split(","), start=1):
            value = _int_token(token.strip(), path, lineno, column=colno)
            if value not in (0, 1):
                raise ParseError(f"adjacency entries must be 0 or 1, got {value}",
                                 path=path, line=lineno, column=colno)
            entries.append(value)
        rows.append(entries)
    d = len(rows)
    for lineno, row in enumerate(rows, start=1):
        if len(row) != d:
            raise ParseError(f"row has {len(row)} entries, expected {d}",
                             path=path, line=lineno)
    edges = [(r, c) for r in range(d) for c in range(d) if rows[r][c] == 1]
    return build_dag(d, edges)


def read_graph(path) -> Dag:
    suffix = Path(path).suffix.lower()
    if suffix == ".edges":
        return read_edge_list(path)
    if suffix == ".csv":
        return read_adjacency_csv(path)
    raise ParseError(f"unknown graph extension {suffix!r} (use .edges or .csv)",
                     path=path)


def write_edge_list(g: Dag, path) -> None:
    lines = [str(g.num_nodes)]
    lines += [f"{i} {j}" for i, j in sorted(g.edges)]
    Path(path).write_text("\n".join(lines) + "\n")


def read_dataset(path) -> np.ndarray:
    lines = Path(path).read_text().splitlines()
    rows = []
    width = None
    start_line = 0
    for lineno, raw in enumerate(lines, start=1):
        if not raw.strip():
            continue
        tokens = [t.strip() for t in raw.split(",")]
        if not rows and width is None:
            try:
                [float(t) for t in tokens]
            except ValueError:
                start_line = lineno  # header row
                width = len(tokens)
                continue
            width = len(tokens)
        if len(tokens) != width:
            raise ParseError(f"row has {len(tokens)} columns, expected {width}",
                             path=path, line=lineno)
        try:
            rows.append([float(t) for t in tokens])
        except ValueError:
            bad = next(k for k, t in enumerate(tokens, start=1)
                       if not _is_float(t))
            raise ParseError("expected a real number",
                             path=path, line=lineno, column=bad) from None
    if not rows:
        raise ParseError("no data rows found", path=path, line=start_line or 1)
    return np.asarray(rows, dtype=float)


def _is_float(token: str) -> bool:
    try:
        float(token)
        return True
    except ValueError:
        return False


def write_dataset(data: np.ndarray, path, header: bool = True) -> None:
    arr = np.asarray(data, dtype=float)
    names = ",".join(f"x{d}" for d in range(arr.shape[1]))
    # %.17g keeps the round-trip bit-exact for float64.
    np.savetxt(path, arr, fmt="%.17g", delimiter=",",
               header=names if header else "", comments="")


def write_scm_json(scm: LinearScm, path) -> None:
    Path(path).write_text(json.dumps(scm.to_dict(), indent=2, sort_keys=True) + "\n")


def read_scm_json(path) -> LinearScm:
    try:
        payload = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", path=path, line=exc.lineno,
                         column=exc.colno) from None
    return LinearScm.from_dict(payload)
