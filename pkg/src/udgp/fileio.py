"""Plain-text readers and writers for distance lists, graphs, assignments, realizations.

Formats (all line oriented, whitespace separated)::

    UDGP <n> <m> <K>          then m lines: <value>
    DGP <n> <|E|> <K>         then |E| lines: <i> <j> <d>   (1-based, i < j)
    ASSIGN <n> <m>            then m lines: <l> <i> <j>     (1-based)
    XYZ: <n> / comment / n lines "C <x> <y> <z>"

Reals are written with 17 significant digits, so ``read(write(v)) == v``.
The XYZ comment line holds ``K=<K>``; for ``K < 3`` unused columns are 0.
"""

import os
import tempfile

import numpy as np

from .instance import Assignment, DistanceList, WeightedGraph
from .linalg import as_realization


class ParseError(ValueError):
    """Malformed input file; ``line`` is the 1-based offending line (0 if none)."""

    def __init__(self, message, line=0, path=None):
        self.message = message
        self.line = line
        self.path = path
        loc = ":".join(str(p) for p in (path, line) if p)
        super().__init__(f"{loc}: {message}" if loc else message)


def fmt(v):
    return f"{float(v):.17g}"


def atomic_write(path, text):
    """Write ``text`` to ``path`` through a temporary file and a rename."""
    path = os.fspath(path)
    folder = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=folder, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="ascii", newline="\n") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _lines(text):
    return [ln for ln in text.splitlines()]


def _int(tok, line, what):
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"expected integer {what}, got {tok!r}", line) from None


def _float(tok, line, what):
    try:
        v = float(tok)
    except ValueError:
        raise ParseError(f"expected real {what}, got {tok!r}", line) from None
    if not np.isfinite(v):
        raise ParseError(f"non-finite {what}", line)
    return v


def _header(lines, tag, count):
    if not lines:
        raise ParseError("empty file", 1)
    tok = lines[0].split()
    if len(tok) != count + 1 or tok[0] != tag:
        raise ParseError(f"header must be '{tag}' followed by {count} integers", 1)
    return [_int(t, 1, "header field") for t in tok[1:]]


def _body(lines, expected):
    body = [(k + 2, ln.split()) for k, ln in enumerate(lines[1:]) if ln.strip()]
    if len(body) != expected:
        raise ParseError(f"expected {expected} data lines, found {len(body)}", len(lines))
    return body


# distance lists

def format_distances(delta):
    rows = [f"UDGP {delta.n} {delta.m} {delta.K}"]
    rows += [fmt(v) for v in delta.values]
    return "\n".join(rows) + "\n"


def parse_distances(text):
    lines = _lines(text)
    n, m, K = _header(lines, "UDGP", 3)
    vals = []
    for ln, tok in _body(lines, m):
        if len(tok) != 1:
            raise ParseError("expected one value per line", ln)
        v = _float(tok[0], ln, "distance")
        if v <= 0:
            raise ParseError(f"distance must be positive, got {tok[0]}", ln)
        vals.append(v)
    try:
        return DistanceList(n, K, vals)
    except ValueError as e:
        raise ParseError(str(e), 1) from None


# weighted graphs

def format_graph(g):
    rows = [f"DGP {g.n} {g.num_edges} {g.K}"]
    rows += [f"{a + 1} {b + 1} {fmt(w)}" for a, b, w in g.edges()]
    return "\n".join(rows) + "\n"


def parse_graph(text):
    lines = _lines(text)
    n, e, K = _header(lines, "DGP", 3)
    ii, jj, dd = [], [], []
    seen = set()
    for ln, tok in _body(lines, e):
        if len(tok) != 3:
            raise ParseError("expected '<i> <j> <d>'", ln)
        a, b = _int(tok[0], ln, "vertex"), _int(tok[1], ln, "vertex")
        w = _float(tok[2], ln, "weight")
        if not 1 <= a < b <= n:
            raise ParseError(f"edge needs 1 <= i < j <= n, got {a} {b}", ln)
        if w <= 0:
            raise ParseError("edge weight must be positive", ln)
        if (a, b) in seen:
            raise ParseError(f"duplicate edge {a} {b}", ln)
        seen.add((a, b))
        ii.append(a - 1)
        jj.append(b - 1)
        dd.append(w)
    return WeightedGraph(n, ii, jj, dd, K)


# assignments

def format_assignment(alpha):
    rows = [f"ASSIGN {alpha.n} {alpha.m}"]
    rows += [f"{l + 1} {a + 1} {b + 1}" for l, (a, b) in enumerate(alpha.pairs.tolist())]
    return "\n".join(rows) + "\n"


def parse_assignment(text):
    lines = _lines(text)
    n, m = _header(lines, "ASSIGN", 2)
    pairs = [None] * m
    for ln, tok in _body(lines, m):
        if len(tok) != 3:
            raise ParseError("expected '<l> <i> <j>'", ln)
        l, a, b = (_int(t, ln, "index") for t in tok)
        if not 1 <= l <= m or pairs[l - 1] is not None:
            raise ParseError(f"distance index {l} out of range or repeated", ln)
        if not 1 <= a < b <= n:
            raise ParseError(f"pair needs 1 <= i < j <= n, got {a} {b}", ln)
        pairs[l - 1] = (a - 1, b - 1)
    try:
        return Assignment(n, np.array(pairs, dtype=np.int64).reshape(-1, 2))
    except ValueError as e:
        raise ParseError(str(e), 1) from None


# realizations (XYZ)

def format_xyz(x, comment=None):
    a = as_realization(x)
    n, K = a.shape
    if K > 3:
        raise ValueError("XYZ files hold at most three coordinates")
    pad = np.zeros((n, 3))
    pad[:, :K] = a
    head = f"K={K}" if comment is None else f"K={K} {comment}"
    rows = [str(n), head]
    rows += ["C " + " ".join(fmt(v) for v in row) for row in pad]
    return "\n".join(rows) + "\n"


def parse_xyz(text):
    lines = _lines(text)
    if len(lines) < 2:
        raise ParseError("XYZ needs a count line and a comment line", len(lines) + 1)
    tok = lines[0].split()
    if len(tok) != 1:
        raise ParseError("first line must be the atom count", 1)
    n = _int(tok[0], 1, "atom count")
    K = 3
    for t in lines[1].split():
        if t.startswith("K="):
            K = _int(t[2:], 2, "dimension")
    if not 1 <= K <= 3:
        raise ParseError("dimension must be 1, 2 or 3", 2)
    rows = [(k + 3, ln.split()) for k, ln in enumerate(lines[2:]) if ln.strip()]
    if len(rows) != n:
        raise ParseError(f"expected {n} atom lines, found {len(rows)}", len(lines))
    out = np.zeros((n, K))
    for r, (ln, tok) in enumerate(rows):
        if len(tok) != 4:
            raise ParseError("expected '<element> <x> <y> <z>'", ln)
        vals = [_float(t, ln, "coordinate") for t in tok[1:]]
        out[r] = vals[:K]
    return out


def _reader(parse):
    def read(path):
        with open(path, encoding="ascii") as f:
            text = f.read()
        try:
            return parse(text)
        except ParseError as e:
            raise ParseError(e.message, e.line, path=os.fspath(path)) from None

    return read


def _writer(fmt_func):
    def write(path, value, *args, **kwargs):
        atomic_write(path, fmt_func(value, *args, **kwargs))

    return write


read_distances = _reader(parse_distances)
read_graph = _reader(parse_graph)
read_assignment = _reader(parse_assignment)
read_xyz = _reader(parse_xyz)
write_distances = _writer(format_distances)
write_graph = _writer(format_graph)
write_assignment = _writer(format_assignment)
write_xyz = _writer(format_xyz)
