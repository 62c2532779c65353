"""Export to the LP text format read by most MILP solvers.

Layout::

    \\ comment
    Minimize
     obj: 3 x0 - 2 x1 + 0 constant_offset
    Subject To
     r0: x0 + x1 <= 1
    Bounds
     0 <= x0 <= 1
     x2 free
    General
     x3
    Binaries
     x0
    End

Only ``+``/``-`` separated terms are written, at most a few per line. The
objective offset, which the format cannot express, is reported in a comment.
Variable names are sanitized to ``[A-Za-z0-9_.]``.
"""

import re

import numpy as np

from ..fileio import atomic_write, fmt

_BAD = re.compile(r"[^A-Za-z0-9_.]")
_PER_LINE = 8


def _names(model):
    out, seen = [], set()
    for j in range(model.num_vars):
        s = _BAD.sub("_", model.name(j))
        if not s or s[0].isdigit() or s[0] == ".":
            s = "v" + s
        while s in seen:
            s += "_"
        seen.add(s)
        out.append(s)
    return out


def _expr(idx, vals, names):
    if len(idx) == 0:
        return ["0 " + names[0]] if names else ["0"]
    terms = []
    for k, (j, v) in enumerate(zip(idx, vals)):
        sign = "-" if v < 0 else ("+" if k else "")
        a = abs(v)
        coef = "" if a == 1.0 else fmt(a) + " "
        terms.append(f"{sign} {coef}{names[j]}".strip())
    return [" ".join(terms[i:i + _PER_LINE]) for i in range(0, len(terms), _PER_LINE)]


def format_lp(model):
    names = _names(model)
    out = [f"\\ {model.num_vars} variables, {model.num_rows} rows"]
    if model.offset:
        out.append(f"\\ objective offset {fmt(model.offset)}")
    out.append("Minimize")
    nz = np.flatnonzero(model.c)
    lines = _expr(nz, model.c[nz], names)
    out.append(" obj: " + lines[0])
    out += ["   " + ln for ln in lines[1:]]
    out.append("Subject To")
    A = model.A
    for r in range(model.num_rows):
        sl = slice(A.indptr[r], A.indptr[r + 1])
        lines = _expr(A.indices[sl], A.data[sl], names)
        lines[-1] += f" {'=' if model.sense[r] == '==' else model.sense[r]} {fmt(model.rhs[r])}"
        out.append(f" r{r}: " + lines[0])
        out += ["   " + ln for ln in lines[1:]]
    out.append("Bounds")
    binary = model.integer & (model.lb == 0) & (model.ub == 1)
    for j in range(model.num_vars):
        if binary[j]:
            continue
        lo, hi = model.lb[j], model.ub[j]
        if np.isinf(lo) and np.isinf(hi):
            out.append(f" {names[j]} free")
        elif lo == hi:
            out.append(f" {names[j]} = {fmt(lo)}")
        else:
            left = "-inf" if np.isinf(lo) else fmt(lo)
            right = "+inf" if np.isinf(hi) else fmt(hi)
            out.append(f" {left} <= {names[j]} <= {right}")
    general = np.flatnonzero(model.integer & ~binary)
    if general.size:
        out.append("General")
        out += [" " + names[j] for j in general]
    if binary.any():
        out.append("Binaries")
        out += [" " + names[j] for j in np.flatnonzero(binary)]
    out.append("End")
    return "\n".join(out) + "\n"


def write_lp(model, path):
    atomic_write(path, format_lp(model))
