"""Pure-Python fraction-free row reduction over the integers.

Same contract as the compiled ``_reduce`` module; used when the extension is
not built or when a matrix overflows 64-bit intermediates.
"""
from math import gcd


def _primitive(row):
    g = 0
    for v in row:
        if v:
            g = gcd(g, v)
            if g == 1:
                return row
    if g > 1:
        return [v // g for v in row]
    return row


def reduce_int_rows(rows, ncols):
    """Return ``(pivots, reduced)`` for an integer matrix.

    ``reduced`` holds one primitive integer row per pivot, with positive pivot
    entry and zeros in every other pivot column, so dividing each row by its
    pivot entry gives the reduced row echelon form. Pivot search takes the
    first nonzero column and the smallest row index.
    """
    work = [_primitive(list(r)) for r in rows if any(r)]
    pivots = []
    reduced = []
    for col in range(ncols):
        if not work:
            break
        idx = -1
        for i, r in enumerate(work):
            if r[col]:
                idx = i
                break
        if idx < 0:
            continue
        prow = work.pop(idx)
        if prow[col] < 0:
            prow = [-v for v in prow]
        p = prow[col]
        nxt = []
        for r in work:
            f = r[col]
            if f:
                r = _primitive([p * a - f * b for a, b in zip(r, prow)])
                if not any(r):
                    continue
            nxt.append(r)
        work = nxt
        for k, r in enumerate(reduced):
            f = r[col]
            if f:
                r = _primitive([p * a - f * b for a, b in zip(r, prow)])
                if r[pivots[k]] < 0:
                    r = [-v for v in r]
                reduced[k] = r
        pivots.append(col)
        reduced.append(prow)
    return pivots, reduced
