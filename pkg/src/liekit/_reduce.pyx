# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled fraction-free row reduction on int64 rows.

Raises OverflowError as soon as any intermediate leaves the int64 range; the
caller then retries with the arbitrary-precision Python kernel.
"""
from libc.stdlib cimport malloc, free
from libc.stdint cimport int64_t

cdef extern from *:
    bint mul_ovf "__builtin_mul_overflow"(int64_t a, int64_t b, int64_t *res) nogil
    bint sub_ovf "__builtin_sub_overflow"(int64_t a, int64_t b, int64_t *res) nogil


cdef inline int64_t _gcd(int64_t a, int64_t b) nogil:
    cdef int64_t t
    if a < 0:
        a = -a
    if b < 0:
        b = -b
    while b:
        t = a % b
        a = b
        b = t
    return a


cdef void _make_primitive(int64_t *row, Py_ssize_t n) nogil:
    cdef int64_t g = 0
    cdef Py_ssize_t j
    for j in range(n):
        if row[j]:
            g = _gcd(g, row[j])
            if g == 1:
                return
    if g > 1:
        for j in range(n):
            row[j] = row[j] // g


cdef int _combine(int64_t *dst, int64_t p, int64_t f, int64_t *src, Py_ssize_t n) nogil:
    # dst <- p*dst - f*src ; returns 1 on overflow
    cdef Py_ssize_t j
    cdef int64_t x, y
    for j in range(n):
        if mul_ovf(p, dst[j], &x):
            return 1
        if mul_ovf(f, src[j], &y):
            return 1
        if sub_ovf(x, y, &dst[j]):
            return 1
    return 0


def reduce_int_rows(rows, Py_ssize_t ncols):
    """Return ``(pivots, reduced)``; see ``_reduce_py.reduce_int_rows``."""
    cdef Py_ssize_t nrows = len(rows)
    cdef Py_ssize_t i, j, k, col, idx, nwork, nred
    cdef int64_t p, f
    cdef int64_t *buf
    cdef int64_t **work
    cdef int64_t **red
    cdef Py_ssize_t *redpiv
    cdef int64_t *tmp
    cdef int64_t *r
    cdef bint nonzero
    if ncols == 0 or nrows == 0:
        return [], []
    buf = <int64_t *> malloc(nrows * ncols * sizeof(int64_t))
    work = <int64_t **> malloc(nrows * sizeof(int64_t *))
    red = <int64_t **> malloc(nrows * sizeof(int64_t *))
    redpiv = <Py_ssize_t *> malloc(nrows * sizeof(Py_ssize_t))
    if not buf or not work or not red or not redpiv:
        free(buf); free(work); free(red); free(redpiv)
        raise MemoryError()
    try:
        nwork = 0
        for i in range(nrows):
            row = rows[i]
            r = buf + nwork * ncols
            nonzero = False
            for j in range(ncols):
                r[j] = row[j]  # raises OverflowError if out of range
                if r[j]:
                    nonzero = True
            if nonzero:
                _make_primitive(r, ncols)
                work[nwork] = r
                nwork += 1
        nred = 0
        for col in range(ncols):
            if nwork == 0:
                break
            idx = -1
            for i in range(nwork):
                if work[i][col]:
                    idx = i
                    break
            if idx < 0:
                continue
            tmp = work[idx]
            for i in range(idx, nwork - 1):
                work[i] = work[i + 1]
            nwork -= 1
            if tmp[col] < 0:
                for j in range(ncols):
                    tmp[j] = -tmp[j]
            p = tmp[col]
            k = 0
            for i in range(nwork):
                r = work[i]
                f = r[col]
                if f:
                    if _combine(r, p, f, tmp, ncols):
                        raise OverflowError("int64 overflow in row reduction")
                    _make_primitive(r, ncols)
                    nonzero = False
                    for j in range(ncols):
                        if r[j]:
                            nonzero = True
                            break
                    if not nonzero:
                        continue
                work[k] = r
                k += 1
            nwork = k
            for i in range(nred):
                r = red[i]
                f = r[col]
                if f:
                    if _combine(r, p, f, tmp, ncols):
                        raise OverflowError("int64 overflow in row reduction")
                    _make_primitive(r, ncols)
            red[nred] = tmp
            redpiv[nred] = col
            nred += 1
        pivots = [redpiv[i] for i in range(nred)]
        reduced = [[red[i][j] for j in range(ncols)] for i in range(nred)]
        return pivots, reduced
    finally:
        free(buf); free(work); free(red); free(redpiv)
