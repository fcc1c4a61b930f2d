# cython: language_level=3
"""Compiled twin of _kernels_py; same contract, same semantics.

Coefficients stay arbitrary Python objects (exact rationals); the win is
moving the sparse dict loops out of the bytecode interpreter.
"""


def mul_terms(dict a, dict b):
    """Sparse product of two term maps; keys add, zero coefficients dropped."""
    cdef dict out = {}
    cdef object ka, va, kb, vb, k, cur
    if len(a) > len(b):
        a, b = b, a
    for ka, va in a.items():
        for kb, vb in b.items():
            k = ka + kb
            cur = out.get(k)
            if cur is None:
                out[k] = va * vb
            else:
                cur = cur + va * vb
                if cur:
                    out[k] = cur
                else:
                    del out[k]
    return out


def row_axpy(dict dst, dict src, c):
    """In-place dst -= c * src on sparse rows, dropping exact zeros."""
    cdef object k, v, cur
    for k, v in src.items():
        cur = dst.get(k)
        if cur is None:
            dst[k] = -c * v
        else:
            cur = cur - c * v
            if cur:
                dst[k] = cur
            else:
                del dst[k]


def scale_terms(dict a, c):
    """c * a as a fresh term map (c nonzero)."""
    cdef dict out = {}
    cdef object k, v
    for k, v in a.items():
        out[k] = c * v
    return out
