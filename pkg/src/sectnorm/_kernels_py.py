"""Pure-Python implementations of the hot sparse-arithmetic kernels.

Terms and rows are dicts mapping packed exponent keys (or column ids) to
nonzero exact rationals.  The compiled twin in _speedups.pyx implements
the same contract; sectnorm.kernels picks one at import time.
"""


def mul_terms(a: dict, b: dict) -> dict:
    """Sparse product of two term maps; keys add, zero coefficients dropped."""
    if len(a) > len(b):
        a, b = b, a
    out = {}
    get = out.get
    for ka, va in a.items():
        for kb, vb in b.items():
            k = ka + kb
            c = get(k)
            if c is None:
                out[k] = va * vb
            else:
                c = c + va * vb
                if c:
                    out[k] = c
                else:
                    del out[k]
    return out


def row_axpy(dst: dict, src: dict, c) -> None:
    """In-place dst -= c * src on sparse rows, dropping exact zeros."""
    get = dst.get
    for k, v in src.items():
        cur = get(k)
        if cur is None:
            dst[k] = -c * v
        else:
            cur = cur - c * v
            if cur:
                dst[k] = cur
            else:
                del dst[k]


def scale_terms(a: dict, c) -> dict:
    """c * a as a fresh term map (c nonzero)."""
    return {k: c * v for k, v in a.items()}
