"""Swap the kernel backend under the modules that bound it at import time."""

from contextlib import contextmanager

import sectnorm.normed_space as _ns
import sectnorm.section_algebra as _sa


@contextmanager
def patch_backend(impl):
    saved = (_ns.row_axpy, _sa.mul_terms, _sa.scale_terms)
    _ns.row_axpy = impl.row_axpy
    _sa.mul_terms = impl.mul_terms
    _sa.scale_terms = impl.scale_terms
    try:
        yield
    finally:
        _ns.row_axpy, _sa.mul_terms, _sa.scale_terms = saved
