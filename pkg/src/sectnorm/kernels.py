"""Kernel backend selection: compiled extension when built, pure Python otherwise."""

try:
    from ._speedups import mul_terms, row_axpy, scale_terms

    KERNEL_BACKEND = "compiled"
except ImportError:
    from ._kernels_py import mul_terms, row_axpy, scale_terms

    KERNEL_BACKEND = "python"

__all__ = ["mul_terms", "row_axpy", "scale_terms", "KERNEL_BACKEND"]
