from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "sectnorm._speedups",
                ["src/sectnorm/_speedups.pyx"],
                extra_compile_args=["-O2"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    # pure-Python install: sectnorm.kernels falls back automatically
    ext_modules = []

setup(ext_modules=ext_modules)
