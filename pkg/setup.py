"""Build script for the optional compiled kernels.

The package is fully functional without the extension: ``expanse.kernels``
falls back to numpy implementations when ``expanse.kernels._speedups`` is
missing.  Build in place with

    python setup.py build_ext --inplace

or let ``pip install -e . --no-build-isolation`` compile it.
"""

from setuptools import Extension, setup

extensions = []
try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "expanse.kernels._speedups",
                ["src/expanse/kernels/_speedups.pyx"],
                # -ffp-contract=off: the pure and compiled paths must agree
                # bit for bit on the few float ops they share
                extra_compile_args=["-O2", "-ffp-contract=off"],
            )
        ],
        compiler_directives={
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
            "language_level": 3,
        },
    )
except ImportError:
    pass

setup(ext_modules=extensions)
