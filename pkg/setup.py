"""Build script: compiles the optional switching-check extension when Cython
and a C compiler are available, and falls back to the pure-Python kernel
otherwise.  `python setup.py build_ext --inplace` enables the fast kernel for
a source checkout."""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/smcnets/_drfast.pyx"],
        language_level=3,
        compiler_directives={"boundscheck": False, "wraparound": False},
    )
except Exception:
    ext_modules = []

setup(ext_modules=ext_modules)
