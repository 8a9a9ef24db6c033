from setuptools import setup

# The compiled kernels are optional: when Cython (or a compiler) is missing
# the package installs without the extension and falls back to the pure
# Python kernels at import time.
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/manymt/_speedups.pyx"], language_level=3
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
