import numpy
from Cython.Build import cythonize
from setuptools import Extension, setup

ext = Extension(
    "phonodiverge._speedups",
    ["src/phonodiverge/_speedups.pyx"],
    include_dirs=[numpy.get_include()],
    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
)
# Build failures are non-fatal: the package falls back to the pure numpy
# kernels at import time.
ext.optional = True

setup(ext_modules=cythonize([ext], language_level=3))
