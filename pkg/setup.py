"""Build script: compiles the optional kernel extension when Cython is available.

The package is fully functional without the extension; a numpy fallback is
selected at import time.  Set SCATKIT_PURE_PYTHON=1 to skip compilation.
"""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("SCATKIT_PURE_PYTHON") != "1":
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "scatkit.kernels._fast",
                    ["src/scatkit/kernels/_fast.pyx"],
                    include_dirs=[numpy.get_include()],
                    extra_compile_args=["-O3"],
                )
            ],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
