"""Build script for the optional Cython kernels.

    pip install -e . --no-build-isolation

If Cython or a compiler is unavailable the package still installs and
``eegconn.kernels`` falls back to the NumPy implementation.
"""
import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("EEGCONN_NO_EXT"):
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        args = ["-O3"]
        if not os.environ.get("EEGCONN_PORTABLE"):
            args.append("-march=native")
        ext_modules = cythonize(
            [
                Extension(
                    "eegconn._kernels",
                    ["src/eegconn/_kernels.pyx"],
                    extra_compile_args=args,
                )
            ],
            compiler_directives={
                "boundscheck": False,
                "wraparound": False,
                "cdivision": True,
                "language_level": "3",
            },
        )

setup(ext_modules=ext_modules)
