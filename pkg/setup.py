import os
import sys

from setuptools import Extension, setup

# The compiled kernels are an optional speedup; the package falls back to the
# pure-Python implementations in hsmcast._kernels.pure when they are absent.
# Set HSMCAST_NO_EXT=1 to skip the extension build entirely.
ext_modules = []
if not os.environ.get("HSMCAST_NO_EXT"):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [Extension("hsmcast._kernels._fast", ["src/hsmcast/_kernels/_fast.pyx"])],
            language_level=3,
        )
    except ImportError:
        print("Cython unavailable, building without compiled kernels", file=sys.stderr)

setup(ext_modules=ext_modules)
