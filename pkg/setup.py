import os

from setuptools import Extension, setup

# The compiled kernels are optional: the package falls back to the pure-Python
# twin at import time. CARRIERALLOC_PURE=1 skips the extension entirely.
# -ffp-contract=off keeps the C results bit-identical to the Python fallback
# (no fused multiply-add contraction).
ext_modules = []
if os.environ.get("CARRIERALLOC_PURE") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "carrieralloc._kernels",
                    ["src/carrieralloc/_kernels.pyx"],
                    extra_compile_args=["-O2", "-ffp-contract=off"],
                )
            ],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
