import os

from setuptools import Extension, setup

# The compiled kernels are a drop-in twin of boolreason/_pykernels.py; the
# package works without them, so the extension is optional and any build
# failure degrades to the pure-Python backend.
ext_modules = []
if not os.environ.get("BOOLREASON_SKIP_EXT"):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "boolreason._ckernels",
                    ["src/boolreason/_ckernels.pyx"],
                    optional=True,
                )
            ],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
