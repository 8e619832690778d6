import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("KL_ANALYZER_NO_EXT"):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "kl_analyzer.numerics._core",
                    ["src/kl_analyzer/numerics/_core.pyx"],
                    extra_compile_args=["-O2"],
                )
            ],
            language_level=3,
        )
    except ImportError:
        # Pure-Python kernels are selected at import when the extension
        # is missing, so a cython-less build is still functional.
        ext_modules = []

setup(ext_modules=ext_modules)
