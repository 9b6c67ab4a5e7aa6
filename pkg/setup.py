"""Build script: compiles the fuzzy inference hot kernel when Cython is available.

The package works without the extension (a numpy fallback is selected at
import time), so a failed or skipped compile is not fatal to installation.
Build with plain `pip install .` or, for development,
`pip install -e . --no-build-isolation`.
"""

from setuptools import setup

ext_modules = []
try:
    import numpy as np
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "oculus.fuzzy._kernels",
                ["src/oculus/fuzzy/_kernels.pyx"],
                include_dirs=[np.get_include()],
                # -ffp-contract=off keeps scalar math bit-compatible with the
                # numpy fallback (no FMA contraction surprises).
                extra_compile_args=["-O3", "-ffp-contract=off"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
