"""Build script.

The transient integrator has a Cython hot loop (synthrot._kernel).  If
Cython or a C compiler is unavailable the build still succeeds and the
package falls back to the pure-python kernel at import time.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    import numpy as np
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "synthrot._kernel",
                ["src/synthrot/_kernel.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level="3",
    )
except Exception:
    ext_modules = []

setup(ext_modules=ext_modules)
