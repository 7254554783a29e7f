import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("REIDKIT_SKIP_NATIVE") != "1":
    try:
        import numpy as np
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "reidkit.kernels._native",
                    ["src/reidkit/kernels/_native.pyx"],
                    include_dirs=[np.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            compiler_directives={
                "language_level": 3,
                "boundscheck": False,
                "wraparound": False,
                "cdivision": True,
            },
        )
    except Exception as exc:  # the package runs fine on the numpy fallback
        print(f"warning: compiled kernels unavailable, installing pure-python build ({exc})")
        ext_modules = []

setup(ext_modules=ext_modules)
