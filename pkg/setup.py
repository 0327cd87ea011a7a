import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "ctfminer._kernels.core_cy",
                ["src/ctfminer/_kernels/core_cy.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    # Pure-Python fallback in ctfminer._kernels is used when the
    # compiled module is absent, so the package still works.
    extensions = []

setup(ext_modules=extensions)
