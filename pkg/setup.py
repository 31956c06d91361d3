import os

from setuptools import setup

ext_modules = []
if os.environ.get("CLIQUEPART_NO_EXT") != "1":
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "cliquepart._kernels_cy",
                    ["src/cliquepart/_kernels_cy.pyx"],
                    include_dirs=[numpy.get_include()],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={
                "language_level": "3",
                "boundscheck": False,
                "wraparound": False,
                "initializedcheck": False,
            },
        )
    except ImportError:
        # pure-Python fallback kernels are used when the extension is absent
        ext_modules = []

setup(ext_modules=ext_modules)
