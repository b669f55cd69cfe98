import sys

from setuptools import Extension, setup

try:
    import numpy  # noqa: F401
    from Cython.Build import cythonize
except ImportError:  # no Cython: install the numpy kernels only
    ext_modules = []
else:
    if sys.platform.startswith("linux"):
        omp_compile, omp_link = ["-fopenmp"], ["-fopenmp"]
    else:
        omp_compile, omp_link = [], []
    ext_modules = cythonize(
        [
            Extension(
                "sphere_fourier._kernels",
                ["src/sphere_fourier/_kernels.pyx"],
                extra_compile_args=["-O3"] + omp_compile,
                extra_link_args=omp_link,
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
