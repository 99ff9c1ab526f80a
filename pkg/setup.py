import numpy
from setuptools import Extension, setup
from Cython.Build import cythonize

# -ffp-contract=off keeps the compiled kernels bit-identical to the pure
# Python fallback (no fused multiply-add contraction).
setup(ext_modules=cythonize(
    [Extension(
        "gwexplore._core.speedups",
        ["src/gwexplore/_core/speedups.pyx"],
        extra_compile_args=["-O3", "-ffp-contract=off"],
        include_dirs=[numpy.get_include()],
    )],
    language_level=3,
))
