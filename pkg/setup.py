import numpy as np
from Cython.Build import cythonize
from setuptools import Extension, setup

ext = Extension(
    "shorttm._kernels",
    ["src/shorttm/_kernels.pyx"],
    include_dirs=[np.get_include()],
    # no contraction into FMA: keeps results identical to the Python fallback
    extra_compile_args=["-O2", "-ffp-contract=off"],
)

setup(ext_modules=cythonize([ext], language_level=3))
