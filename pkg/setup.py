import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # build without the compiled core; the fallback is used
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "wboot._kernels",
                ["src/wboot/_kernels.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)
