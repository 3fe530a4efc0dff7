import numpy as np
from Cython.Build import cythonize
from setuptools import Extension, setup

extensions = [
    Extension(
        "qsi._kernels",
        ["src/qsi/_kernels.pyx"],
        include_dirs=[np.get_include()],
        extra_compile_args=["-O3", "-fno-math-errno"],
        optional=True,
    )
]

setup(ext_modules=cythonize(extensions, compiler_directives={"language_level": "3"}))
