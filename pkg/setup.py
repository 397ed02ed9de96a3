import os

import numpy as np
from Cython.Build import cythonize
from setuptools import Extension, setup

# numpy ships the C implementations of its random distributions as a static
# library next to the random package; the stepping kernel links against it so
# that compiled and pure-python backends consume identical ziggurat streams.
random_lib_dir = os.path.join(os.path.dirname(np.random.__file__), "lib")

extensions = [
    Extension(
        "molrx.sim._kernel",
        ["src/molrx/sim/_kernel.pyx"],
        include_dirs=[np.get_include()],
        library_dirs=[random_lib_dir],
        libraries=["npyrandom"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=["-O3"],
    )
]

setup(ext_modules=cythonize(extensions, language_level=3))
