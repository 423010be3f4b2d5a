"""Build script for the optional compiled core.

The package works without the extension (a pure-numpy twin of every
routine lives in detclust._core_py), so a failed compile only costs
speed.  `pip install -e . --no-build-isolation` builds it in place.
"""

import numpy as np
from setuptools import Extension, setup
from Cython.Build import cythonize

extensions = [
    Extension(
        "detclust._core",
        ["src/detclust/_core.pyx"],
        include_dirs=[np.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
]

setup(ext_modules=cythonize(extensions, language_level=3))
