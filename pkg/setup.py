"""Build hook for the optional compiled kernel extension.

The package works without the extension (a numpy fallback is selected at
import time), so any failure here should not block installation.
"""

from setuptools import Extension, setup

extensions = []
try:
    import numpy
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "opband._core._kernels",
                ["src/opband/_core/_kernels.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        language_level="3",
    )
except ImportError:
    pass

setup(ext_modules=extensions)
