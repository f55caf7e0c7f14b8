import os

from setuptools import Extension, setup


def _extensions():
    if os.environ.get("MRCPSP_EDA_NO_EXT"):
        return []
    try:
        import numpy as np
        from Cython.Build import cythonize
    except ImportError:
        # pure-Python fallback is selected at import time
        return []
    ext = Extension(
        "mrcpsp_eda._sgs_ext",
        ["src/mrcpsp_eda/_sgs_ext.pyx"],
        include_dirs=[np.get_include()],
        extra_compile_args=["-O3"],
    )
    return cythonize(
        [ext],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )


setup(ext_modules=_extensions())
