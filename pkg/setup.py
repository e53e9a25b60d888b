import os

from setuptools import Extension, setup

# The compiled kernel is optional: without Cython (or a compiler) the package
# falls back to the numpy implementation at import time.
ext_modules = []
if os.environ.get("ADMUI_NO_EXT", "") in ("", "0"):
    try:
        from Cython.Build import cythonize
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [Extension("admui._kernels._gis_c", ["src/admui/_kernels/_gis_c.pyx"],
                       extra_compile_args=["-O3"])],
            compiler_directives={"language_level": 3},
        )

setup(ext_modules=ext_modules)
