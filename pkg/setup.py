from setuptools import Extension, setup

# The compiled enumeration kernel is optional: without Cython (or on a
# toolchain that cannot build extensions) the package falls back to the
# pure-Python kernel in heisenspec._enum_py at import time.
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("heisenspec._enumcore", ["src/heisenspec/_enumcore.pyx"])],
        language_level=3,
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
