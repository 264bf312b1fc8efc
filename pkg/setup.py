from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("edsketch._ckernel", ["src/edsketch/_ckernel.pyx"])],
        language_level=3,
    )
except ImportError:
    # Pure-Python fallback still works without the compiled kernel.
    ext_modules = []

setup(ext_modules=ext_modules)
