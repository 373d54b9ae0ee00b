from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # no Cython: the pure-Python kernels take over at import
    ext_modules = []
else:
    ext_modules = cythonize(
        [Extension("planarlab._kernels", ["src/planarlab/_kernels.pyx"], extra_compile_args=["-O3"])],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
