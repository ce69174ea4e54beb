from setuptools import Extension, setup

# The compiled CSR kernel is optional: without Cython (or a C compiler) the
# package falls back to the numpy implementation selected in latflow.backend.
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "latflow._ckernels",
                ["src/latflow/_ckernels.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
