from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "preflight.kernels._speedups",
                ["src/preflight/kernels/_speedups.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": 3},
    )

# The compiled module is optional: preflight.kernels falls back to the
# pure-Python twin when the extension is missing.
setup(ext_modules=ext_modules)
