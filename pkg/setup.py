"""Build script: compiles the optional C simulation kernel.

The package is fully functional without the extension (a pure-Python
kernel is selected at import time when the compiled one is missing),
so any failure to cythonize or compile degrades gracefully to a
pure-Python install.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "ptsmc._ckernel",
                ["src/ptsmc/_ckernel.pyx"],
                # Keep strict IEEE semantics: the compiled kernel must be
                # bit-identical to the pure-Python one (no -ffast-math).
                extra_compile_args=["-O2"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
