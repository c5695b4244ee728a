import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("DILEMMA_NO_EXT", "") in ("", "0"):
    try:
        import numpy as np
        from Cython.Build import cythonize
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [
                Extension(
                    "dilemma.kernels._ckernels",
                    ["src/dilemma/kernels/_ckernels.pyx"],
                    include_dirs=[np.get_include()],
                    # keep a*b+c unfused so results match the Python fallback bit for bit
                    extra_compile_args=["-O2", "-ffp-contract=off"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
