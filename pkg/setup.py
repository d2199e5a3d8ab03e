from setuptools import setup, Extension
from Cython.Build import cythonize

ext = Extension(
    "lwekit._core",
    ["src/lwekit/_core.py"],
    extra_compile_args=["-O2", "-ffp-contract=off"],
)

setup(ext_modules=cythonize([ext], language_level=3))
