"""Build hook: compile the optional Cython oracle kernel when possible.

The package works without the extension (wsrpt._backend falls back to the
pure-Python kernel), so any failure here is non-fatal by design.
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/wsrpt/_kernel.pyx"],
        language_level=3,
    )
except Exception as exc:  # pragma: no cover - depends on build host
    print(f"wsrpt: skipping compiled kernel ({exc!r}); pure-Python fallback will be used")

setup(ext_modules=ext_modules)
