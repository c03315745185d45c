import os

from setuptools import setup

ext_modules = []
if os.environ.get("INSIDER_DISCLOSURE_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [Extension(
                "insider_disclosure._paths",
                ["src/insider_disclosure/_paths.pyx"],
                # keep a*b+c unfused so results match the numpy fallback
                extra_compile_args=["-O2", "-ffp-contract=off"],
            )],
            language_level=3,
        )

setup(ext_modules=ext_modules)
