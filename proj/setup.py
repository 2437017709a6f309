from pybind11.setup_helpers import Pybind11Extension, build_ext
from setuptools import setup

CORE_SOURCES = [
    "src/colorspace.cpp",
    "src/stylestats.cpp",
    "src/imgio.cpp",
    "src/transfer.cpp",
    "src/similarity.cpp",
    "src/selection.cpp",
    "src/cli.cpp",
    "src/catalog.cpp",
    "src/index_io.cpp",
]

setup(
    ext_modules=[
        Pybind11Extension(
            "autostyle._autostyle",
            sources=["python/bindings.cpp"] + CORE_SOURCES,
            include_dirs=["include", "vendor"],
            libraries=["png", "jpeg", "z"],
            cxx_std=20,
        )
    ],
    cmdclass={"build_ext": build_ext},
)
