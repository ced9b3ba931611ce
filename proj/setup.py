"""Builds the pybind11 extension by driving the project's CMake tree."""

import glob
import os
import shutil
import subprocess
from pathlib import Path

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class CMakeExtension(Extension):
    def __init__(self, name):
        super().__init__(name, sources=[])


class CMakeBuild(build_ext):
    def build_extension(self, ext):
        source_dir = Path(__file__).parent.resolve()
        build_temp = Path(self.build_temp).resolve() / ext.name
        build_temp.mkdir(parents=True, exist_ok=True)

        subprocess.run(
            [
                "cmake",
                "-S", str(source_dir),
                "-B", str(build_temp),
                "-DCMAKE_BUILD_TYPE=Release",
                "-DAGESIM_BUILD_CLI=OFF",
                "-DAGESIM_BUILD_TESTS=OFF",
                "-DAGESIM_BUILD_PYTHON=ON",
            ],
            check=True,
        )
        subprocess.run(
            [
                "cmake",
                "--build", str(build_temp),
                "--target", "agesim_py",
                "-j", str(os.cpu_count() or 1),
            ],
            check=True,
        )

        built = glob.glob(str(build_temp / "python" / "agesim" / "_core*"))
        if not built:
            raise RuntimeError("CMake did not produce the _core module")
        ext_dir = Path(self.get_ext_fullpath(ext.name)).parent.resolve()
        ext_dir.mkdir(parents=True, exist_ok=True)
        for path in built:
            if path.endswith((".so", ".pyd", ".dylib")):
                shutil.copy2(path, ext_dir / Path(path).name)


setup(
    ext_modules=[CMakeExtension("agesim._core")],
    cmdclass={"build_ext": CMakeBuild},
)
