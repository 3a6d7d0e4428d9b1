#!/usr/bin/env python
from setuptools import setup, find_packages
import sheartac


if __name__ == "__main__":
    with open("README.md", "r") as f:
        long_description = f.read()
    setup(name="sheartac",
          version=sheartac.__version__,
          author="The sheartac developers",
          maintainer="The sheartac developers",
          description="Sim-to-real translation of tactile images with shear "
                      "and tactile servoing with the translated estimators.",
          long_description=long_description,
          long_description_content_type="text/markdown",
          classifiers=[
              "Programming Language :: Python :: 3",
              "License :: OSI Approved :: BSD License",
              "Operating System :: OS Independent",
              "Topic :: Scientific/Engineering :: Artificial Intelligence",
              "Topic :: Scientific/Engineering :: Image Processing",
          ],
          license="BSD-3-Clause",
          packages=find_packages(),
          package_data={"sheartac": ["test/data/*.png"]},
          scripts=["bin/sheartac"],
          entry_points={
              "console_scripts": ["sheartac=sheartac.cli:main"],
          },
          install_requires=["numpy>=1.18", "scipy", "pytransform3d",
                            "matplotlib", "numba", "torch>=1.13",
                            "scikit-image", "opencv-python-headless",
                            "PyYAML", "tqdm", "tabulate"],
          extras_require={
              "test": ["pytest", "pytest-cov"],
              "doc": ["sphinx", "numpydoc"],
          })
