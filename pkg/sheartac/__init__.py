"""Sim-to-real tactile images with shear, pose/shear estimation and servoing."""


__version__ = "0.1.0"
