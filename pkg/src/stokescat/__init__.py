"""Stokes matrices of meromorphic linear systems, three independent ways."""

from .linalg import ToleranceConfig

__all__ = ["ToleranceConfig"]
__version__ = "0.1.0"
