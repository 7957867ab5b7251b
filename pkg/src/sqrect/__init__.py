"""Optimal weight functions, squared rectangles and the skinny cut function."""

from .kernels import BACKEND
from .grid import GridComplex, build_complex, rectangle, subdivide, subdivide_binary

__version__ = "0.1.0"

__all__ = ["BACKEND", "GridComplex", "build_complex", "rectangle", "subdivide", "subdivide_binary"]
