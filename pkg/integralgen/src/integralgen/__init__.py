"""Active-space FCIDUMP generator with determinant-space CASCI references."""

from .generate import GeometryRequest, generate, solve_geometry

__all__ = ["GeometryRequest", "generate", "solve_geometry"]
