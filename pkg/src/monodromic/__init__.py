"""Exact computations with monodromic D-modules and mixed Hodge modules over a point."""
__version__ = "0.1.0"
