"""Random hyperbolic surfaces glued from pairs of pants."""

__version__ = "0.1.0"
