"""Explicit minimal embeddings of sphere products and projective spaces into
round spheres, with numerical checks of their curvature and Yamabe data."""

__version__ = "0.1.0"
