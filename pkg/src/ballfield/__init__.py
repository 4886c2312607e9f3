"""Gaussian random fields on the sphere, the ball and the 3-sphere."""
__version__ = "0.1.0"
