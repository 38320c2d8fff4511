"""Eigenvalue shifts of the Neumann Laplacian under small holes."""

__version__ = "0.1.0"
