"""Exact GIT walls for (plane curve, line) pairs and even-lattice tools for the K3 side."""

__version__ = "0.1.0"
