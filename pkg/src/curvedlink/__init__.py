"""curvedlink: exact curved-complex link homology in a polynomial bimodule model."""

__version__ = "0.1.0"
