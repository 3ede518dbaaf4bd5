"""Association analysis for 2x2 contingency tables."""

__version__ = "0.1.0"
