"""Contact metric 3-manifolds and their transversal Ricci solitons."""

__version__ = "0.1.0"
