"""Face-level machining-feature recognition on boundary-representation solids."""

__version__ = "0.1.0"
