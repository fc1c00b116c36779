"""Dynamic range mode built on structured min-plus query structures."""

__version__ = "0.1.0"
