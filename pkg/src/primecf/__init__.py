"""Prime digits in continued fraction expansions."""

__version__ = "0.1.0"
