"""Exact computations for derived self-intersections of smooth subvarieties."""

__version__ = "0.1.0"
ENGINE_VERSION = __version__
