"""Longest planar matchings in ordered random bipartite graphs."""
from ._backend import NAME as backend

__version__ = "0.1.0"
