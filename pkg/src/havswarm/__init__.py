"""Decentralised jackknife- and collision-avoiding swarms of heavy articulated vehicles."""

__version__ = "0.1.0"
