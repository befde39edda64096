"""Discrete Hammersley last-passage percolation with stationary Bernoulli boundaries."""

__version__ = "0.1.0"
