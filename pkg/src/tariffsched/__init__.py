"""Preemptive scheduling under piecewise-constant time-of-use tariffs."""

__version__ = "0.1.0"
