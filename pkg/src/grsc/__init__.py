"""Toolkit for graphical small cancellation presentations."""

__version__ = "0.1.0"
