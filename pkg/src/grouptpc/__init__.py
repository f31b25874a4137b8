"""Turbo product codes decoded with group probabilities and soft-output GRAND."""

__version__ = "0.1.0"
