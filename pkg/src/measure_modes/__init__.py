"""Convergence modes of measure sequences."""
