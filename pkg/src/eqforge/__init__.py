"""Finite groups H_{a,b} < SO(4), G_{a,b} < O(8) and their equivariant bifurcations."""

__version__ = "0.1.0"
