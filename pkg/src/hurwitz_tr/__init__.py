"""Topological recursion and Frobenius data for genus-zero spectral curves."""
