"""Spectral toolkit for the Gribov Hamiltonian in Bargmann space."""
