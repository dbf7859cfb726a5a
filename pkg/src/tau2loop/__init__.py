"""Exact tau_2(t_q) operator algebra of the superintegrable chiral Potts model."""

__version__ = "0.1.0"
