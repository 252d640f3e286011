"""Noisy low-rank tensor completion."""
