"""Brute-force reference computations, deliberately independent of biextlab."""
