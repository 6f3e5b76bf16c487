"""Configuration package for the Unruh phase calculator."""
