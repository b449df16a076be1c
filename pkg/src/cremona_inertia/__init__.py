"""Exact plane Cremona maps fixing a smooth cubic, and free-product certificates
for the group generated by cubic involutions."""

__version__ = "0.1.0"
