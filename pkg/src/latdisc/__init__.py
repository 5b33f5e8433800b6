"""Orders and generators for orthogonal groups of lattices mod p^n and of discriminant groups."""

__version__ = "0.1.0"
