"""Graph polynomials, denominator reduction and c2 invariants of hourglass chains."""

__version__ = "0.1.0"
