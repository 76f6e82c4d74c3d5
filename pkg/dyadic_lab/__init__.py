"""
dyadic-lab - dyadic fractional integrals, paraproducts and commutators on finite Haar trees
"""

__version__ = "1.0.0"
