"""
glupoly - independence polynomials of recursively glued graphs
"""

__version__ = "1.0.0"
__author__ = "glupoly contributors"
__description__ = "Exact and numeric engine for recursively glued graph sequences"
