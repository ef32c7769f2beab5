"""Truncated metric connections and Wagner curvature of contact sub-Finsler structures
"""

__version__ = '0.1.0'
