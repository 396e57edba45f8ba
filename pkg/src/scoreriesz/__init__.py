"""
scoreriesz - Riesz representer estimation by time score matching.

Bridge distributions, score models and score matching risks, plus the
cross-fitted orthogonal estimators of ATE, AME and APE that consume them.
"""

__version__ = "0.1.0"
