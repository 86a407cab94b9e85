"""
Bid Curve Engine Package

Click-vs-cost curve fitting and budget-constrained bid recommendation.
"""

__version__ = "1.0.0"
__all__ = ["__version__"]
