"""
Ratio net benchmark (ratnet)

Rational-function approximators (the ratio net) with MLP and RBF baselines,
a shared training stack and a reproduction harness for parameter and accuracy tables.
"""

__version__ = "0.1.0"
