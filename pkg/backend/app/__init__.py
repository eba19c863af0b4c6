"""
weylab: exact highest-weight representation theory for simple algebraic groups
"""

__version__ = "1.0.0"
