"""
blockmass: occurrences of a digit block, their generating functions, the
measures they induce on [0, 1) and certified harmonic sums.
"""
__version__ = "1.0.0"
