"""Exact-arithmetic toolkit for recursive two-rotation orbit constructions
on the circle, with Diophantine minima scanning and covering-number
dimension probes.

Everything numeric is either an exact rational (`fractions.Fraction`,
arbitrary-precision integers) or an explicitly radius-tracked dyadic
approximation; floats appear only in human-facing report columns.
"""

__version__ = "0.1.0"
