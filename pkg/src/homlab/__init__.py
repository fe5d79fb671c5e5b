"""Numerical laboratory for quantum homogenizers, descriptor networks and Hardy-type paradoxes."""

__version__ = "0.1.0"
