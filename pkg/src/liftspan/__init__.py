"""Lifts of simple closed curves to finite regular covers of closed surfaces
and the integral homology they span."""

__version__ = "0.1.0"
