"""Motivic Steenrod algebra toolkit: dual algebra, Milnor bases, Singer
constructions and Ext over finite subalgebras."""

from .coeff import HElement, Kind, Profile

__all__ = ["HElement", "Kind", "Profile"]
__version__ = "0.1.0"
