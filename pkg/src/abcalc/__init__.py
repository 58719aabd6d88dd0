"""Workbench for an attribute-based process calculus: parsing, labeled
transition semantics, bisimilarity checking, and a verified translation
from a broadcast channel calculus."""

__version__ = "0.1.0"
