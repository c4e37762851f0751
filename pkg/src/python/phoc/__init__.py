"""
PHOC Package
Pyramidal Histogram of Characters embeddings of word strings
"""

from .phoc_builder import (
    Alphabet,
    PhocConfig,
    PhocVector,
    canonicalize,
    phoc_dim,
    phoc_matrix,
    phoc_of_string,
)

__all__ = [
    'Alphabet',
    'PhocConfig',
    'PhocVector',
    'canonicalize',
    'phoc_dim',
    'phoc_matrix',
    'phoc_of_string',
]
