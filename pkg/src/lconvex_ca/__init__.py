"""Cellular-automaton recognition of L-convex polyomino pictures.

Modules: ``picture`` (pictures, enumeration, generation), ``oracle``
(reference deciders), ``engine`` (von Neumann CA engine and traces),
``recognizer`` (the real-time rule), ``harness`` (differential testing)
and ``cli``.
"""

from .errors import GenerationError, InvalidInputError, LConvexError, PictureFormatError, RefusalError
from .picture import Picture, parse_picture, random_picture, render_picture

__version__ = "0.1.0"

__all__ = [
    "GenerationError",
    "InvalidInputError",
    "LConvexError",
    "Picture",
    "PictureFormatError",
    "RefusalError",
    "parse_picture",
    "random_picture",
    "render_picture",
]
