"""Oriented regular representations of finite groups: constructions, verification and search."""

__version__ = "0.1.0"

from .autengine import automorphism_group, stabiliser_is_trivial
from .digraph import ConnectionSet, cayley
from .errors import (ArgumentError, NotFoundError, OrrError, ParseError, PreconditionError,
                     ResourceError, SearchTimeout, ValidationError)
from .groups import FiniteGroup
from .presentations import coset_enumerate, parse_presentation
from .search import Verdict, brute_force_orr, classify

__all__ = [
    "ArgumentError", "ConnectionSet", "FiniteGroup", "NotFoundError", "OrrError", "ParseError",
    "PreconditionError", "ResourceError", "SearchTimeout", "ValidationError", "Verdict",
    "automorphism_group", "brute_force_orr", "cayley", "classify", "coset_enumerate",
    "parse_presentation", "stabiliser_is_trivial",
]
