"""gvforge: executable Grothendieck–Verdier duality over finite fields and finite lattices."""
from __future__ import annotations

__version__ = "0.1.0"

from .duality import FunctorData, GVData, LDData, verify_lifting
from .graded import gv_structure, svec, vec
from .linalg import Matrix

__all__ = [
    "FunctorData",
    "GVData",
    "LDData",
    "Matrix",
    "gv_structure",
    "svec",
    "vec",
    "verify_lifting",
    "__version__",
]
