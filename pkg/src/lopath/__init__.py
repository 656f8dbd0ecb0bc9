"""Exact simulation and compilation of linear-optical quantum circuits.

Amplitudes of multi-photon events are computed three ways: through the
symmetric Fock functor, through matrix permanents, and by rewriting
QPath diagrams to a weighted bipartite graph. ZX diagrams compile to
dual-rail post-selected optical diagrams.
"""

from lopath.errors import (
    CompositionError,
    DomainError,
    LopathError,
    ShapeError,
    SizeLimitError,
)

__version__ = "0.1.0"

__all__ = [
    "CompositionError",
    "DomainError",
    "LopathError",
    "ShapeError",
    "SizeLimitError",
]
