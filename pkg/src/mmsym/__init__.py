"""Workbench for symmetric rank decompositions of the matrix
multiplication tensor: exact verification, symmetry analysis, invariant
dimension counts, and a steerable two-phase numerical search."""

from .core import (
    EXACT,
    FLOAT,
    Decomposition,
    Mat,
    ModeError,
    RankOneTriple,
    Tensor3,
    evaluate,
    flat_index,
    make_decomposition,
    matmul_tensor,
    residual,
    standard_decomposition,
)

__all__ = [
    "EXACT", "FLOAT", "Decomposition", "Mat", "ModeError", "RankOneTriple",
    "Tensor3", "evaluate", "flat_index", "make_decomposition",
    "matmul_tensor", "residual", "standard_decomposition",
]

__version__ = "0.1.0"
