"""Quadratic Chabauty for integral points on rank-2 elliptic curves over
imaginary quadratic fields of class number one.

p-adic heights (cyclotomic and anticyclotomic), the p-adic sigma function,
residue-disk solving and a two-prime sieve, over the norm-Euclidean fields
Q(sqrt d), d in {-3, -4, -7, -8, -11}.
"""

from .padic import PadicNumber, PadicSeries1, PadicSeries2, PrecisionError
from .quadfield import QuadField, QuadInt, QuadRat, split_prime
from .curve import CurveModel, EmbeddedCurve, CurveError
from .heights import HeightMachine, IdeleCharacter, HeightError
from .qcsolve import (QCError, QCResult, quadratic_chabauty_set,
                      recognize_algebraic, solve_alpha, solve_disks)

__all__ = [
    "PadicNumber", "PadicSeries1", "PadicSeries2", "PrecisionError",
    "QuadField", "QuadInt", "QuadRat", "split_prime",
    "CurveModel", "EmbeddedCurve", "CurveError",
    "HeightMachine", "IdeleCharacter", "HeightError",
    "QCError", "QCResult", "quadratic_chabauty_set",
    "recognize_algebraic", "solve_alpha", "solve_disks",
]
