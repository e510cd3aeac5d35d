"""Exact-arithmetic toolkit for tensor stable positive maps.

Modules:

* ``epsfield``       the ordered field Q(e) with a positive infinitesimal,
  and its complexification;
* ``hypermat``       exact dense matrices, psd pivoting, partial transpose;
* ``choi``           map decompositions and the Choi correspondence;
* ``positivity``     float-side block-positivity violation searches;
* ``constructions``  the base Choi matrix, the perturbation, the filter /
  twirl state pipeline, the symmetrization map;
* ``mamu``           the matrix-multiplication projector, MPO diagonals,
  the reduction between them, bounded decision loops;
* ``layers``         sequence-indexed objects under the cofinite filter;
* ``claims``         the runnable claim suite behind ``tsplab verify-paper``.
"""

from .epsfield import EPS, EpsComplex, EpsRational, Rational
from .hypermat import BipartiteDims, EpsMatrix, PsdVerdict, psd_check
from .choi import ChoiMatrix, MapDecomposition

__all__ = [
    "EPS",
    "EpsComplex",
    "EpsRational",
    "Rational",
    "BipartiteDims",
    "EpsMatrix",
    "PsdVerdict",
    "psd_check",
    "ChoiMatrix",
    "MapDecomposition",
]

__version__ = "0.1.0"
