"""Adjacency spectra and the count of eigenvalues standing out of the bulk.

For a dense random graph with independent edges the bulk of the spectrum
has radius of order ``sqrt(n)``; structure shows up as eigenvalues of order
``n``. With beta-model odds only the Perron eigenvalue escapes, while a
``k``-color structure produces up to ``2k - 1`` of them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .graph import Graph

__all__ = ["SpectralReport", "spectrum", "nontrivial_count", "DEFAULT_THRESHOLD", "MAX_N"]

DEFAULT_THRESHOLD = 3.0
MAX_N = 5000


def _count(eigenvalues, n, threshold):
    if not threshold > 0:
        raise ValidationError("threshold must be positive")
    return int(np.count_nonzero(np.abs(eigenvalues) > threshold * math.sqrt(n)))


@dataclass(frozen=True)
class SpectralReport:
    """Eigenvalues sorted by decreasing absolute value, plus summaries."""

    eigenvalues: np.ndarray
    nontrivial_count: int
    threshold: float
    ratio: float

    @property
    def n(self):
        return int(self.eigenvalues.shape[0])

    def to_dict(self):
        return {
            "eigenvalues": [float(x) for x in self.eigenvalues],
            "nontrivial_count": int(self.nontrivial_count),
            "threshold": float(self.threshold),
            "ratio": float(self.ratio),
        }


def _sorted_eigenvalues(adj):
    lam = np.linalg.eigvalsh(np.asarray(adj, dtype=float))
    # stable order: by |lambda| descending, positive first on ties
    order = np.lexsort((-lam, -np.abs(lam)))
    return lam[order]


def spectrum(g: Graph, threshold: float = DEFAULT_THRESHOLD) -> SpectralReport:
    """Full adjacency spectrum of ``g`` (dense symmetric solver, ``n <= 5000``)."""
    n = g.n
    if n < 1:
        raise ValidationError("spectrum needs at least one vertex")
    if n > MAX_N:
        raise ValidationError(f"dense spectrum limited to n <= {MAX_N}, got {n}")
    lam = _sorted_eigenvalues(g.adjacency)
    top = abs(lam[0])
    ratio = float(abs(lam[1]) / top) if n > 1 and top > 0 else 0.0
    return SpectralReport(lam, _count(lam, n, threshold), float(threshold), ratio)


def nontrivial_count(report: SpectralReport, threshold: float = DEFAULT_THRESHOLD) -> int:
    """Number of eigenvalues with ``|lambda| > threshold * sqrt(n)``."""
    return _count(report.eigenvalues, report.n, threshold)
