"""Exact computational geometry over small finite fields: Kakeya and
Nikodym sets, capped polynomial interpolation, point-line incidence
spectra, and Hermitian varieties in dimensions 2 and 3."""

__version__ = "0.1.0"
