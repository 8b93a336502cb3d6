"""Cells, graph complexes and canonical-form integrals for tropical moduli spaces."""

__version__ = "0.1.0"
