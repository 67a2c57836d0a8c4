"""essence-kit: combinatorial invariants of spanning surfaces of link diagrams."""

__version__ = "0.1.0"
