"""Two-level overlapping additive Schwarz solvers with adaptive interface
coarse spaces (wirebasket- and vertex-based) for 3D multiscale elliptic
problems on the unit cube."""

__version__ = "0.1.0"
