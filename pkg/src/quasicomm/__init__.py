"""Finite-dimensional checks of the reduction from quasi-commutator
estimates ``||f(A1) S - S f(A2)||`` to commutator estimates
``||Q f(A) - f(A) Q||`` via two-block stacking."""

__version__ = "0.1.0"
