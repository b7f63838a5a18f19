"""Structured sparsity-inducing norms built from submodular set functions.

A nondecreasing submodular ``F`` on ``{0, ..., p-1}`` defines the norm
``Omega(w) = f(|w|)`` through its Lovász extension ``f``. The package
evaluates these norms and their duals, computes proximal operators through
submodular minimisation, solves regularized least squares, and evaluates
the support-recovery theory attached to them.

Indices are 0-based in the Python API and 1-based in configuration files
and command-line output.
"""
from .lovasz import NormContext, dual_norm, omega
from .setfn import (
    Cardinality,
    ConcaveCardinality,
    GroupCover,
    IntervalCount,
    RangePlusConstant,
    Spectral,
    SumFunction,
    WeightedCardinality,
)

__version__ = "0.1.0"

__all__ = [
    "NormContext",
    "omega",
    "dual_norm",
    "Cardinality",
    "ConcaveCardinality",
    "GroupCover",
    "IntervalCount",
    "RangePlusConstant",
    "Spectral",
    "SumFunction",
    "WeightedCardinality",
]
