"""Modular data, modular invariants and clone extensions for c=1 orbifolds
and SO(N) at level 2."""
from .numerics import Tolerance
from .spectra import ModularData, TheoryId, modular_data
from .fusion import FusionRing, verlinde, simple_currents, fusion_isomorphic
from .invariants import (
    Mipf,
    build_b_series,
    build_dinv,
    build_scinv,
    charge_conjugation,
    diagonal,
    simple_current_invariant,
    verify,
)
from .extension import clone_check, extend, meromorphic_chain

__all__ = [
    "Tolerance", "ModularData", "TheoryId", "modular_data",
    "FusionRing", "verlinde", "simple_currents", "fusion_isomorphic",
    "Mipf", "build_b_series", "build_dinv", "build_scinv", "charge_conjugation",
    "diagonal", "simple_current_invariant", "verify",
    "clone_check", "extend", "meromorphic_chain",
]
__version__ = "0.1.0"
