"""Sofic approximations of lamplighter/BS(1,k)/SOL groups and their couplings."""

from .coupling import CouplingMap, coupling_sol, identity_coupling
from .folner import FolnerGraph, folner_lamplighter, good_set
from .groups import BsGroup, CyclicGroup, LamplighterGroup, SolLatticeGroup
from .quadratic import QuadraticNumber
from .sollattice import folner_sol_lattice
from .solreal import SolRealPoint
from .tiling import EigenData, TileLocator, digit_map, eigen_data

__version__ = "0.1.0"

__all__ = [
    "BsGroup",
    "CouplingMap",
    "CyclicGroup",
    "EigenData",
    "FolnerGraph",
    "LamplighterGroup",
    "QuadraticNumber",
    "SolLatticeGroup",
    "SolRealPoint",
    "TileLocator",
    "coupling_sol",
    "digit_map",
    "eigen_data",
    "folner_lamplighter",
    "folner_sol_lattice",
    "good_set",
    "identity_coupling",
]
