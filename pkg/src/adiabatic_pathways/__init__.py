"""Optimal adiabatic quantum pathways via differential evolution with CRAB pulses."""
from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = ["BACKEND", "__version__"]
