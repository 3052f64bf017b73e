"""Oriented digital boiling: simulation, exact height laws and their limits."""
from .growth import HeightTrace, MarkField, simulate
from .tables import DistributionTable

__version__ = "0.1.0"

__all__ = ["DistributionTable", "HeightTrace", "MarkField", "simulate", "__version__"]
