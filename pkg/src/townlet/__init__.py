"""Townlet: a tile-world, LLM-planned multi-agent event simulator."""

from .errors import TownletError

__version__ = "0.1.0"
__all__ = ["TownletError", "__version__"]
