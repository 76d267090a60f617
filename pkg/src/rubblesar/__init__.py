"""Multi-tier UAV search-and-rescue simulator with through-rubble radar fusion."""

__version__ = "0.1.0"
