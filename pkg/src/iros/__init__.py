"""iros: inventory replenishment operations support."""

__version__ = "0.1.0"
