"""Design-space simulator for integrated solar / compute / radiator panel arrays."""

__version__ = "0.1.0"
