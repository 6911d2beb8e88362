"""Hierarchical equations of motion for a driven qubit in a Lorentzian bath,
with the mixed-state geometric phase of its eigen-trajectory."""

__version__ = "0.1.0"

from .model import ModelParams  # noqa: E402

__all__ = ["ModelParams", "__version__"]
