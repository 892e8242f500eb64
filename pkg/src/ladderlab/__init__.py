"""Annihilation-creation operators of exactly solvable quantum mechanics.

Ordinary (Schroedinger) and difference-equation models whose Heisenberg
operator solution for a sinusoidal coordinate is known in closed form, with
numerical checks of every identity involved.
"""

from .models import MODEL_NAMES, ConstraintError, get_model

__version__ = "0.1.0"

__all__ = ["MODEL_NAMES", "ConstraintError", "get_model", "__version__"]
