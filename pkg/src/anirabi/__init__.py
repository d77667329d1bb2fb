"""anirabi: exact spectra, eigenstates and entanglement of the anisotropic Rabi model.

The spectral problem is solved through a transcendental G-function built from
two power-series solution branches of the Bargmann-space eigenproblem; every
result can be cross-checked against a truncated-Fock exact diagonalization
(the ``oracle`` module).
"""

from ._backend import BACKEND
from .model import ModelParams

__version__ = "0.1.0"

__all__ = ["ModelParams", "BACKEND", "__version__"]
