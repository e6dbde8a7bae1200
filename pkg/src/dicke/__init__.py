"""Numerical toolkit for the semiclassical unbalanced, open Dicke model.

Subpackages cover the model definitions and symmetries (``model``), adaptive
integration (``integrate``), equilibria and analytic bifurcation curves
(``equilibria``), branch and orbit continuation (``continuation``), chaos
diagnostics (``chaos``), homoclinic connections (``homoclinic``), basins of
attraction (``basins``), phase-diagram classification (``phase``) and the
command-line interface (``cli``).
"""

from .model import FullState, ProjState, SystemParams

__all__ = ["SystemParams", "FullState", "ProjState"]

__version__ = "1.0.0"
