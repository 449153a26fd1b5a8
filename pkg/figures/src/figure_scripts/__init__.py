"""Batch figure rendering for photon-engine CSV outputs.

Thin plotting layer: no physics is recomputed here, every plotted value
comes from the CSV files and their manifest sidecars.
"""

__version__ = "0.1.0"

from .io import FigureDataError, load_manifest, load_table
from .render import FigureSpec, render

__all__ = ["FigureDataError", "FigureSpec", "load_manifest", "load_table",
           "render", "__version__"]
