"""Strict plotting layer over the experiment CSV artifacts.

Consumes manifest.json plus the CSVs it lists and never recomputes any
numerics.  Rendering is a pure function of file content: fixed style, no
timestamps, byte-stable PNG output.
"""

from bsplots.figures import FIGURE_IDS, MissingDataError, render, render_all

__all__ = ["FIGURE_IDS", "MissingDataError", "render", "render_all"]
