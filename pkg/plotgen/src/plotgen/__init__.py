"""Figure scripts over the simulator's exported CSV tables."""

from .figures import FIGURE_KINDS, FigureSpec, MpcTable, SchemaError, build_figure, ecdf_curve, read_mpcs, render

__version__ = "0.1.0"

__all__ = [
    "FIGURE_KINDS",
    "FigureSpec",
    "MpcTable",
    "SchemaError",
    "build_figure",
    "ecdf_curve",
    "read_mpcs",
    "render",
]
