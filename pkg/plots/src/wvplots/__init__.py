"""Figure rendering for wvlab CSV datasets."""

from wvplots.render import DataError, FigureSpec, SchemaError, render_figure

__version__ = "0.1.0"

__all__ = ["DataError", "FigureSpec", "SchemaError", "render_figure"]
