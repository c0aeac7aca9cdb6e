from .figures import KINDS, FigureSpec, SchemaError, TimeSeries, build_figure, load_timeseries, render

__all__ = [
    "KINDS",
    "FigureSpec",
    "SchemaError",
    "TimeSeries",
    "build_figure",
    "load_timeseries",
    "render",
]

__version__ = "0.1.0"
