"""Figure rendering for decoder-experiment CSV outputs."""

from .render import KINDS, PlotJob, SchemaError, build_figure, render

__version__ = "0.1.0"

__all__ = ["PlotJob", "SchemaError", "render", "build_figure", "KINDS"]
