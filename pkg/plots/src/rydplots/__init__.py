"""Render rydsteady CSV tables into figure images.

Pure consumer of the documented CSV schemas; no dependency on the engine.
"""

__version__ = "0.1.0"

from .render import PlotJob, SchemaError, render

__all__ = ["PlotJob", "SchemaError", "render"]
