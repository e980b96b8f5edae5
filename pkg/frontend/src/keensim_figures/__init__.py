"""Figure renderer for the crisis-simulator CSV outputs."""

from .io import RenderInputError, Table, read_table
from .render import PanelSpec, render

__all__ = ["PanelSpec", "RenderInputError", "Table", "read_table", "render"]
