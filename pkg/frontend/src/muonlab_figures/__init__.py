"""Figure rendering for muonlab results: CSVs in, vector figures out."""

__version__ = "0.1.0"

from .render import FIGURES, render
from .schemas import REQUIRED_COLUMNS, SchemaError

__all__ = ["FIGURES", "render", "REQUIRED_COLUMNS", "SchemaError"]
