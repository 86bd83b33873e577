"""Figure generation for simulator report CSVs (file boundary only)."""

from .figures import KINDS, ContractError, FigureSpec, read_rows, render_figure

__version__ = "0.1.0"
