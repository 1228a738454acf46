"""Static figure generation from hybridsim CSV/JSON artifacts."""

from .figures import FigureSpec, make_figures

__version__ = "0.1.0"

__all__ = ["FigureSpec", "make_figures", "__version__"]
