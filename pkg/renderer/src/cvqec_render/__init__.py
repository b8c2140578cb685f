"""cvqec-render: figure rendering for cvqec sweep CSV artifacts."""

__version__ = "0.1.0"

from .render import (EXPECTED_COLUMNS, PlotSpec, RenderInputError, build_figure,
                     main, read_metadata, read_sweep, render, series_checksum)

__all__ = ["EXPECTED_COLUMNS", "PlotSpec", "RenderInputError", "build_figure",
           "main", "read_metadata", "read_sweep", "render", "series_checksum",
           "__version__"]
