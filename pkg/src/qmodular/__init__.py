"""Exact q-series machinery for level-20 modular forms and 1/pi series."""

from qmodular.series import QSeries, SeriesError, compose, revert

__version__ = "0.1.0"

__all__ = ["QSeries", "SeriesError", "compose", "revert", "__version__"]
