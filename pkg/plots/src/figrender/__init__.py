"""Figure rendering for anirabi CLI output files.

This package consumes only the CSV/JSON artifacts written by the anirabi
command line tool; it performs no spectral computation of its own.
"""

__version__ = "0.1.0"
