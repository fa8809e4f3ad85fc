"""Exception hierarchy shared across the package.

Exit-code mapping used by the command line tool:

* usage problems          -> exit 1 (handled by the argument parser)
* :class:`DataError`      -> exit 2
* :class:`NumericalError` -> exit 3
"""

from __future__ import annotations


class MoodcyclesError(Exception):
    """Base class for package errors."""


class DataError(MoodcyclesError):
    """Malformed, inconsistent, or insufficient input data."""


class NumericalError(MoodcyclesError):
    """A computation has no defined result (degenerate input, rank problems)."""


class DegenerateSeriesError(NumericalError):
    """A series has zero variance where variation is required."""
