from __future__ import annotations


class SymcurvError(Exception):
    """Base class for every error raised by symcurv."""


class ConsistencyError(SymcurvError):
    """An internal cross-check failed; this is a bug, not a user error."""
