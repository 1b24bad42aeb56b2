"""Shared exception base.

Every fitmap exception carries a stable machine ``code`` (its class name by
default) so the HTTP layer and the CLI can report errors without string
matching.
"""

from __future__ import annotations


class FitmapError(Exception):
    """Base class for all errors raised by this package."""

    @property
    def code(self) -> str:
        return type(self).__name__
