"""Shared exception base for the package.

Modules define their own exception types; everything user-facing derives
from FinopsError so the CLI and service layers can map failures to exit
codes / HTTP responses in one place.
"""


class FinopsError(Exception):
    """Base class for all errors raised by this package."""
