"""Name normalization for dimensions shared across vendors."""

from __future__ import annotations

import re

_SEPARATOR_RUNS = re.compile(r"[\s_\-]+")

DIMENSIONS = ("application", "entity")


def normalize_name(raw: str, dimension: str = "application") -> str:
    """Canonical form of an application or entity name.

    Trims surrounding whitespace, collapses every internal run of
    whitespace/underscores/hyphens into a single hyphen, and case-folds.
    Idempotent, so vendors may disagree on spacing and casing and still
    join on the same key.
    """
    if dimension not in DIMENSIONS:
        raise ValueError(f"unknown dimension {dimension!r}")
    return _SEPARATOR_RUNS.sub("-", raw.strip()).casefold()
