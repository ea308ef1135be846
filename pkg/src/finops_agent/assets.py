"""Paths to the data files shipped inside the package."""

from __future__ import annotations

import shutil
from pathlib import Path

DATA_ROOT = Path(__file__).parent / "data"

DEFAULT_SCHEMA = DATA_ROOT / "schema" / "unified.graphql"
DEFAULT_ALIASES = DATA_ROOT / "schema" / "aliases.json"
DEFAULT_FIXTURES = DATA_ROOT / "fixtures" / "v1"
DEFAULT_BANK = DATA_ROOT / "exemplars" / "bank.json"
DEFAULT_GROUNDTRUTH = DATA_ROOT / "groundtruth" / "review_onlineboutique.json"
SCRIPTS_DIR = DATA_ROOT / "scripts"
QUERIES_DIR = DATA_ROOT / "queries"

SEEDED_SUBDIRS = ("schema", "fixtures", "exemplars", "scripts", "groundtruth", "queries")


def script_path(name: str) -> Path:
    """Path of a packaged scripted-backend file by bare name."""
    safe = Path(name).name
    if not safe.endswith(".json"):
        safe += ".json"
    return SCRIPTS_DIR / safe


def seed(target: str | Path, overwrite: bool = False) -> list[Path]:
    """Copy every packaged asset tree into target; returns the created paths."""
    target = Path(target)
    created: list[Path] = []
    for sub in SEEDED_SUBDIRS:
        src = DATA_ROOT / sub
        dst = target / sub
        for path in sorted(src.rglob("*")):
            if not path.is_file():
                continue
            out = dst / path.relative_to(src)
            if out.exists() and not overwrite:
                continue
            out.parent.mkdir(parents=True, exist_ok=True)
            shutil.copyfile(path, out)
            created.append(out)
    return created
