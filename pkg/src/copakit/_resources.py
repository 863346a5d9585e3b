"""Access to data files shipped inside the package."""

from __future__ import annotations

from importlib import resources


def resource_text(relpath: str) -> str:
    """Read a shipped data file, path relative to ``resources/``."""
    node = resources.files("copakit").joinpath("resources")
    for part in relpath.split("/"):
        node = node.joinpath(part)
    return node.read_text(encoding="utf-8")


def resource_names(subdir: str) -> list[str]:
    """File names available under one ``resources/`` subdirectory."""
    node = resources.files("copakit").joinpath("resources").joinpath(subdir)
    return sorted(entry.name for entry in node.iterdir() if entry.is_file())
