"""Locations of the data files bundled with the package."""

from __future__ import annotations

from importlib.resources import files
from pathlib import Path

DATA = Path(str(files("cas") / "data"))


def problem_path(name: str) -> Path:
    return DATA / "problems" / f"{name}.problem"


def problem_dir() -> Path:
    return DATA / "problems"


def alias_path() -> Path:
    return DATA / "aliases.txt"


def prompt_path(name: str) -> Path:
    return DATA / "prompts" / f"{name}.txt"


def dataset_dir() -> Path:
    return DATA / "dataset"


def fixture_dir() -> Path:
    return DATA / "fixtures"


def models_config() -> Path:
    return DATA / "models.yaml"


def default_aliases():
    from cas.actionseq import load_aliases

    return load_aliases(alias_path())
