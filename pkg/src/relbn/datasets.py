"""Bundled example data: the eleven-attribute medical sample and the
five-attribute statistical table, with their domains and dependencies."""
from __future__ import annotations

from importlib import resources

from . import io

EXAMPLE1_CLIQUES = (
    ("u9", "u10", "u11"),
    ("u7", "u8", "u9", "u10"),
    ("u6", "u7", "u8", "u9"),
    ("u3", "u7", "u8", "u10"),
    ("u3", "u4", "u5", "u8"),
    ("u1", "u2", "u3", "u7"),
)


def data_path(name: str):
    return resources.files(__package__).joinpath("data").joinpath(name)


def _read(name: str) -> str:
    return data_path(name).read_text(encoding="utf-8")


def example1_domains() -> dict[str, tuple]:
    return io.parse_domains(_read("example1.domains"))


def example1_relation():
    return io.parse_relation(_read("table1.csv"), example1_domains())


def example1_dependencies():
    return io.parse_dependencies(_read("example1.deps"))


def recall_evidence():
    return io.parse_evidence(_read("recall.evidence"), example1_domains())


def example2_domains() -> dict[str, tuple]:
    return io.parse_domains(_read("example2.domains"))


def example2_relation():
    return io.parse_relation(_read("table3.csv"), example2_domains())


def example2_dependencies():
    return io.parse_dependencies(_read("example2.deps"))
