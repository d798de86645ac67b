"""The instance registry: which charts to verify, with budget overrides.

A registry is a plain text file: one instance string per line, optionally
followed by whitespace-separated ``key=value`` overrides (``budget=<n>``
caps the pair reductions for that instance's checks).  Blank lines and
``#`` comments are ignored.  Every entry must name a valid chart and
duplicates are rejected.  The registry's identity is the SHA-256 hash of
its canonical line list, recorded in every report.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from importlib import resources

from .charts import ChartError, ChartSpec, format_instance, parse_instance

__all__ = [
    "RegistryEntry",
    "Registry",
    "RegistryError",
    "parse_registry",
    "load_registry",
    "default_registry_text",
]

_DATA_PACKAGE = "splitmodels.data"
_DEFAULT_NAME = "registry.txt"


class RegistryError(ValueError):
    """A registry file that cannot be used."""


@dataclass(frozen=True)
class RegistryEntry:
    """One registry row: the instance plus an optional budget override."""

    spec: ChartSpec
    budget: int | None = None

    def canonical_line(self) -> str:
        line = format_instance(self.spec)
        if self.budget is not None:
            line += f" budget={self.budget}"
        return line


@dataclass(frozen=True)
class Registry:
    """An ordered, duplicate-free list of verification targets."""

    entries: tuple[RegistryEntry, ...]

    def __len__(self) -> int:
        return len(self.entries)

    def canonical_text(self) -> str:
        return "".join(e.canonical_line() + "\n" for e in self.entries)

    def sha256(self) -> str:
        return hashlib.sha256(self.canonical_text().encode("utf-8")).hexdigest()

    def find(self, instance: str) -> RegistryEntry | None:
        """The entry whose canonical instance string matches, if any."""
        wanted = format_instance(parse_instance(instance))
        for entry in self.entries:
            if format_instance(entry.spec) == wanted:
                return entry
        return None


def parse_registry(text: str) -> Registry:
    """Parse registry text; reject invalid instances and duplicates."""
    entries: list[RegistryEntry] = []
    seen: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        try:
            spec = parse_instance(parts[0])
        except ChartError as exc:
            raise RegistryError(f"registry line {lineno}: {exc}") from exc
        budget: int | None = None
        for extra in parts[1:]:
            key, _, value = extra.partition("=")
            if key != "budget" or not value:
                raise RegistryError(
                    f"registry line {lineno}: unknown override {extra!r}"
                )
            try:
                budget = int(value)
            except ValueError:
                raise RegistryError(
                    f"registry line {lineno}: budget must be an integer"
                ) from None
            if budget <= 0:
                raise RegistryError(
                    f"registry line {lineno}: budget must be positive"
                )
        key_str = format_instance(spec)
        if key_str in seen:
            raise RegistryError(
                f"registry line {lineno}: duplicate instance {key_str}"
            )
        seen.add(key_str)
        entries.append(RegistryEntry(spec=spec, budget=budget))
    return Registry(entries=tuple(entries))


def default_registry_text() -> str:
    """The packaged default registry file's text."""
    return (
        resources.files(_DATA_PACKAGE)
        .joinpath(_DEFAULT_NAME)
        .read_text(encoding="utf-8")
    )


def load_registry(path: str | None = None) -> Registry:
    """Load a registry from a file path, or the packaged default."""
    if path is None:
        return parse_registry(default_registry_text())
    with open(path, "r", encoding="utf-8") as fh:
        return parse_registry(fh.read())
