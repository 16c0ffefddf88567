"""
Base classes for report writers.
"""

from abc import ABC, abstractmethod
from typing import Any, Dict, List, Sequence

from pydantic import BaseModel

PROVENANCE_FIELDS = ("abs_tol", "rel_tol")


class ReportWriter(ABC):
    """Abstract base class for serializers of result rows."""

    def __init__(self, format_name: str):
        self.format_name = format_name

    @abstractmethod
    def render(self, rows: Sequence[BaseModel], title: str = "") -> str:
        """
        Serialize rows into one document.

        Args:
            rows: Result rows, all of the same model type
            title: Optional caption for formats that support one

        Returns:
            The serialized document
        """
        pass

    def records(self, rows: Sequence[BaseModel]) -> List[Dict[str, Any]]:
        """Rows as plain JSON-compatible dictionaries, keys in field order."""
        return [row.model_dump(mode="json") for row in rows]

    def columns(self, rows: Sequence[BaseModel]) -> List[str]:
        """Field names in declaration order, provenance columns last."""
        if not rows:
            return []
        fields = list(type(rows[0]).model_fields)
        trailing = [name for name in PROVENANCE_FIELDS if name in fields]
        return [name for name in fields if name not in trailing] + trailing


class WriterRegistry:
    """Registry for report writers."""

    def __init__(self) -> None:
        self._writers: Dict[str, ReportWriter] = {}

    def register(self, name: str, writer: ReportWriter) -> None:
        """Register a writer."""
        self._writers[name] = writer

    def get(self, name: str) -> ReportWriter:
        """Get a writer by format name."""
        if name not in self._writers:
            raise ValueError(f"Unknown output format: {name}")
        return self._writers[name]

    def list_formats(self) -> List[str]:
        """List all registered formats."""
        return list(self._writers.keys())


# Global writer registry
writer_registry = WriterRegistry()
