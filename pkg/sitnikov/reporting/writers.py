"""
CSV, JSON and Markdown report writers.
"""

import csv
import io
import json
import os
from typing import Any, Sequence

from jinja2 import Environment, FileSystemLoader
from pydantic import BaseModel

from .base import ReportWriter


def format_cell(value: Any, spec: str) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, spec)
    return str(value)


class CsvWriter(ReportWriter):
    """RFC 4180 CSV with a header row and 17 significant digits."""

    def __init__(self) -> None:
        super().__init__("csv")

    def render(self, rows: Sequence[BaseModel], title: str = "") -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\r\n", quoting=csv.QUOTE_MINIMAL)
        columns = self.columns(rows)
        writer.writerow(columns)
        for record in self.records(rows):
            writer.writerow([format_cell(record[c], ".17g") for c in columns])
        return buffer.getvalue()


class JsonWriter(ReportWriter):
    """A JSON array with one object per row."""

    def __init__(self) -> None:
        super().__init__("json")

    def render(self, rows: Sequence[BaseModel], title: str = "") -> str:
        return json.dumps(self.records(rows), indent=2) + "\n"


class MarkdownWriter(ReportWriter):
    """A Markdown table rendered from a Jinja2 template."""

    def __init__(self) -> None:
        super().__init__("markdown")
        self.templates_dir = os.path.join(os.path.dirname(__file__), "templates")
        self.env = Environment(
            loader=FileSystemLoader(self.templates_dir), trim_blocks=True, lstrip_blocks=True
        )

    def render(self, rows: Sequence[BaseModel], title: str = "") -> str:
        columns = self.columns(rows)
        cells = [[format_cell(record[c], ".12g") for c in columns] for record in self.records(rows)]
        template = self.env.get_template("table.md.j2")
        return template.render(title=title, columns=columns, rows=cells)
