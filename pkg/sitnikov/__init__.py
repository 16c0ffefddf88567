"""
sitnikov: symmetric periodic orbits of the Sitnikov problem and the stability
of their continuations into the elliptic problem.
"""

from .core.models import FrequencyPair, IntegratorConfig, Parity, StabilityClass
from .core.runner import SitnikovRunner
from .reporting.base import writer_registry

# Register writers
from .reporting.writers import CsvWriter, JsonWriter, MarkdownWriter

writer_registry.register("csv", CsvWriter())
writer_registry.register("json", JsonWriter())
writer_registry.register("markdown", MarkdownWriter())

__version__ = "0.1.0"
__all__ = ["FrequencyPair", "IntegratorConfig", "Parity", "SitnikovRunner", "StabilityClass"]
