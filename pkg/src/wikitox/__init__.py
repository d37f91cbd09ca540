"""wikitox: measure the impact of toxic talk-page comments on editors.

Pipeline stages: dump scanning, comment extraction, toxicity scoring,
activity vectors, matched-control activity-loss estimation, leaving
curves, and an agent-based population simulation. Each stage reads and
writes documented file formats and is re-runnable on its own.
"""

__version__ = "0.1.0"

from .errors import WikitoxError

__all__ = ["WikitoxError", "__version__"]
