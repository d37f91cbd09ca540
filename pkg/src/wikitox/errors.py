"""Exception hierarchy shared across the pipeline stages."""


class WikitoxError(Exception):
    """Base class for data and processing errors raised by this package.

    The CLI maps any WikitoxError (and plain OSError) to exit status 2.
    """


class DumpParseError(WikitoxError):
    """Malformed or truncated dump XML.

    Carries the approximate byte offset reached in the input stream and,
    when known, the title of the page being parsed when the error hit.
    """

    def __init__(self, message, byte_offset=None, page_title=None):
        details = []
        if page_title is not None:
            details.append(f"page {page_title!r}")
        if byte_offset is not None:
            details.append(f"near byte {byte_offset}")
        if details:
            message = f"{message} ({', '.join(details)})"
        super().__init__(message)
        self.byte_offset = byte_offset
        self.page_title = page_title


class SchemaError(WikitoxError):
    """NDJSON record failed validation; message cites file and line."""


class ConfigError(WikitoxError):
    """Bad or unknown configuration values."""


class ScoringError(WikitoxError):
    """Base for scorer failures."""


class OversizeTextError(ScoringError):
    """Text exceeds the scoring byte limit; callers skip and count these."""


class BackendUnavailableError(ScoringError):
    """Remote scorer unreachable after the configured retry budget."""


class BackendProtocolError(ScoringError):
    """Remote scorer answered with something we cannot interpret."""


class CacheMissError(ScoringError):
    """Cache-only backend was asked for a text it has never seen."""


class EstimationError(WikitoxError):
    """A statistic is undefined on the given input (empty log, no gaps)."""


class EmptyCohortError(WikitoxError):
    """An analysis cohort came out empty."""


class CalibrationError(WikitoxError):
    """Control matching could not reach the target pre-window activity."""


class PowerLawFitError(WikitoxError):
    """Not enough usable points to fit the power law."""
