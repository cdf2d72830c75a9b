"""Optional Logfire tracing for simulation runs.

Nothing is sent unless ``LOGFIRE_TOKEN`` is set; every helper is then a no-op.
"""

import os
from collections.abc import Iterator
from contextlib import contextmanager
from typing import Any, Literal

import logfire

_LOGFIRE_ENABLED = os.environ.get("LOGFIRE_TOKEN") is not None
_initialized = False

Level = Literal["info", "warn", "error"]


def configure_logfire() -> bool:
    """Configure Logfire once per process; returns whether tracing is on."""
    global _initialized

    if not _initialized and _LOGFIRE_ENABLED:
        logfire.configure(service_name="hsp-cli", send_to_logfire=True)
        # Sweep configs and run reports are pydantic models
        logfire.instrument_pydantic()
    _initialized = True
    return _LOGFIRE_ENABLED


@contextmanager
def span(name: str, **attributes: Any) -> Iterator[None]:
    """Span around one engine call, tagged with its seed and plan constants."""
    if not _LOGFIRE_ENABLED:
        yield
        return
    with logfire.span(name, **attributes):
        yield


def _log(level: Level, message: str, attributes: dict[str, Any]) -> None:
    if _LOGFIRE_ENABLED:
        logfire.log(level, message, attributes=attributes or None)


def info(message: str, **attributes: Any) -> None:
    _log("info", message, attributes)


def warn(message: str, **attributes: Any) -> None:
    _log("warn", message, attributes)


def error(message: str, **attributes: Any) -> None:
    _log("error", message, attributes)
