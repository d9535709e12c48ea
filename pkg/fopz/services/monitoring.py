# ---------------------------------------------------------
# monitoring.py  (JSON-lines logging for solver events)
# ---------------------------------------------------------

import json
import logging
import sys
import time
from typing import Any, Callable, Dict, Optional

from fopz.config.settings import LOG_FILE, LOG_LEVEL
from fopz.services.prom_metrics import decide_errors_total

logger = logging.getLogger("fopz")

_configured = False


class _StderrHandler(logging.StreamHandler):
    """Writes to whatever sys.stderr is at emit time."""

    @property
    def stream(self):
        return sys.stderr

    @stream.setter
    def stream(self, value):
        pass


def configure_logging(level: Optional[str] = None, log_file: Optional[str] = None) -> logging.Logger:
    """Attach JSON-lines handlers to the ``fopz`` logger.

    Diagnostics always go to stderr; stdout is reserved for results. An extra
    file handler is added when ``log_file`` (or FOPZ_LOG_FILE) is set.
    """
    global _configured

    logger.setLevel((level or LOG_LEVEL).upper())
    if _configured:
        return logger

    handler = _StderrHandler()
    handler.setFormatter(logging.Formatter("%(message)s"))
    logger.addHandler(handler)

    path = log_file or LOG_FILE
    if path:
        file_handler = logging.FileHandler(path)
        file_handler.setFormatter(logging.Formatter("%(message)s"))
        logger.addHandler(file_handler)

    logger.propagate = False
    _configured = True
    return logger


def log_event(event: str, level: int = logging.INFO, **fields: Any):
    """Emit one structured record."""
    entry: Dict[str, Any] = {"timestamp": time.time(), "event": event}
    entry.update(fields)
    logger.log(level, json.dumps(entry, default=str))


def monitor_call(engine: str, fn: Callable[[], Any]) -> Any:
    """Run ``fn`` and log its latency, counting failures per engine."""
    start = time.time()
    try:
        result = fn()
    except Exception as e:
        decide_errors_total.labels(engine=engine).inc()
        log_event("solver_error", level=logging.WARNING, engine=engine, error=str(e))
        raise

    elapsed = (time.time() - start) * 1000
    log_event("solver_call", level=logging.DEBUG, engine=engine, latency_ms=round(elapsed, 3))
    return result
