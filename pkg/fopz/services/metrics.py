"""
Phase timing registry for one CLI run.
Snapshots feed the ``timings`` field of the run manifest.
"""

import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Dict, List


# ===============================
# LOW-LEVEL TIMER UTILITY
# ===============================

@dataclass
class Timer:
    start_time: float = field(default_factory=time.perf_counter)
    end_time: float = None

    def stop(self):
        self.end_time = time.perf_counter()

    @property
    def elapsed_ms(self) -> float:
        if self.end_time is None:
            return 0.0
        return (self.end_time - self.start_time) * 1000


# ===============================
# CENTRAL METRICS STORE
# ===============================

class MetricsStore:
    """In-memory per-phase timings; a phase entered twice accumulates."""

    def __init__(self):
        self.phase_times: Dict[str, List[float]] = {}

    def record_phase(self, phase: str, ms: float):
        self.phase_times.setdefault(phase, []).append(ms)

    @contextmanager
    def phase(self, name: str):
        """Time the enclosed block under ``name``."""
        timer = Timer()
        try:
            yield timer
        finally:
            timer.stop()
            self.record_phase(name, timer.elapsed_ms)

    def reset(self):
        self.phase_times.clear()

    # --- Snapshot for manifests ---
    def snapshot(self) -> Dict[str, float]:
        """Total milliseconds per phase, rounded for readability."""
        return {name: round(sum(times), 3) for name, times in sorted(self.phase_times.items())}


# ===============================
# GLOBAL METRICS INSTANCE
# ===============================

metrics = MetricsStore()
