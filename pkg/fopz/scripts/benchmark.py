"""Decision timing sweeps behind ``fopz bench``.

Rows are (n, engine, workload, repeat, ms, result); the CSV has no plots.
"""

import time
from typing import Dict, List, Optional, Sequence

import numpy as np
import pandas as pd
from tqdm import tqdm

from fopz.scripts.generate import random_dataset, random_values, rng_for
from fopz.services.dataset import Dataset, bind
from fopz.services.dispatch import decide_dispatch
from fopz.services.formula import parse
from fopz.utils.errors import FopzError

WORKLOADS: Dict[str, str] = {
    "3sum": "exists a in S1 exists b in S2 exists c in S3: a[1] + b[1] = c[1]",
    "sumset": "forall a in S1 forall b in S2 exists c in S3: c[1] <= a[1] + b[1] and a[1] + b[1] <= c[1] + t",
}

# engines without an ∃∃∃ route get the ∀∀∃ workload
DEFAULT_WORKLOAD = {"ineqdim3": "sumset"}


def _dataset(workload: str, n: int, seed: int) -> Dataset:
    rng = rng_for(seed)
    if workload == "sumset":
        sets = {
            "S1": [[v] for v in random_values(rng, n, 4 * n)],
            "S2": [[v] for v in random_values(rng, n, 4 * n)],
            "S3": [[v] for v in random_values(rng, n, 8 * n)],
        }
        return Dataset.create(sets, {"t": 2 * n})
    return random_dataset(rng, 3, n, 1, bound=4 * n)


def run_benchmark(engine: str, sizes: Sequence[int], seed: int = 0, repeats: int = 1,
                  workload: Optional[str] = None) -> pd.DataFrame:
    """Time ``decide_dispatch`` on random workloads of each size.

    Args:
        engine: dispatcher engine name
        sizes: set sizes n
        seed: base seed; run i of size n uses seed + i
        repeats: runs per size
        workload: "3sum" or "sumset"; chosen per engine when omitted

    Returns:
        DataFrame with one row per run
    """
    workload = workload or DEFAULT_WORKLOAD.get(engine, "3sum")
    formula = parse(WORKLOADS[workload])
    rows: List[dict] = []
    for n in tqdm(list(sizes), desc=f"bench {engine}", unit="size"):
        for i in range(repeats):
            inst = bind(formula, _dataset(workload, n, seed + i))
            start = time.perf_counter()
            try:
                result = decide_dispatch(inst, engine)
            except FopzError as e:
                result = f"error: {e}"
            ms = (time.perf_counter() - start) * 1000
            rows.append({
                "n": n,
                "engine": engine,
                "workload": workload,
                "repeat": i,
                "ms": round(ms, 3),
                "result": result,
            })
    return pd.DataFrame(rows, columns=["n", "engine", "workload", "repeat", "ms", "result"])


def summarize(df: pd.DataFrame) -> pd.DataFrame:
    """Latency per size, plus the growth factor between consecutive sizes."""
    summary = df.groupby(["engine", "n"])["ms"].agg(
        avg_ms="mean",
        p95_ms=lambda x: np.percentile(x, 95),
        max_ms="max",
        runs="count",
    ).reset_index()
    summary["growth"] = summary.groupby("engine")["avg_ms"].pct_change().add(1).round(3)
    return summary
