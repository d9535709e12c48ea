# ---------------------------------------------------------
# prom_metrics.py
# ---------------------------------------------------------

from prometheus_client import Counter, Histogram

# ------------------------
# DECISION METRICS
# ------------------------

decisions_total = Counter(
    "fopz_decisions_total",
    "Total number of model-checking decisions",
    ["engine"]
)

decide_errors_total = Counter(
    "fopz_decide_errors_total",
    "Total number of decisions that raised an error",
    ["engine"]
)

decide_latency_ms = Histogram(
    "fopz_decide_latency_ms",
    "Decision latency (ms)",
    ["engine"],
    buckets=[1, 5, 20, 50, 100, 400, 1500, 6000, 30000]
)

# ------------------------
# REDUCTION / K-SUM METRICS
# ------------------------

ksum_instances_emitted_total = Counter(
    "fopz_ksum_instances_emitted_total",
    "k-SUM instances produced by formula compilation"
)

ksum_instances_solved_total = Counter(
    "fopz_ksum_instances_solved_total",
    "k-SUM instances solved or counted"
)

# ------------------------
# GEOMETRY METRICS
# ------------------------

boxes_emitted_total = Counter(
    "fopz_boxes_emitted_total",
    "Disjoint boxes produced by decompositions",
    ["dimension"]
)
