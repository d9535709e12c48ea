"""Engine selection for bound instances.

Engines:
- brute: nested enumeration
- baseline: meet-in-the-middle and two-quantifier solvers behind outer enumeration
- reduction: compilation to k-SUM families (existential or universal tails)
- ineqdim3: box-incidence pipeline for Q∀∃ tails with at most three inequalities
- auto: picks per prefix shape
"""

import logging
from typing import Dict, List, Optional

from fopz.config.settings import THREADS
from fopz.services import baseline, bitreduce, ineqdim3
from fopz.services.dataset import Instance
from fopz.services.ksum import WitnessReport
from fopz.services.metrics import metrics
from fopz.services.monitoring import log_event, monitor_call
from fopz.services.prom_metrics import decide_latency_ms, decisions_total
from fopz.utils.errors import EngineInapplicableError, PrefixError

E, A = ineqdim3.E, ineqdim3.A


# ===============================
# APPLICABILITY
# ===============================

def _tail_is_uniform(inst: Instance) -> bool:
    tail = inst.quantifiers[-3:]
    return inst.k >= 3 and len(set(tail)) == 1


def reduction_applicable(inst: Instance) -> bool:
    if inst.k < 2:
        return False
    return inst.is_existential or inst.is_universal or _tail_is_uniform(inst)


def ineqdim3_applicable(inst: Instance) -> bool:
    if inst.k < 3:
        return False
    tail = inst.quantifiers[-3:]
    shapes = ineqdim3.DIRECT_SHAPES | ineqdim3.NEGATED_SHAPES
    return tail in shapes and inst.normal.dimension <= ineqdim3.MAX_DIMENSION


def applicable_engines(inst: Instance) -> List[str]:
    engines = ["brute", "baseline"]
    if reduction_applicable(inst):
        engines.append("reduction")
    if ineqdim3_applicable(inst):
        engines.append("ineqdim3")
    engines.append("auto")
    return engines


# ===============================
# ENGINES
# ===============================

def _outer(inst: Instance, depth: int, finish) -> bool:
    """Enumerate the first ``depth`` quantifiers, then call ``finish`` on the rest."""
    if depth == 0:
        return finish(inst)
    branches = (_outer(inst.fix_first(v), depth - 1, finish) for v in dict.fromkeys(inst.sets[0]))
    if inst.quantifiers[0] is E:
        return any(branches)
    return all(branches)


def _decide_reduction(inst: Instance, threads: int) -> bool:
    if inst.is_existential:
        if inst.has_empty_set:
            return False
        return bitreduce.solve_family(bitreduce.iter_decision_family(inst), threads)
    if inst.is_universal:
        return not _decide_reduction(inst.negated(), threads)
    return _outer(inst, inst.k - 3, lambda tail: _decide_reduction(tail, threads))


def _decide_triple(inst: Instance) -> bool:
    shape = inst.quantifiers
    if shape == (E, E, E):
        return baseline.decide_existential(inst)
    if shape == (A, A, A):
        return not baseline.decide_existential(inst.negated())
    if shape in ineqdim3.DIRECT_SHAPES or shape in ineqdim3.NEGATED_SHAPES:
        if inst.normal.dimension <= ineqdim3.MAX_DIMENSION:
            return ineqdim3.decide_ineqdim3(inst)
        log_event(
            "ineqdim3_skipped",
            level=logging.DEBUG,
            reason="syntactic dimension above 3",
            dimension=inst.normal.dimension,
        )
    return baseline.decide_general(inst)


def _decide_auto(inst: Instance) -> bool:
    if inst.is_existential:
        return baseline.decide_existential(inst)
    if inst.is_universal:
        return not baseline.decide_existential(inst.negated())
    if inst.k == 1:
        return baseline.decide_single(inst)
    if inst.k == 2:
        return baseline.decide_two_quant(inst)
    return _outer(inst, inst.k - 3, _decide_triple)


def auto_route(inst: Instance) -> str:
    """Name of the route ``auto`` takes for this prefix."""
    if inst.is_existential:
        return "existential"
    if inst.is_universal:
        return "universal"
    if inst.k <= 2:
        return "single" if inst.k == 1 else "two-quant"
    tail = inst.quantifiers[-3:]
    if tail in (ineqdim3.DIRECT_SHAPES | ineqdim3.NEGATED_SHAPES):
        if inst.normal.dimension <= ineqdim3.MAX_DIMENSION:
            return "ineqdim3"
        return "general (dimension above 3)"
    return "general"


def _decide_ineqdim3(inst: Instance) -> bool:
    return _outer(inst, inst.k - 3, ineqdim3.decide_ineqdim3)


def decide_dispatch(inst: Instance, engine: str = "auto", threads: int = THREADS) -> bool:
    """Decide an instance with the requested engine.

    Args:
        inst: bound instance
        engine: brute, baseline, reduction, ineqdim3 or auto
        threads: worker cap for family solving

    Returns:
        Truth value; every applicable engine agrees with brute force
    """
    engines = applicable_engines(inst)
    if engine not in engines:
        shape = "".join("∃" if q is E else "∀" for q in inst.quantifiers)
        raise EngineInapplicableError(
            f"engine '{engine}' is inapplicable to prefix {shape} with "
            f"{inst.normal.dimension} inequalities; applicable: {', '.join(engines)}",
            engines,
        )

    runners = {
        "brute": baseline.brute_decide,
        "baseline": baseline.decide_general,
        "reduction": lambda i: _decide_reduction(i, threads),
        "ineqdim3": _decide_ineqdim3,
        "auto": _decide_auto,
    }
    with metrics.phase(f"decide_{engine}") as timer:
        result = monitor_call(engine, lambda: runners[engine](inst))
    decisions_total.labels(engine=engine).inc()
    decide_latency_ms.labels(engine=engine).observe(timer.elapsed_ms)
    log_event("decide", engine=engine, k=inst.k, result=result)
    return result


# ===============================
# COUNTING
# ===============================

def count_witnesses(inst: Instance, engine: str = "auto", per_first: bool = False) -> WitnessReport:
    """Witness count of an existential instance, optionally per position of the first set.

    ``per_first_element`` maps positions of the first set to their counts.
    """
    if not inst.is_existential:
        raise PrefixError("counting requires existential prefix")
    if engine not in ("brute", "reduction", "auto"):
        raise EngineInapplicableError(
            f"engine '{engine}' cannot count witnesses; applicable: brute, reduction, auto",
            ["brute", "reduction", "auto"],
        )
    use_reduction = engine == "reduction" or (engine == "auto" and inst.k >= 2)
    if use_reduction and inst.k < 2:
        raise EngineInapplicableError("reduction counting needs k >= 2", ["brute", "auto"])
    if per_first and use_reduction and inst.k != 3:
        if engine == "reduction":
            raise PrefixError(f"per-element counting by reduction needs k = 3, got k = {inst.k}")
        use_reduction = False

    with metrics.phase(f"count_{'reduction' if use_reduction else 'brute'}"):
        if not use_reduction:
            per: Optional[Dict[int, int]] = None
            if per_first:
                per = dict(enumerate(baseline.brute_count_per_first(inst)))
                total = sum(per.values())
            else:
                total = baseline.brute_count(inst)
            return WitnessReport(total, per)

        if inst.has_empty_set:
            return WitnessReport(0, {i: 0 for i in range(len(inst.sets[0]))} if per_first else None)
        family = bitreduce.compile_counting(inst, track_first=per_first)
        if per_first:
            counts = bitreduce.count_family_per_first(family, len(inst.sets[0]))
            return WitnessReport(sum(counts), dict(enumerate(counts)))
        return WitnessReport(bitreduce.count_family(family))
