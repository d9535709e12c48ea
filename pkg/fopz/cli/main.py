"""Batch command-line front end.

Results go to stdout as one line of JSON; diagnostics go to stderr as JSON
lines. Exit codes: 0 true or success, 1 false, 2 error.
"""

import argparse
import json
import logging
import sys
import traceback
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

from prometheus_client import generate_latest
from pydantic import BaseModel, ValidationError

from fopz.config.settings import DEFAULT_ENGINE, ENGINES, THREADS
from fopz.models.schemas import (
    HausdorffInput,
    MaxConvInput,
    ParetoInput,
    RunManifest,
    SumsetInput,
)
from fopz.scripts import benchmark, generate
from fopz.services import bitreduce, decompose, ksum, problems
from fopz.services import dataset as dataset_io
from fopz.services.dispatch import applicable_engines, auto_route, count_witnesses, decide_dispatch
from fopz.services.formula import parse
from fopz.services.geometry import (
    Box,
    CubeSet,
    arrangement_sample_points,
    boxes_to_json,
    cube_union_contains,
)
from fopz.services.metrics import metrics
from fopz.services.monitoring import configure_logging, log_event
from fopz.utils import ksum_text
from fopz.utils.errors import DatasetError, EngineInapplicableError, FopzError, GeometryError

EXIT_TRUE = 0
EXIT_FALSE = 1
EXIT_ERROR = 2


class Outcome:
    """Payload printed on stdout, exit code and manifest fields of one command."""

    def __init__(self, payload: Dict[str, Any], code: int = EXIT_TRUE, inputs: Sequence[str] = (),
                 engine: Optional[str] = None, seed: Optional[int] = None, notes: Sequence[str] = ()):
        self.payload = payload
        self.code = code
        self.inputs = list(inputs)
        self.engine = engine
        self.seed = seed
        self.notes = list(notes)


def _verdict(result: bool, **extra: Any) -> Outcome:
    return Outcome({"result": result, **extra}, EXIT_TRUE if result else EXIT_FALSE)


# ------------------------------------------------------
# Input helpers
# ------------------------------------------------------
def _read_text(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise DatasetError(f"cannot read {path}: {e}") from e


def _formula_text(value: str) -> str:
    """A path when one exists, otherwise the formula itself."""
    path = Path(value)
    return _read_text(value) if path.is_file() else value


def _load_model(model: type, path: str) -> BaseModel:
    try:
        return model.model_validate_json(_read_text(path))
    except ValidationError as e:
        raise DatasetError(f"malformed {model.__name__} in {path}: {e.errors()[0]['msg']}") from e


def _instance(args):
    with metrics.phase("parse"):
        formula = parse(_formula_text(args.formula))
    with metrics.phase("bind"):
        return dataset_io.bind(formula, dataset_io.load(args.data))


# ------------------------------------------------------
# Formula commands
# ------------------------------------------------------
def cmd_decide(args) -> Outcome:
    inst = _instance(args)
    notes = [f"applicable engines: {', '.join(applicable_engines(inst))}"]
    if args.engine == "auto":
        notes.append(f"auto route: {auto_route(inst)}")
    outcome = _verdict(decide_dispatch(inst, args.engine, args.threads))
    outcome.inputs, outcome.engine, outcome.notes = [args.formula, args.data], args.engine, notes
    return outcome


def cmd_count(args) -> Outcome:
    inst = _instance(args)
    report = count_witnesses(inst, args.engine, per_first=args.per_first)
    payload: Dict[str, Any] = {"count": report.total}
    if report.per_first_element is not None:
        payload["per_first"] = [report.per_first_element[i] for i in range(len(inst.sets[0]))]
    return Outcome(payload, inputs=[args.formula, args.data], engine=args.engine)


def cmd_reduce(args) -> Outcome:
    inst = _instance(args)
    with metrics.phase("compile"):
        if args.mode == "decision":
            family = bitreduce.compile_decision(inst)
        else:
            family = bitreduce.compile_counting(inst)
    with metrics.phase("write"):
        manifest = bitreduce.write_family(family, args.out)
    payload = {"mode": family.mode, "k": family.k, "instances": len(family), "manifest": str(manifest)}
    return Outcome(payload, inputs=[args.formula, args.data])


# ------------------------------------------------------
# k-SUM commands
# ------------------------------------------------------
def cmd_ksum(args) -> Outcome:
    path = Path(args.path)
    if path.is_dir():
        family = bitreduce.read_family(path)
        with metrics.phase("solve"):
            if args.action == "solve":
                return _verdict(bitreduce.solve_family(family, args.threads), instances=len(family))
            return Outcome({"count": bitreduce.count_family(family), "instances": len(family)}, inputs=[args.path])

    inst = ksum_text.read(path)
    with metrics.phase("solve"):
        if args.action == "solve":
            outcome = _verdict(ksum.solve(inst))
        elif args.theta is not None:
            outcome = Outcome({"count": ksum.count_heavylight(inst, args.theta)})
        else:
            outcome = Outcome({"count": ksum.count(inst)})
    outcome.inputs = [args.path]
    return outcome


# ------------------------------------------------------
# Geometry commands
# ------------------------------------------------------
def _rects_from_file(path: str) -> List[Box]:
    try:
        raw = json.loads(_read_text(path))
    except json.JSONDecodeError as e:
        raise GeometryError(f"malformed rectangle file {path}: {e}") from e
    if not isinstance(raw, dict) or "rects" not in raw:
        raise GeometryError('rectangle file must be {"rects": [[x0, y0, x1, y1], ...]}')
    rects = []
    for r in raw["rects"]:
        if len(r) != 4 or not all(isinstance(x, int) for x in r):
            raise GeometryError(f"rectangle {r} must be four integers")
        rects.append(Box.closed((r[0], r[1]), (r[2], r[3])))
    return rects


def cmd_geom(args) -> Outcome:
    payload: Dict[str, Any] = {}
    if args.action == "decompose2d":
        rects = _rects_from_file(args.path)
        with metrics.phase("decompose"):
            boxes = decompose.decompose_rectilinear_2d(rects)
        if args.verify:
            with metrics.phase("verify"):
                samples = arrangement_sample_points(rects)
                payload["verified"] = decompose.partition_holds(
                    boxes, lambda p: any(r.contains(p) for r in rects), samples
                )
    else:
        cubes = CubeSet.from_json(_read_text(args.path))
        with metrics.phase("decompose"):
            boxes = decompose.decompose_cubes_3d(cubes)
        if args.verify:
            with metrics.phase("verify"):
                samples = arrangement_sample_points(cubes.boxes())
                payload["verified"] = decompose.partition_holds(
                    boxes, lambda p: cube_union_contains(cubes, p), samples
                )
    payload["count"] = len(boxes)
    payload["boxes"] = json.loads(boxes_to_json(boxes))
    code = EXIT_FALSE if payload.get("verified") is False else EXIT_TRUE
    return Outcome(payload, code, inputs=[args.path])


# ------------------------------------------------------
# Problem commands
# ------------------------------------------------------
def cmd_pareto(args) -> Outcome:
    data = _load_model(ParetoInput, args.path)
    if args.action == "compute":
        front = problems.pareto_compute(data.A, data.B)
        return Outcome({"C": [list(p) for p in front], "size": len(front)}, inputs=[args.path])
    if data.C is None:
        raise DatasetError("pareto verify needs C")
    if args.extended:
        verdict = problems.pareto_verify_extended(data.A, data.B, data.C)
        return _verdict(
            verdict.is_pareto_sum,
            inclusion=verdict.inclusion,
            dominance=verdict.dominance,
            minimality=verdict.minimality,
        )
    return _verdict(problems.pareto_verify(data.A, data.B, data.C, cross_check=args.cross_check))


def cmd_hausdorff(args) -> Outcome:
    data = _load_model(HausdorffInput, args.path)
    result = problems.hausdorff_n_translations(data.A, data.B, data.C, data.gamma, args.engine)
    outcome = _verdict(result)
    outcome.inputs, outcome.engine = [args.path], args.engine
    return outcome


def cmd_maxconv(args) -> Outcome:
    data = _load_model(MaxConvInput, args.path)
    report = problems.maxconv_report(data.A, data.B, data.C, args.engine)
    outcome = _verdict(
        report.direct,
        exists_forall_exists=report.exists_forall_exists,
        forall_exists_exists=report.forall_exists_exists,
    )
    outcome.notes = ["the exists-forall-exists encoding detects a violated index; its answer is negated"]
    outcome.inputs, outcome.engine = [args.path], args.engine
    return outcome


def cmd_sumset(args) -> Outcome:
    data = _load_model(SumsetInput, args.path)
    if args.via_formula:
        result = problems.sumset_approx_encoding(data.A, data.B, data.C, data.t).decide(args.engine)
    else:
        result = problems.sumset_approx(data.A, data.B, data.C, data.t)
    return _verdict(result, inclusion=problems.sumset_inclusion(data.A, data.B, data.C))


# ------------------------------------------------------
# Generation and benchmarking
# ------------------------------------------------------
def _write(path: str, text: str):
    Path(path).write_text(text + "\n", encoding="utf-8")


def cmd_gen(args) -> Outcome:
    generated = generate.generate_problem(args.problem, args.n, args.seed, d=args.d)
    text = json.dumps(generated.payload, sort_keys=True, separators=(",", ":"))
    if args.formula_out and generated.formula:
        _write(args.formula_out, generated.formula)
    if args.out:
        _write(args.out, text)
        payload = {"problem": args.problem, "out": args.out}
    else:
        payload = dict(generated.payload)
    if generated.formula and not args.formula_out:
        payload["formula"] = generated.formula
    return Outcome(payload, seed=args.seed)


def _sizes(text: str) -> List[int]:
    try:
        sizes = [int(part) for part in text.replace(",", " ").split()]
    except ValueError as e:
        raise DatasetError(f"sizes must be integers: {text}") from e
    if not sizes or any(n < 1 for n in sizes):
        raise DatasetError("sizes must be positive integers")
    return sizes


def cmd_bench(args) -> Outcome:
    df = benchmark.run_benchmark(args.engine, _sizes(args.sizes), args.seed, args.repeats)
    if args.csv:
        df.to_csv(args.csv, index=False)
    if args.metrics_out:
        Path(args.metrics_out).write_bytes(generate_latest())
    summary = benchmark.summarize(df)
    payload = {
        "engine": args.engine,
        "runs": len(df),
        "avg_ms": {str(int(row.n)): round(float(row.avg_ms), 3) for row in summary.itertuples()},
    }
    return Outcome(payload, engine=args.engine, seed=args.seed)


# ------------------------------------------------------
# Parser
# ------------------------------------------------------
def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fopz", description="FOP_Z model checker and k-SUM reduction compiler")
    parser.add_argument("--manifest", help="write a run manifest JSON to this file")
    parser.add_argument("--threads", type=int, default=THREADS, help="worker cap for family solving")
    parser.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING or ERROR")
    sub = parser.add_subparsers(dest="command", required=True)

    def formula_command(name: str, handler: Callable, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--formula", required=True, help="formula file, or the formula text itself")
        p.add_argument("--data", required=True, help="dataset JSON file")
        p.set_defaults(handler=handler)
        return p

    p = formula_command("decide", cmd_decide, "decide a formula on a dataset")
    p.add_argument("--engine", choices=ENGINES, default=DEFAULT_ENGINE)

    p = formula_command("count", cmd_count, "count witnesses of an existential formula")
    p.add_argument("--engine", choices=["brute", "reduction", "auto"], default="auto")
    p.add_argument("--per-first", action="store_true", help="also count per position of the first set")

    p = formula_command("reduce", cmd_reduce, "compile an existential formula into a k-SUM family")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--mode", choices=["decision", "counting"], default="decision")

    p = sub.add_parser("ksum", help="solve or count a k-SUM file or an emitted family directory")
    p.add_argument("action", choices=["solve", "count"])
    p.add_argument("path")
    p.add_argument("--theta", type=int, default=None, help="heavy-light threshold for counting")
    p.set_defaults(handler=cmd_ksum)

    p = sub.add_parser("geom", help="decompose rectangle or cube unions into disjoint boxes")
    p.add_argument("action", choices=["decompose2d", "decompose3d"])
    p.add_argument("path")
    p.add_argument("--verify", action="store_true", help="check the partition on arrangement samples")
    p.set_defaults(handler=cmd_geom)

    p = sub.add_parser("pareto", help="verify or compute Pareto sums")
    p.add_argument("action", choices=["verify", "compute"])
    p.add_argument("path")
    p.add_argument("--extended", action="store_true", help="also check inclusion and minimality")
    p.add_argument("--cross-check", action="store_true", help="compare with the formula route")
    p.set_defaults(handler=cmd_pareto)

    p = sub.add_parser("hausdorff", help="Hausdorff distance under translations")
    p.add_argument("path")
    p.add_argument("--engine", choices=ENGINES, default=DEFAULT_ENGINE)
    p.set_defaults(handler=cmd_hausdorff)

    p = sub.add_parser("maxconv", help="(max,+) convolution lower bound")
    p.add_argument("path")
    p.add_argument("--engine", choices=ENGINES, default=DEFAULT_ENGINE)
    p.set_defaults(handler=cmd_maxconv)

    p = sub.add_parser("sumset-approx", help="additive sumset approximation")
    p.add_argument("path")
    p.add_argument("--via-formula", action="store_true", help="decide the formula encoding instead")
    p.add_argument("--engine", choices=ENGINES, default=DEFAULT_ENGINE)
    p.set_defaults(handler=cmd_sumset)

    p = sub.add_parser("gen", help="generate a random problem input")
    p.add_argument("problem", choices=generate.PROBLEMS)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--d", type=int, default=2, help="vector dimension where applicable")
    p.add_argument("--out", help="write the input here instead of stdout")
    p.add_argument("--formula-out", help="write the formula text here")
    p.set_defaults(handler=cmd_gen)

    p = sub.add_parser("bench", help="time an engine over sizes")
    p.add_argument("--engine", choices=ENGINES, default=DEFAULT_ENGINE)
    p.add_argument("--sizes", required=True, help='e.g. "256,512,1024"')
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--repeats", type=int, default=1)
    p.add_argument("--csv", help="CSV output file")
    p.add_argument("--metrics-out", help="write Prometheus metrics text here")
    p.set_defaults(handler=cmd_bench)
    return parser


def _emit(payload: Dict[str, Any]):
    sys.stdout.write(json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n")
    sys.stdout.flush()


def _write_manifest(path: str, args, outcome: Outcome):
    manifest = RunManifest(
        command=args.command,
        inputs=outcome.inputs,
        engine=outcome.engine,
        seed=outcome.seed,
        timings=metrics.snapshot(),
        result=outcome.payload,
        notes=outcome.notes,
    )
    _write(path, json.dumps(manifest.model_dump(), sort_keys=True, indent=2))


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Execute one command and return its exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_TRUE if e.code in (0, None) else EXIT_ERROR

    configure_logging(args.log_level)
    metrics.reset()
    try:
        outcome: Outcome = args.handler(args)
    except FopzError as e:
        error: Dict[str, Any] = {"error": str(e), "type": type(e).__name__}
        if isinstance(e, EngineInapplicableError):
            error["applicable"] = e.applicable
        log_event("command_failed", command=args.command, error=str(e))
        _emit(error)
        return EXIT_ERROR
    except Exception as e:
        log_event("command_crashed", level=logging.ERROR, command=args.command,
                  error=repr(e), traceback=traceback.format_exc())
        _emit({"error": f"internal error: {e}", "type": type(e).__name__})
        return EXIT_ERROR

    _emit(outcome.payload)
    if args.manifest:
        _write_manifest(args.manifest, args, outcome)
    log_event("command_done", command=args.command, exit_code=outcome.code, timings=metrics.snapshot())
    return outcome.code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
