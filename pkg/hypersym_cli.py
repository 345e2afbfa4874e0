"""
hypersym Command Line
Single entry point wiring ingestion, refinement, symmetry finding,
augmentation, splitting, statistics and the oracle suite into batch runs.
"""

import argparse
import asyncio
import io
import json
import logging
import os
import sys
import time
from typing import Any, Callable, Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

import hypersym_config as config
import hypersym_data as data
import hypersym_utility as utility
from hypersym_augment import AugmentationPlan, Probability, augment, solve_unbiased
from hypersym_core import Hypergraph, connected_components
from hypersym_oracle import OracleCapError
from hypersym_refine import CONVERGE, color_classes, gwl1, parse_iterations, wl1_clique
from hypersym_symmetry import SymmetryReport, component_statistics, find_symmetries, write_stats_csv
from hypersym_verify import run_suite

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2

MODE_NAMES = {"attach": "attach_only", "replace": "replace", "sample": "sample"}

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

# ----------------- Run Configuration -----------------

class RunConfig(BaseModel):
    """Validated flags of one invocation"""
    model_config = ConfigDict(frozen=True)

    subcommand: Literal["validate", "refine", "find-symmetry", "augment", "split", "stats", "verify"]
    inputs: List[str] = Field(default_factory=list)
    fmt: Literal["auto", "json", "simplex"] = "auto"
    L: Union[int, Literal["conv"]] = Field(default_factory=lambda: config.config.default_iterations)
    guard: bool = Field(default_factory=lambda: config.config.guard_enabled)
    method: Literal["gwl1", "wl1"] = "gwl1"
    mode: Literal["attach", "replace", "sample"] = "sample"
    p: Probability = 0.0
    q: Union[Probability, List[Probability]] = 1.0
    seed: Optional[int] = Field(default=None, ge=0)
    samples: Optional[int] = Field(default=None, gt=0)
    solve_q: bool = False
    allow_disconnected: bool = False
    train_pct: Optional[float] = None
    val_pct: Optional[float] = None
    target_size: Optional[int] = None
    negative_ratio: Optional[float] = None
    names: List[str] = Field(default_factory=list)
    fixtures: bool = False
    random_cases: Optional[int] = Field(default=None, gt=0)
    output: Optional[str] = None
    strict: bool = False
    threads: int = Field(default_factory=lambda: config.config.threads, ge=1)
    verbosity: int = Field(default=0, ge=0)

    @field_validator("L", mode="before")
    @classmethod
    def _parse_L(cls, value: Any) -> Any:
        budget = parse_iterations(value)
        if budget is None:
            return CONVERGE
        if budget < 1:
            raise ValueError(f"L must be at least 1 or '{CONVERGE}', got {budget}")
        return budget

    @field_validator("q", mode="before")
    @classmethod
    def _parse_q(cls, value: Any) -> Any:
        """A number, or a path to a JSON list with one probability per component"""
        if not isinstance(value, str):
            return value
        try:
            return float(value)
        except ValueError:
            pass
        try:
            with open(value, encoding="utf-8") as f:
                return json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise ValueError(f"--q is neither a probability nor a readable JSON list: {e}") from None

    @model_validator(mode="after")
    def _check_run(self) -> "RunConfig":
        if self.subcommand != "verify" and not self.inputs:
            raise ValueError(f"{self.subcommand} needs --input")
        if self.subcommand not in ("stats", "verify") and len(self.inputs) > 1:
            raise ValueError(f"{self.subcommand} takes a single --input")
        missing = [path for path in self.inputs if not data.dataset_exists(path)]
        if missing:
            raise ValueError(f"Input not found: {', '.join(missing)}")
        if self.strict and self.subcommand in ("augment", "split") and self.seed is None:
            raise ValueError(f"--strict requires an explicit --seed for {self.subcommand}")
        if self.names and len(self.names) != len(self.inputs):
            raise ValueError(f"Got {len(self.names)} names for {len(self.inputs)} inputs")
        return self

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        known = {k: v for k, v in vars(args).items() if k in cls.model_fields and v is not None}
        return cls(**known)

    @property
    def effective_seed(self) -> int:
        return config.config.default_seed if self.seed is None else self.seed


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", dest="inputs", action="append", metavar="PATH",
                        help="JSON hypergraph file or simplex-list prefix")
    common.add_argument("--format", dest="fmt", choices=["auto", "json", "simplex"])
    common.add_argument("--output", metavar="PATH", help="write the result here instead of stdout")
    common.add_argument("--config", dest="config_path", metavar="FILE", help="YAML configuration overlay")
    common.add_argument("--threads", type=int, help="worker cap (default: HYPERSYM_THREADS or 1)")
    common.add_argument("--seed", type=int)
    common.add_argument("--strict", action="store_true", default=None,
                        help="require --seed for randomized subcommands")
    common.add_argument("--L", dest="L", metavar="L", help=f"GWL-1 iterations, an integer >= 1 or '{CONVERGE}'")
    common.add_argument("--no-guard", dest="guard", action="store_false", default=None,
                        help="skip the degree-multiset guard")
    common.add_argument("-v", "--verbose", dest="verbosity", action="count", default=0)

    parser = argparse.ArgumentParser(prog="hypersym", description="Symmetry finding and augmentation for hypergraphs")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    sub.add_parser("validate", parents=[common], help="load a hypergraph and report its structure")

    refine = sub.add_parser("refine", parents=[common], help="color classes per iteration")
    refine.add_argument("--method", choices=["gwl1", "wl1"])

    sub.add_parser("find-symmetry", parents=[common], help="symmetric components as JSON")

    aug = sub.add_parser("augment", parents=[common], help="attach, replace or sample covering hyperedges")
    aug.add_argument("--mode", choices=sorted(MODE_NAMES))
    aug.add_argument("--p", type=float, help="drop probability for hyperedges inside components")
    aug.add_argument("--q", help="attach probability, or a JSON file with one per component")
    aug.add_argument("--samples", type=int, help="Monte Carlo samples for --solve-q")
    aug.add_argument("--solve-q", dest="solve_q", action="store_true", default=None,
                     help="pick q that keeps the expected stationary distribution")
    aug.add_argument("--allow-disconnected", dest="allow_disconnected", action="store_true", default=None)

    split = sub.add_parser("split", parents=[common], help="temporal train/validation/test split")
    split.add_argument("--train-pct", dest="train_pct", type=float)
    split.add_argument("--val-pct", dest="val_pct", type=float)
    split.add_argument("--target-size", dest="target_size", type=int)
    split.add_argument("--negative-ratio", dest="negative_ratio", type=float)

    stats = sub.add_parser("stats", parents=[common], help="component statistics CSV")
    stats.add_argument("--names", nargs="+")

    verify = sub.add_parser("verify", parents=[common], help="run the oracle suite")
    verify.add_argument("--fixtures", action="store_true", default=None)
    verify.add_argument("--random-cases", dest="random_cases", type=int)
    return parser


def configure_logging(verbosity: int) -> None:
    if verbosity >= 2:
        level = logging.DEBUG
    elif verbosity == 1:
        level = logging.INFO
    else:
        level = getattr(logging, str(config.config.log_level).upper(), logging.WARNING)
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr, force=True)

# ----------------- Subcommands -----------------

def _emit(rc: RunConfig, payload: Any) -> None:
    utility.write_output(utility.dumps_json(payload), rc.output)


def _load(rc: RunConfig, path: Optional[str] = None) -> data.TemporalHypergraph:
    path = path or rc.inputs[0]
    start = time.perf_counter()
    th = data.load_dataset(path, rc.fmt)
    logger.info(f"Loaded {path}: n={th.hypergraph.n}, m={th.hypergraph.m} "
                f"in {utility.format_duration(time.perf_counter() - start)}")
    return th


def cmd_validate(rc: RunConfig) -> int:
    th = _load(rc)
    h = th.hypergraph
    parts = connected_components(h)
    sizes: Dict[int, int] = {}
    for size in h.edge_sizes.tolist():
        sizes[size] = sizes.get(size, 0) + 1
    _emit(rc, {
        "n": h.n,
        "m": h.m,
        "nnz": h.nnz,
        "dropped_small": h.dropped_small,
        "dropped_duplicates": h.dropped_duplicates,
        "connected": len(parts) == 1 and h.n > 0,
        "components": len(parts),
        "edge_sizes": sizes,
        "isolated_vertices": int((h.degrees() == 0).sum()),
    })
    return EXIT_OK


def cmd_refine(rc: RunConfig) -> int:
    h = _load(rc).hypergraph
    refiner = gwl1 if rc.method == "gwl1" else wl1_clique
    ch = refiner(h, L=rc.L)
    _emit(rc, {
        "method": ch.method,
        "iterations": ch.iterations,
        "converged_at": ch.converged_at,
        "node_classes": [ch.num_node_classes(i) for i in range(ch.iterations + 1)],
        "classes": [
            [list(vertices) for _, vertices in sorted(color_classes(ch, i).items())]
            for i in range(ch.iterations + 1)
        ],
    })
    return EXIT_OK


def cmd_find_symmetry(rc: RunConfig) -> int:
    h = _load(rc).hypergraph
    _emit(rc, find_symmetries(h, L=rc.L, guard=rc.guard).to_dict())
    return EXIT_OK


def cmd_augment(rc: RunConfig) -> int:
    th = _load(rc)
    h = th.hypergraph
    report = find_symmetries(h, L=rc.L, guard=rc.guard)
    seed = rc.effective_seed
    q: Union[float, List[float]] = rc.q
    solution = None
    if rc.solve_q:
        solution = solve_unbiased(h, report, rc.p, allow_disconnected=rc.allow_disconnected,
                                  n_samples=rc.samples, seed=seed, threads=rc.threads)
        q = solution.q
    plan = AugmentationPlan.for_report(report, p=rc.p, q=q, seed=seed, mode=MODE_NAMES[rc.mode])
    augmented, provenance = augment(h, report, plan)
    if solution is not None:
        provenance["unbiased"] = solution.to_dict()
    result = data.carry_timestamps(th, augmented)

    if rc.output:
        if data.detect_format(rc.inputs[0], rc.fmt) == "simplex":
            data.save_simplex_list(result, rc.output)
        else:
            data.dump_json_hypergraph(result, rc.output)
        utility.write_output(utility.dumps_json(provenance))
    else:
        utility.write_output(utility.dumps_json({
            "hypergraph": data.hypergraph_to_json(result),
            "provenance": provenance,
        }))
    return EXIT_OK


def cmd_split(rc: RunConfig) -> int:
    th = _load(rc)
    overrides = {
        name: getattr(rc, name)
        for name in ("train_pct", "val_pct", "target_size", "negative_ratio")
        if getattr(rc, name) is not None
    }
    spec = data.SplitSpec(seed=rc.effective_seed, **overrides)
    bundle = data.temporal_split(th, spec).to_dict()
    bundle["labels"] = th.labels
    _emit(rc, bundle)
    return EXIT_OK


async def _symmetry_reports(rc: RunConfig) -> List[Tuple[SymmetryReport, Hypergraph]]:
    """Find symmetries for every input, at most rc.threads at a time"""
    semaphore = asyncio.Semaphore(rc.threads)

    async def one(index: int, path: str) -> Tuple[int, SymmetryReport, Hypergraph]:
        async with semaphore:
            start = time.perf_counter()
            th = await asyncio.to_thread(_load, rc, path)
            report = await asyncio.to_thread(find_symmetries, th.hypergraph, None, rc.L, rc.guard)
            logger.info(f"Dataset {index + 1}/{len(rc.inputs)} ({path}) done in "
                        f"{utility.format_duration(time.perf_counter() - start)}")
            return index, report, th.hypergraph

    results: List[Optional[Tuple[SymmetryReport, Hypergraph]]] = [None] * len(rc.inputs)
    for finished in asyncio.as_completed([one(i, path) for i, path in enumerate(rc.inputs)]):
        index, report, h = await finished
        results[index] = (report, h)
    return results


def cmd_stats(rc: RunConfig) -> int:
    results = asyncio.run(_symmetry_reports(rc))
    names = rc.names or [os.path.basename(path) for path in rc.inputs]
    rows = component_statistics([r for r, _ in results], [h for _, h in results], names)
    buffer = io.StringIO()
    write_stats_csv(rows, buffer)
    utility.write_output(buffer.getvalue(), rc.output)
    return EXIT_OK


def cmd_verify(rc: RunConfig) -> int:
    extra = [(os.path.basename(path), _load(rc, path).hypergraph) for path in rc.inputs]
    results = run_suite(extra=extra, random_cases=rc.random_cases, seed=rc.effective_seed,
                        fixtures=rc.fixtures or not rc.inputs)
    utility.write_output("\n".join(r.summary_line() for r in results))
    flagged = [r for r in results if not r.passed]
    if rc.output:
        utility.write_output(utility.dumps_json([r.to_dict() for r in results]), rc.output)
    if flagged:
        utility.write_output(utility.dumps_json([r.to_dict() for r in flagged]))
    if any(r.blocking for r in flagged):
        return EXIT_VERIFY_FAILED
    return EXIT_OK


COMMANDS: Dict[str, Callable[[RunConfig], int]] = {
    "validate": cmd_validate,
    "refine": cmd_refine,
    "find-symmetry": cmd_find_symmetry,
    "augment": cmd_augment,
    "split": cmd_split,
    "stats": cmd_stats,
    "verify": cmd_verify,
}

# ----------------- Main Execution -----------------

def run(argv: Optional[List[str]] = None) -> int:
    """Parse argv, run one subcommand and return the exit code"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE

    previous = config.config
    verbosity = args.verbosity or 0
    try:
        if args.config_path:
            config.config = config.load_config_from_yaml(args.config_path)
        configure_logging(verbosity)
        rc = RunConfig.from_args(args)
        return COMMANDS[rc.subcommand](rc)
    except (ValueError, OSError, OracleCapError) as e:
        logger.error(f"{args.subcommand} failed: {e}", exc_info=verbosity >= 2)
        return EXIT_USAGE
    finally:
        config.config = previous


def main() -> None:
    try:
        sys.exit(run())
    except KeyboardInterrupt:
        logger.info("Interrupted by user")
        sys.exit(EXIT_USAGE)


if __name__ == "__main__":
    main()
