"""
hypersym Data Module
Dataset ingestion (temporal simplex lists and JSON), temporal splitting and
negative k-node-set sampling for higher-order link prediction.
"""

import json
import logging
import math
import os
from dataclasses import dataclass, field
from itertools import combinations
from typing import Any, Dict, Iterable, List, Optional, Sequence, TextIO, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

import hypersym_config as config
import hypersym_utility as utility
from hypersym_core import Edge, Hypergraph, build

logger = logging.getLogger(__name__)

Stream = Union[str, TextIO, Iterable[str]]
Seed = Union[int, np.random.Generator, None]


class DataFormatError(ValueError):
    """Malformed dataset input"""


@dataclass
class TemporalHypergraph:
    """A hypergraph with one timestamp per hyperedge and the original vertex labels"""
    hypergraph: Hypergraph
    timestamps: np.ndarray
    labels: List[int] = field(default_factory=list)

    def __post_init__(self):
        self.timestamps = np.asarray(self.timestamps, dtype=np.float64)
        if len(self.timestamps) != self.hypergraph.m:
            raise DataFormatError(f"Got {len(self.timestamps)} timestamps for {self.hypergraph.m} hyperedges")
        if not np.all(np.isfinite(self.timestamps)):
            raise DataFormatError("Timestamps must be finite")
        if not self.labels:
            self.labels = list(range(self.hypergraph.n))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TemporalHypergraph):
            return NotImplemented
        return (self.hypergraph == other.hypergraph and self.labels == other.labels
                and np.array_equal(self.timestamps, other.timestamps))

    __hash__ = None


class SplitSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    train_pct: float = Field(default_factory=lambda: config.config.train_pct, gt=0.0, lt=1.0)
    val_pct: float = Field(default_factory=lambda: config.config.val_pct, gt=0.0, le=1.0)
    target_size: int = Field(default_factory=lambda: config.config.target_size, ge=2)
    negative_ratio: float = Field(default_factory=lambda: config.config.negative_ratio, ge=0.0)
    seed: int = Field(default_factory=lambda: config.config.default_seed, ge=0)

    @model_validator(mode="after")
    def _check_order(self) -> "SplitSpec":
        if not self.train_pct < self.val_pct:
            raise ValueError(f"train_pct ({self.train_pct}) must be below val_pct ({self.val_pct})")
        return self


@dataclass
class SplitPart:
    observed: List[Edge]
    positives: List[Edge]
    negatives: List[Edge]
    shortfall: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "observed": [list(e) for e in self.observed],
            "positives": [list(e) for e in self.positives],
            "negatives": [list(e) for e in self.negatives],
            "shortfall": self.shortfall,
        }


@dataclass
class LinkPredictionSplit:
    train: SplitPart
    val: SplitPart
    test: SplitPart
    train_threshold: float
    val_threshold: float
    spec: SplitSpec

    def parts(self) -> List[Tuple[str, SplitPart]]:
        return [("train", self.train), ("val", self.val), ("test", self.test)]

    def to_dict(self) -> Dict[str, Any]:
        bundle = {name: part.to_dict() for name, part in self.parts()}
        bundle["thresholds"] = {"train": self.train_threshold, "val": self.val_threshold}
        bundle["spec"] = self.spec.model_dump()
        return bundle


@dataclass
class NegativeSample:
    sets: List[Edge]
    shortfall: int = 0
    available: Optional[int] = None

# ----------------- Parsing -----------------

def _read_text(stream: Stream) -> str:
    if isinstance(stream, str):
        return stream
    if hasattr(stream, "read"):
        return stream.read()
    return "\n".join(stream)


def _numbers(stream: Stream, kind: type, name: str) -> List:
    values = []
    for token in _read_text(stream).split():
        try:
            values.append(kind(token))
        except ValueError:
            raise DataFormatError(f"Non-numeric token {token!r} in {name}") from None
    return values


def parse_simplex_list(nverts_stream: Stream, simplices_stream: Stream, times_stream: Stream) -> TemporalHypergraph:
    """Read the three aligned simplex-list streams.

    Vertex labels of the kept hyperedges are renumbered densely in sorted
    order; singleton simplices are dropped and duplicate hyperedges keep the
    earliest timestamp at the position of their first appearance.
    """
    nverts = _numbers(nverts_stream, int, "nverts")
    simplices = _numbers(simplices_stream, int, "simplices")
    times = _numbers(times_stream, float, "times")
    if sum(nverts) != len(simplices):
        raise DataFormatError(f"nverts declares {sum(nverts)} vertex ids but simplices has {len(simplices)}")
    if len(times) != len(nverts):
        raise DataFormatError(f"Got {len(times)} timestamps for {len(nverts)} simplices")
    if any(count < 0 for count in nverts):
        raise DataFormatError("nverts contains a negative count")

    earliest: Dict[Tuple[int, ...], float] = {}
    dropped = 0
    position = 0
    for count, stamp in zip(nverts, times):
        simplex = tuple(sorted(set(simplices[position:position + count])))
        position += count
        if len(simplex) < 2:
            dropped += 1
            continue
        if simplex not in earliest or stamp < earliest[simplex]:
            earliest[simplex] = stamp
    if dropped:
        logger.warning(f"Dropped {dropped} singleton or empty simplices")

    labels = sorted({v for simplex in earliest for v in simplex})
    dense = {label: index for index, label in enumerate(labels)}
    edges = [[dense[v] for v in simplex] for simplex in earliest]
    h = build(len(labels), edges)
    logger.info(f"Parsed simplex list: n={h.n}, m={h.m}, {len(nverts) - h.m - dropped} duplicates merged")
    return TemporalHypergraph(h, np.array(list(earliest.values()), dtype=np.float64), labels)


def emit_simplex_list(th: TemporalHypergraph) -> Tuple[str, str, str]:
    """Write the three simplex-list texts using the original vertex labels"""
    edges = th.hypergraph.edges
    nverts = "".join(f"{len(e)}\n" for e in edges)
    simplices = "".join(f"{th.labels[v]}\n" for e in edges for v in e)
    times = "".join(f"{float(t)!r}\n" for t in th.timestamps.tolist())
    return nverts, simplices, times


def carry_timestamps(th: TemporalHypergraph, h: Hypergraph) -> TemporalHypergraph:
    """Attach th's timestamps to a hypergraph on the same vertices; hyperedges
    th does not contain get its latest timestamp"""
    if h.n != th.hypergraph.n:
        raise ValueError(f"Vertex count changed from {th.hypergraph.n} to {h.n}")
    known = dict(zip(th.hypergraph.edges, th.timestamps.tolist()))
    latest = float(th.timestamps.max()) if len(th.timestamps) else 0.0
    stamps = np.array([known.get(e, latest) for e in h.edges], dtype=np.float64)
    return TemporalHypergraph(h, stamps, list(th.labels))


def simplex_list_paths(prefix: str) -> Tuple[str, str, str]:
    return tuple(f"{prefix}-{part}.txt" for part in ("nverts", "simplices", "times"))


def load_simplex_list(prefix: str) -> TemporalHypergraph:
    paths = simplex_list_paths(prefix)
    for path in paths:
        if not utility.validate_file_path(path):
            raise FileNotFoundError(f"Simplex-list file not found: {path}")
    with open(paths[0], encoding="utf-8") as nverts, open(paths[1], encoding="utf-8") as simplices, \
            open(paths[2], encoding="utf-8") as times:
        return parse_simplex_list(nverts, simplices, times)


def save_simplex_list(th: TemporalHypergraph, prefix: str) -> None:
    for path, text in zip(simplex_list_paths(prefix), emit_simplex_list(th)):
        utility.write_output(text, path)


def hypergraph_from_json(data: Dict[str, Any]) -> TemporalHypergraph:
    """{"n": int, "edges": [[int, ...], ...], "timestamps": [num, ...]?}

    Without timestamps every hyperedge gets its position as an integer
    timestamp. Duplicates keep the earliest timestamp.
    """
    if not isinstance(data, dict) or "n" not in data or "edges" not in data:
        raise DataFormatError("JSON hypergraph needs the keys 'n' and 'edges'")
    raw_edges = data["edges"]
    stamps = data.get("timestamps")
    if stamps is None:
        stamps = list(range(len(raw_edges)))
    if len(stamps) != len(raw_edges):
        raise DataFormatError(f"Got {len(stamps)} timestamps for {len(raw_edges)} hyperedges")
    try:
        n = int(data["n"])
        stamps = [float(t) for t in stamps]
    except (TypeError, ValueError) as e:
        raise DataFormatError(f"Invalid JSON hypergraph: {e}") from None

    h = build(n, raw_edges)
    first_time: Dict[Tuple[int, ...], float] = {}
    for raw, stamp in zip(raw_edges, stamps):
        edge = tuple(sorted(set(int(v) for v in raw)))
        if len(edge) >= 2 and (edge not in first_time or stamp < first_time[edge]):
            first_time[edge] = stamp
    return TemporalHypergraph(h, np.array([first_time[e] for e in h.edges], dtype=np.float64))


def hypergraph_to_json(th: Union[TemporalHypergraph, Hypergraph]) -> Dict[str, Any]:
    if isinstance(th, Hypergraph):
        return {"n": th.n, "edges": [list(e) for e in th.edges]}
    return {
        "n": th.hypergraph.n,
        "edges": [list(e) for e in th.hypergraph.edges],
        "timestamps": th.timestamps.tolist(),
    }


def load_json_hypergraph(path: str) -> TemporalHypergraph:
    try:
        with open(path, encoding="utf-8") as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise DataFormatError(f"Invalid JSON in {path}: {e}") from None
    return hypergraph_from_json(data)


def dump_json_hypergraph(th: Union[TemporalHypergraph, Hypergraph], path: Optional[str] = None) -> str:
    text = utility.dumps_json(hypergraph_to_json(th))
    if path:
        utility.write_output(text, path)
    return text


def detect_format(path: str, fmt: str = "auto") -> str:
    if fmt != "auto":
        return fmt
    return "json" if path.endswith(".json") or os.path.isfile(path) else "simplex"


def dataset_exists(path: str) -> bool:
    return os.path.isfile(path) or os.path.isfile(simplex_list_paths(path)[0])


def load_dataset(path: str, fmt: str = "auto") -> TemporalHypergraph:
    """Load a JSON file or a simplex-list prefix (``<prefix>-nverts.txt`` etc.)"""
    fmt = detect_format(path, fmt)
    if fmt == "json":
        if not utility.validate_file_path(path):
            raise FileNotFoundError(f"Dataset file not found: {path}")
        return load_json_hypergraph(path)
    if fmt == "simplex":
        return load_simplex_list(path)
    raise DataFormatError(f"Unknown dataset format {fmt!r}")

# ----------------- Splitting -----------------

def percentile_nearest_rank(values: Sequence[float], pct: float) -> float:
    """Smallest value with at least pct of the values at or below it"""
    ordered = sorted(values)
    if not ordered:
        raise ValueError("Percentile of an empty sequence")
    rank = max(1, math.ceil(round(pct * len(ordered), 9)))
    return float(ordered[min(rank, len(ordered)) - 1])


def negative_sample(h: Hypergraph, k: int, count: int, seed: Seed = None,
                    exact_limit: Optional[int] = None, rejection_factor: Optional[int] = None) -> NegativeSample:
    """Distinct k-sets of vertices that are not hyperedges.

    Small search spaces with few valid sets are enumerated exactly; otherwise
    uniform rejection sampling runs with a budget of rejection_factor * count
    draws. Any shortfall is reported.
    """
    if k < 1 or k > h.n:
        raise ValueError(f"Cannot sample {k}-sets from {h.n} vertices")
    exact_limit = config.config.exact_negative_limit if exact_limit is None else exact_limit
    rejection_factor = config.config.rejection_factor if rejection_factor is None else rejection_factor
    rng = np.random.default_rng(seed)
    existing = {e for e in h.edges if len(e) == k}
    total = math.comb(h.n, k)
    available: Optional[int] = None
    if total <= exact_limit:
        available = total - len(existing)

    if available is not None and available <= 2 * count:
        pool = [c for c in combinations(range(h.n), k) if c not in existing]
        chosen = rng.choice(len(pool), size=min(count, len(pool)), replace=False) if pool else []
        sets = [pool[i] for i in chosen]
    else:
        picked: Dict[Edge, None] = {}
        budget = rejection_factor * count
        draws = 0
        while len(picked) < count and draws < budget:
            candidate = tuple(sorted(rng.choice(h.n, size=k, replace=False).tolist()))
            draws += 1
            if candidate not in existing:
                picked.setdefault(candidate, None)
        sets = list(picked)

    shortfall = count - len(sets)
    if shortfall:
        logger.warning(f"Negative sampling short by {shortfall} of {count} {k}-sets"
                       + (f" (only {available} exist)" if available is not None else ""))
    return NegativeSample(sets, shortfall, available)


def temporal_split(th: TemporalHypergraph, spec: Optional[SplitSpec] = None) -> LinkPredictionSplit:
    """Split hyperedges by timestamp percentiles and pick targets per split.

    train: t <= P(train_pct), val: P(train_pct) < t <= P(val_pct), test: the
    rest. Half of each split's size-k hyperedges (seeded shuffle) become
    positives; the others stay observed. Negatives are k-sets that form no
    hyperedge anywhere in the dataset.
    """
    spec = spec or SplitSpec()
    h = th.hypergraph
    if h.m == 0:
        raise DataFormatError("Cannot split a hypergraph without hyperedges")
    stamps = th.timestamps
    train_cut = percentile_nearest_rank(stamps, spec.train_pct)
    val_cut = percentile_nearest_rank(stamps, spec.val_pct)
    masks = [stamps <= train_cut, (stamps > train_cut) & (stamps <= val_cut), stamps > val_cut]

    k = spec.target_size
    streams = np.random.SeedSequence(spec.seed).spawn(len(masks))
    parts = []
    for mask, stream in zip(masks, streams):
        rng = np.random.default_rng(stream)
        edge_ids = np.flatnonzero(mask)
        targets = [e for e in edge_ids.tolist() if h.edge_sizes[e] == k]
        order = rng.permutation(len(targets))
        positive_ids = {targets[i] for i in order[:len(targets) // 2]}
        observed = [h.edge(e) for e in edge_ids.tolist() if e not in positive_ids]
        positives = [h.edge(targets[i]) for i in order[:len(targets) // 2]]
        wanted = int(round(spec.negative_ratio * len(positives)))
        if wanted and k <= h.n:
            negatives = negative_sample(h, k, wanted, rng)
        else:
            negatives = NegativeSample([], wanted)
        parts.append(SplitPart(observed, positives, negatives.sets, negatives.shortfall))

    for name, part in zip(("train", "val", "test"), parts):
        logger.info(f"{name}: {len(part.observed)} observed, {len(part.positives)} positives, "
                    f"{len(part.negatives)} negatives")
    return LinkPredictionSplit(parts[0], parts[1], parts[2], train_cut, val_cut, spec)
