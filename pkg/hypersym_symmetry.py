"""
hypersym Symmetry Module
Finds maximal connected induced subhypergraphs whose vertices share one
L-GWL-1 color, with the optional degree-multiset guard, and measures
component statistics.
"""

import csv
import logging
import time
from dataclasses import dataclass
from typing import Any, Dict, Iterable, List, Optional, Sequence, Set, TextIO, Tuple, Union

import numpy as np

import hypersym_config as config
from hypersym_core import Hypergraph, components_of_edges
from hypersym_fixtures import synthetic_hypergraph
from hypersym_refine import CONVERGE, ColorHistory, Iterations, NodeAttributes, gwl1, parse_iterations

logger = logging.getLogger(__name__)

STATS_HEADER = ["dataset", "n", "m", "components", "frac_ge3", "mean_size", "median_size", "max_size"]

MIN_COMPONENT_SIZE = 3


@dataclass(frozen=True)
class SymmetricComponent:
    """One element of R_V with the hyperedges it contributes to R_E"""
    class_id: int
    vertices: Tuple[int, ...]
    edge_ids: Tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.vertices)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "class_id": self.class_id,
            "vertices": list(self.vertices),
            "edge_ids": list(self.edge_ids),
            "size": self.size,
        }


@dataclass(frozen=True)
class SymmetryReport:
    components: Tuple[SymmetricComponent, ...]
    iterations: Optional[int]
    guard_enabled: bool
    components_examined: int = 0
    guard_rejections: int = 0
    converged_at: Optional[int] = None

    def __len__(self) -> int:
        return len(self.components)

    @property
    def vertex_sets(self) -> List[Tuple[int, ...]]:
        return [c.vertices for c in self.components]

    @property
    def edge_ids(self) -> Tuple[int, ...]:
        """R_E: every hyperedge lying inside some component, sorted"""
        return tuple(sorted(e for c in self.components for e in c.edge_ids))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "components": [c.to_dict() for c in self.components],
            "iterations": CONVERGE if self.iterations is None else self.iterations,
            "guard_enabled": self.guard_enabled,
            "components_examined": self.components_examined,
            "guard_rejections": self.guard_rejections,
            "converged_at": self.converged_at,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SymmetryReport":
        iterations = data.get("iterations", CONVERGE)
        return cls(
            components=tuple(
                SymmetricComponent(int(c["class_id"]), tuple(c["vertices"]), tuple(c.get("edge_ids", [])))
                for c in data.get("components", [])
            ),
            iterations=None if iterations == CONVERGE else int(iterations),
            guard_enabled=bool(data.get("guard_enabled", True)),
            components_examined=int(data.get("components_examined", 0)),
            guard_rejections=int(data.get("guard_rejections", 0)),
            converged_at=data.get("converged_at"),
        )


def _monochromatic_edges(h: Hypergraph, colors: np.ndarray) -> np.ndarray:
    if h.m == 0:
        return np.zeros(0, dtype=bool)
    ptr = h.incidence_t.indptr
    member_colors = colors[h.incidence_t.indices]
    return np.minimum.reduceat(member_colors, ptr[:-1]) == np.maximum.reduceat(member_colors, ptr[:-1])


def _degree_multisets(h: Hypergraph, degrees: np.ndarray, sizes: Set[int]) -> Set[Tuple[int, ...]]:
    """E_deg restricted to hyperedges whose size is in ``sizes``"""
    ptr, idx = h.incidence_t.indptr, h.incidence_t.indices
    found: Set[Tuple[int, ...]] = set()
    for size in sizes:
        rows = np.flatnonzero(h.edge_sizes == size)
        if not len(rows):
            continue
        table = np.sort(degrees[idx[ptr[rows][:, None] + np.arange(size)]], axis=1)
        found.update(map(tuple, table.tolist()))
    return found


def find_symmetries(h: Hypergraph, x: Optional[Union[NodeAttributes, Sequence]] = None,
                    L: Iterations = None, guard: Optional[bool] = None,
                    history: Optional[ColorHistory] = None) -> SymmetryReport:
    """Discover the symmetric components of h.

    For every L-GWL-1 color c, the induced subhypergraph on the vertices of
    color c keeps exactly the monochromatic hyperedges of color c, so the
    components of all color classes are the components of (V, monochromatic
    hyperedges). Components with at least three vertices are reported; with
    the guard on, a component whose degree multiset equals that of an
    existing hyperedge is skipped.
    """
    if L is None:
        L = config.config.default_iterations
    if guard is None:
        guard = config.config.guard_enabled
    ch = history if history is not None else gwl1(h, x, L)
    colors = ch.final_node_colors

    mono = _monochromatic_edges(h, colors)
    parts = components_of_edges(h, mono)

    candidates = [(label, vertices) for label, vertices in enumerate(parts.vertex_sets)
                  if len(vertices) >= MIN_COMPONENT_SIZE]
    degrees = h.degrees()
    e_deg: Set[Tuple[int, ...]] = set()
    if guard and candidates:
        e_deg = _degree_multisets(h, degrees, {len(vertices) for _, vertices in candidates})

    edge_order = np.argsort(parts.edge_labels, kind="stable")
    sorted_labels = parts.edge_labels[edge_order]

    components: List[SymmetricComponent] = []
    rejections = 0
    for label, vertices in candidates:
        if guard and tuple(sorted(degrees[list(vertices)].tolist())) in e_deg:
            rejections += 1
            logger.debug(f"Guard rejected component {list(vertices)}")
            continue
        lo, hi = np.searchsorted(sorted_labels, [label, label + 1])
        edge_ids = tuple(sorted(edge_order[lo:hi].tolist()))
        components.append(SymmetricComponent(int(colors[vertices[0]]), tuple(vertices), edge_ids))

    logger.info(
        f"Found {len(components)} symmetric components among {len(parts)} "
        f"(guard {'on' if guard else 'off'}, {rejections} rejected)"
    )
    iterations = parse_iterations(L)
    return SymmetryReport(tuple(components), iterations, bool(guard), len(parts), rejections, ch.converged_at)

# ----------------- Statistics -----------------

@dataclass
class StatsRow:
    dataset: str
    n: int
    m: int
    components: int
    frac_ge3: float
    mean_size: float
    median_size: float
    max_size: int

    def as_list(self) -> List[Any]:
        return [self.dataset, self.n, self.m, self.components, self.frac_ge3,
                self.mean_size, self.median_size, self.max_size]


def component_statistics(reports: Sequence[SymmetryReport], hs: Sequence[Hypergraph],
                         names: Optional[Sequence[str]] = None) -> List[StatsRow]:
    """Per-dataset component measurements: fraction of examined color-class
    components that were reported, and the size distribution of the reported ones"""
    if len(reports) != len(hs):
        raise ValueError(f"Got {len(reports)} reports for {len(hs)} hypergraphs")
    if names is None:
        names = [f"dataset{i}" for i in range(len(hs))]
    rows = []
    for name, report, h in zip(names, reports, hs):
        sizes = np.array([c.size for c in report.components], dtype=np.float64)
        examined = report.components_examined
        rows.append(StatsRow(
            dataset=name,
            n=h.n,
            m=h.m,
            components=examined,
            frac_ge3=float(len(sizes) / examined) if examined else 0.0,
            mean_size=float(sizes.mean()) if len(sizes) else 0.0,
            median_size=float(np.median(sizes)) if len(sizes) else 0.0,
            max_size=int(sizes.max()) if len(sizes) else 0,
        ))
    return rows


def write_stats_csv(rows: Iterable[StatsRow], stream: TextIO) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(STATS_HEADER)
    for row in rows:
        writer.writerow(row.as_list())

# ----------------- Scaling -----------------

def scaling_profile(nnz_targets: Sequence[int], L: Iterations = 2, seed: int = 0,
                    guard: bool = True) -> List[Tuple[int, float]]:
    """Wall time of find_symmetries on synthetic hypergraphs of growing size"""
    points = []
    for target in nnz_targets:
        h = synthetic_hypergraph(target, seed)
        start = time.perf_counter()
        find_symmetries(h, L=L, guard=guard)
        elapsed = time.perf_counter() - start
        logger.info(f"find_symmetries on nnz={h.nnz} took {elapsed:.3f}s")
        points.append((h.nnz, elapsed))
    return points


def linear_fit(points: Sequence[Tuple[float, float]]) -> Tuple[float, float, float]:
    """Least-squares line through (x, y) points; returns slope, intercept and R^2"""
    xs = np.array([p[0] for p in points], dtype=np.float64)
    ys = np.array([p[1] for p in points], dtype=np.float64)
    slope, intercept = np.polyfit(xs, ys, 1)
    residual = ys - (slope * xs + intercept)
    total = ((ys - ys.mean()) ** 2).sum()
    r_squared = 1.0 - (residual ** 2).sum() / total if total > 0 else 1.0
    return float(slope), float(intercept), float(r_squared)
