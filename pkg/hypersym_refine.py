"""
hypersym Refinement Module
GWL-1 color refinement on the star expansion and WL-1 on the clique
expansion, with canonical per-iteration color ids and convergence detection.
"""

import logging
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from hypersym_core import Hypergraph, clique_support

logger = logging.getLogger(__name__)

CONVERGE = "conv"

Iterations = Union[int, str, None]


class NodeAttributes:
    """Initial attribute class per vertex (X_v); all zero when unattributed"""

    __slots__ = ("classes",)

    def __init__(self, values: Sequence):
        values = np.asarray(values)
        if values.ndim != 1:
            raise ValueError(f"Node attributes must be one-dimensional, got shape {values.shape}")
        # dense ids in sorted order of the distinct values
        _, classes = np.unique(values, return_inverse=True)
        classes = classes.reshape(-1).astype(np.int64)
        classes.flags.writeable = False
        self.classes = classes

    @classmethod
    def uniform(cls, n: int) -> "NodeAttributes":
        return cls(np.zeros(n, dtype=np.int64))

    def __len__(self) -> int:
        return len(self.classes)


@dataclass(frozen=True)
class ColorHistory:
    """Per-iteration color ids: node_colors[i][v] = h_v^i, edge_colors[i][e] = f_e^i"""
    node_colors: Tuple[np.ndarray, ...]
    edge_colors: Tuple[np.ndarray, ...]
    converged_at: Optional[int]
    method: str = "gwl1"

    @property
    def iterations(self) -> int:
        return len(self.node_colors) - 1

    @property
    def final_node_colors(self) -> np.ndarray:
        return self.node_colors[-1]

    def num_node_classes(self, i: Optional[int] = None) -> int:
        colors = self.node_colors[-1 if i is None else i]
        return len(np.unique(colors))


def parse_iterations(value: Iterations) -> Optional[int]:
    """Normalise an iteration budget: an int >= 0, or None for "until convergence" """
    if value is None:
        return None
    if isinstance(value, str):
        if value.strip().lower() in (CONVERGE, "inf", "infinity"):
            return None
        value = int(value)
    if isinstance(value, bool) or int(value) < 0:
        raise ValueError(f"Iteration budget must be a nonnegative integer or '{CONVERGE}', got {value!r}")
    return int(value)


def _intern_rows(own: np.ndarray, ptr: np.ndarray, members: np.ndarray) -> np.ndarray:
    """Assign dense ids to signatures (own color, sorted multiset of row members).

    Rows are CSR slices ptr[r]:ptr[r+1] of ``members`` (already sorted inside
    each row). Ids follow the sorted order of (row length, own, members), so
    they depend only on the multiset of signatures, not on element order.
    """
    lengths = np.diff(ptr)
    ids = np.empty(len(own), dtype=np.int64)
    offset = 0
    for length in np.unique(lengths):
        rows = np.flatnonzero(lengths == length)
        if length:
            cols = ptr[rows][:, None] + np.arange(length)
            table = np.column_stack([own[rows], members[cols]])
        else:
            table = own[rows][:, None]
        unique, inverse = np.unique(table, axis=0, return_inverse=True)
        ids[rows] = inverse.reshape(-1) + offset
        offset += len(unique)
    return ids


def _sorted_members(ptr: np.ndarray, indices: np.ndarray, colors: np.ndarray) -> np.ndarray:
    values = colors[indices]
    rows = np.repeat(np.arange(len(ptr) - 1), np.diff(ptr))
    return values[np.lexsort((values, rows))]


def _initial_colors(n: int, x: Optional[Union[NodeAttributes, Sequence]]) -> np.ndarray:
    if x is None:
        return np.zeros(n, dtype=np.int64)
    if not isinstance(x, NodeAttributes):
        x = NodeAttributes(x)
    if len(x) != n:
        raise ValueError(f"Node attributes have length {len(x)}, expected {n}")
    return np.array(x.classes, dtype=np.int64)


def _frozen(array: np.ndarray) -> np.ndarray:
    array.flags.writeable = False
    return array


def _count(colors: np.ndarray) -> int:
    return len(np.unique(colors))


def gwl1(h: Hypergraph, x: Optional[Union[NodeAttributes, Sequence]] = None,
         L: Iterations = CONVERGE) -> ColorHistory:
    """Run GWL-1 refinement.

    f_e^{i+1} = (f_e^i, {{h_v^i : v in e}})
    h_v^{i+1} = (h_v^i, {{f_e^{i+1} : e contains v}})

    With an integer L exactly L iterations are recorded; with "conv" the run
    stops one iteration after the joint (node, edge) partition stops refining.
    converged_at is the first i whose partition equals that of i+1.
    """
    budget = parse_iterations(L)
    node = _initial_colors(h.n, x)
    edge = np.zeros(h.m, dtype=np.int64)
    node_history = [_frozen(node)]
    edge_history = [_frozen(edge)]
    converged_at: Optional[int] = None

    edge_ptr, edge_idx = h.incidence_t.indptr, h.incidence_t.indices
    node_ptr, node_idx = h.incidence.indptr, h.incidence.indices
    counts = (_count(node), _count(edge))

    i = 0
    while budget is None or i < budget:
        edge = _intern_rows(edge, edge_ptr, _sorted_members(edge_ptr, edge_idx, node))
        node = _intern_rows(node, node_ptr, _sorted_members(node_ptr, node_idx, edge))
        node_history.append(_frozen(node))
        edge_history.append(_frozen(edge))
        new_counts = (_count(node), _count(edge))
        logger.debug(f"GWL-1 iteration {i + 1}: {new_counts[0]} node classes, {new_counts[1]} edge classes")
        if converged_at is None and new_counts == counts:
            converged_at = i
            if budget is None:
                break
        counts = new_counts
        i += 1

    return ColorHistory(tuple(node_history), tuple(edge_history), converged_at, "gwl1")


def wl1_clique(h: Hypergraph, x: Optional[Union[NodeAttributes, Sequence]] = None,
               L: Iterations = CONVERGE) -> ColorHistory:
    """Classic WL-1 on the unweighted support graph of the clique expansion"""
    budget = parse_iterations(L)
    adjacency = clique_support(h)
    ptr, idx = adjacency.indptr, adjacency.indices
    node = _initial_colors(h.n, x)
    empty = _frozen(np.zeros(0, dtype=np.int64))
    history = [_frozen(node)]
    converged_at: Optional[int] = None
    count = _count(node)

    i = 0
    while budget is None or i < budget:
        node = _intern_rows(node, ptr, _sorted_members(ptr, idx, node))
        history.append(_frozen(node))
        new_count = _count(node)
        if converged_at is None and new_count == count:
            converged_at = i
            if budget is None:
                break
        count = new_count
        i += 1

    return ColorHistory(tuple(history), tuple(empty for _ in history), converged_at, "wl1")


def color_classes(ch: ColorHistory, i: Optional[int] = None) -> Dict[int, Tuple[int, ...]]:
    """Map color id -> sorted vertex ids holding it at iteration i (default: last)"""
    if i is not None and not 0 <= i <= ch.iterations:
        raise IndexError(f"Iteration {i} outside recorded range 0..{ch.iterations}")
    colors = ch.node_colors[-1 if i is None else i]
    classes: Dict[int, List[int]] = {}
    for v, c in enumerate(colors.tolist()):
        classes.setdefault(c, []).append(v)
    return {c: tuple(vs) for c, vs in sorted(classes.items())}


def aggregate_representation(ch: ColorHistory, s: Iterable[int], i: Optional[int] = None) -> Tuple[int, ...]:
    """Multiset code of the colors of a vertex set: the sorted tuple of color ids"""
    members = list(s)
    if not members:
        raise ValueError("Cannot aggregate an empty vertex set")
    colors = ch.node_colors[-1 if i is None else i]
    return tuple(sorted(int(colors[v]) for v in members))


def partition_of(colors: Sequence[int]) -> FrozenSet[FrozenSet[int]]:
    classes: Dict[int, set] = {}
    for element, c in enumerate(np.asarray(colors).tolist()):
        classes.setdefault(c, set()).add(element)
    return frozenset(frozenset(members) for members in classes.values())


def same_partition(a: Sequence[int], b: Sequence[int]) -> bool:
    return partition_of(a) == partition_of(b)


def class_counts(ch: ColorHistory) -> List[int]:
    """Number of node classes at every recorded iteration"""
    return [_count(colors) for colors in ch.node_colors]
