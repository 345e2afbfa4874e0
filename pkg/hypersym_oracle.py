"""
hypersym Oracle Module
Exact checks for small instances: depth-bounded universal-cover unrolling of
the star expansion with canonical rooted-tree codes, brute-force
automorphism enumeration and rooted isomorphism of vertex neighborhoods.
"""

import itertools
import logging
from collections import deque
from dataclasses import dataclass
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

import hypersym_config as config
from hypersym_core import (
    BipartiteGraph, DisconnectedHypergraphError, Hypergraph, disjoint_union, is_connected, star_expansion,
)
from hypersym_refine import NodeAttributes, gwl1

logger = logging.getLogger(__name__)

RED = "red"
BLUE = "blue"


class OracleCapError(RuntimeError):
    """Raised when brute-force enumeration would exceed the configured vertex cap"""

# ----------------- Universal Cover -----------------

@dataclass(frozen=True)
class RootedColoredTree:
    """Depth-bounded ball of the universal cover; node 0 is the root.

    ``sources[t]`` is the star-expansion node that tree node t lifts.
    """
    colors: Tuple[str, ...]
    labels: Tuple[int, ...]
    children: Tuple[Tuple[int, ...], ...]
    sources: Tuple[int, ...]
    depth: int

    root = 0

    def __len__(self) -> int:
        return len(self.colors)

    def to_networkx(self) -> nx.Graph:
        graph = nx.Graph()
        for node, (color, label) in enumerate(zip(self.colors, self.labels)):
            graph.add_node(node, color=color, label=label, root=node == self.root)
        for node, kids in enumerate(self.children):
            graph.add_edges_from((node, child) for child in kids)
        return graph


def _red_labels(b: BipartiteGraph, labels: Optional[Sequence[int]]) -> np.ndarray:
    if labels is None:
        return np.zeros(b.left, dtype=np.int64)
    labels = np.asarray(labels, dtype=np.int64)
    if len(labels) != b.left:
        raise ValueError(f"Expected {b.left} vertex labels, got {len(labels)}")
    return labels


def _color_label(b: BipartiteGraph, labels: np.ndarray, node: int) -> Tuple[str, int]:
    if b.is_red(node):
        return RED, int(labels[node])
    return BLUE, 0


def unroll(b: BipartiteGraph, root: int, depth: int, labels: Optional[Sequence[int]] = None) -> RootedColoredTree:
    """Breadth-first non-backtracking unrolling of b from root down to depth"""
    if not 0 <= root < b.num_nodes:
        raise ValueError(f"Root {root} outside the {b.num_nodes} star-expansion nodes")
    if depth < 0:
        raise ValueError(f"Depth must be nonnegative, got {depth}")
    labels = _red_labels(b, labels)
    colors: List[str] = []
    node_labels: List[int] = []
    children: List[List[int]] = []
    sources: List[int] = []

    def add(source: int) -> int:
        color, label = _color_label(b, labels, source)
        colors.append(color)
        node_labels.append(label)
        children.append([])
        sources.append(source)
        return len(sources) - 1

    queue = deque([(add(root), root, -1, 0)])
    while queue:
        tree_node, source, parent, level = queue.popleft()
        if level == depth:
            continue
        for neighbor in b.neighbors(source).tolist():
            if neighbor == parent:
                continue
            child = add(neighbor)
            children[tree_node].append(child)
            queue.append((child, neighbor, source, level + 1))

    return RootedColoredTree(tuple(colors), tuple(node_labels), tuple(tuple(c) for c in children),
                             tuple(sources), depth)


def canonical_code(t: RootedColoredTree) -> Tuple:
    """AHU code: (color, label, sorted child codes) at every node"""
    def encode(node: int) -> Tuple:
        kids = sorted(encode(child) for child in t.children[node])
        return (t.colors[node], t.labels[node], tuple(kids))
    return encode(t.root)


def trees_isomorphic(t1: RootedColoredTree, t2: RootedColoredTree) -> bool:
    """Rooted colored isomorphism through networkx graph matching"""
    if len(t1) != len(t2):
        return False

    def match(a: Dict[str, Any], b: Dict[str, Any]) -> bool:
        return (a["color"], a["label"], a["root"]) == (b["color"], b["label"], b["root"])

    return nx.is_isomorphic(t1.to_networkx(), t2.to_networkx(), node_match=match)


class CoverCoder:
    """Interned AHU ids of universal-cover balls, memoised on (node, parent, depth).

    Two (node, depth) pairs get the same id iff their depth-bounded balls are
    isomorphic as rooted 2-colored labeled trees.
    """

    def __init__(self, b: BipartiteGraph, labels: Optional[Sequence[int]] = None):
        self.b = b
        self.labels = _red_labels(b, labels)
        self._memo: Dict[Tuple[int, int, int], int] = {}
        self._table: Dict[Tuple, int] = {}

    def code(self, node: int, depth: int) -> int:
        return self._code(node, -1, depth)

    def _code(self, node: int, parent: int, depth: int) -> int:
        key = (node, parent, depth)
        cached = self._memo.get(key)
        if cached is not None:
            return cached
        if depth == 0:
            kids: Tuple[int, ...] = ()
        else:
            kids = tuple(sorted(
                self._code(child, node, depth - 1)
                for child in self.b.neighbors(node).tolist() if child != parent
            ))
        signature = (_color_label(self.b, self.labels, node), kids)
        ident = self._table.setdefault(signature, len(self._table))
        self._memo[key] = ident
        return ident

# ----------------- Duality Check -----------------

@dataclass
class DualityVerdict:
    passed: bool
    iteration: int
    node_pairs: int = 0
    edge_pairs: int = 0
    equal_node_pairs: int = 0
    equal_edge_pairs: int = 0
    counterexample: Optional[Dict[str, Any]] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "passed": self.passed,
            "iteration": self.iteration,
            "node_pairs": self.node_pairs,
            "edge_pairs": self.edge_pairs,
            "equal_node_pairs": self.equal_node_pairs,
            "equal_edge_pairs": self.equal_edge_pairs,
            "counterexample": self.counterexample,
        }


def verify_duality(h1: Hypergraph, h2: Hypergraph, i: int,
                   x1: Optional[Sequence] = None, x2: Optional[Sequence] = None) -> DualityVerdict:
    """Compare GWL-1 colors with universal-cover codes over all cross pairs.

    Node colors after i iterations must match depth-2i codes at vertex roots;
    hyperedge colors must match depth-(2i-1) codes at hyperedge roots. Colors
    come from one refinement of the disjoint union.
    """
    if i < 1:
        raise ValueError(f"Iteration must be at least 1, got {i}")
    for name, h in (("first", h1), ("second", h2)):
        if not is_connected(h):
            raise DisconnectedHypergraphError(f"The {name} hypergraph is not connected")

    union, offsets = disjoint_union([h1, h2])
    raw = np.concatenate([
        np.zeros(h1.n, dtype=np.int64) if x1 is None else np.asarray(x1),
        np.zeros(h2.n, dtype=np.int64) if x2 is None else np.asarray(x2),
    ])
    attributes = NodeAttributes(raw)
    history = gwl1(union, attributes, L=i)
    node_colors = history.node_colors[i]
    edge_colors = history.edge_colors[i]
    coder = CoverCoder(star_expansion(union), attributes.classes)
    verdict = DualityVerdict(passed=True, iteration=i)

    def record(kind: str, first: int, second: int, colors_equal: bool, codes_equal: bool) -> None:
        if colors_equal != codes_equal and verdict.counterexample is None:
            verdict.passed = False
            verdict.counterexample = {
                "kind": kind, "first": first, "second": second,
                "colors_equal": colors_equal, "codes_equal": codes_equal, "iteration": i,
            }

    offset = offsets[1]
    for a in range(h1.n):
        for b in range(h2.n):
            colors_equal = bool(node_colors[a] == node_colors[offset + b])
            codes_equal = coder.code(a, 2 * i) == coder.code(offset + b, 2 * i)
            verdict.node_pairs += 1
            verdict.equal_node_pairs += int(colors_equal)
            record("node", a, b, colors_equal, codes_equal)

    for e1 in range(h1.m):
        for e2 in range(h2.m):
            colors_equal = bool(edge_colors[e1] == edge_colors[h1.m + e2])
            codes_equal = coder.code(union.n + e1, 2 * i - 1) == coder.code(union.n + h1.m + e2, 2 * i - 1)
            verdict.edge_pairs += 1
            verdict.equal_edge_pairs += int(colors_equal)
            record("edge", e1, e2, colors_equal, codes_equal)

    if not verdict.passed:
        logger.warning(f"Duality violated at iteration {i}: {verdict.counterexample}")
    return verdict

# ----------------- Automorphisms -----------------

@dataclass(frozen=True)
class OrbitPartition:
    orbits: Tuple[Tuple[int, ...], ...]
    group_size: int
    labels: Tuple[int, ...]

    def __len__(self) -> int:
        return len(self.orbits)

    def as_partition(self) -> frozenset:
        return frozenset(frozenset(o) for o in self.orbits)


def _check_cap(h: Hypergraph, cap: Optional[int]) -> None:
    cap = config.config.automorphism_cap if cap is None else cap
    if h.n > cap:
        raise OracleCapError(f"Refusing to enumerate {h.n}! permutations (cap is {cap} vertices)")


def _edge_images(h: Hypergraph, perms: np.ndarray) -> np.ndarray:
    """Bitmask of every hyperedge under every permutation row (identity row gives h itself)"""
    dense = h.incidence.toarray().astype(np.int64)
    return np.left_shift(np.int64(1), perms) @ dense


def stabilizers(h: Hypergraph, cap: Optional[int] = None) -> np.ndarray:
    """Every permutation (as rows of images) that maps the hyperedge set onto itself"""
    _check_cap(h, cap)
    if h.n == 0:
        return np.zeros((1, 0), dtype=np.int64)
    perms = np.array(list(itertools.permutations(range(h.n))), dtype=np.int64)
    if h.m == 0:
        return perms
    masks = _edge_images(h, np.arange(h.n, dtype=np.int64)[None, :])[0]
    return perms[np.isin(_edge_images(h, perms), masks).all(axis=1)]


def automorphisms(h: Hypergraph, cap: Optional[int] = None) -> OrbitPartition:
    group = stabilizers(h, cap)
    labels = group.min(axis=0) if h.n else np.zeros(0, dtype=np.int64)
    orbits: Dict[int, List[int]] = {}
    for v, label in enumerate(labels.tolist()):
        orbits.setdefault(label, []).append(v)
    logger.debug(f"|Aut| = {len(group)} with {len(orbits)} orbits on {h.n} vertices")
    return OrbitPartition(tuple(tuple(o) for o in orbits.values()), len(group), tuple(labels.tolist()))


def k_set_isomorphic(h: Hypergraph, s: Iterable[int], t: Iterable[int], cap: Optional[int] = None) -> bool:
    """True iff some automorphism maps s onto t and t onto s"""
    s, t = sorted(set(s)), sorted(set(t))
    if len(s) != len(t):
        raise ValueError(f"Vertex sets have different sizes {len(s)} and {len(t)}")
    if s == t:
        return True
    group = stabilizers(h, cap)
    powers = np.left_shift(np.int64(1), group)
    mask_s = sum(1 << v for v in s)
    mask_t = sum(1 << v for v in t)
    image_s = powers[:, s].sum(axis=1)
    image_t = powers[:, t].sum(axis=1)
    return bool(np.any((image_s == mask_t) & (image_t == mask_s)))

# ----------------- Neighborhoods -----------------

@dataclass(frozen=True)
class Neighborhood:
    """N(v): the hyperedges incident to v over the vertices they cover.

    ``vertices`` holds the original ids with the root first; ``hypergraph``
    numbers vertices by their position there, so the root is vertex 0.
    """
    root: int
    vertices: Tuple[int, ...]
    hypergraph: Hypergraph

    @property
    def size(self) -> int:
        return len(self.vertices)


def neighborhood(h: Hypergraph, v: int) -> Neighborhood:
    if not 0 <= v < h.n:
        raise ValueError(f"Vertex {v} out of range for a hypergraph on {h.n} vertices")
    incident = [h.edge(e) for e in h.incident_edges(v).tolist()]
    vertices = (v, *sorted({u for e in incident for u in e} - {v}))
    local = {old: new for new, old in enumerate(vertices)}
    edges = [tuple(sorted(local[u] for u in e)) for e in incident]
    return Neighborhood(v, vertices, Hypergraph(len(vertices), edges))


def rooted_isomorphic(a: Hypergraph, b: Hypergraph, cap: Optional[int] = None) -> bool:
    """True iff some bijection fixing vertex 0 maps the hyperedges of a onto those of b.

    Enumerates the (n-1)! bijections of the remaining vertices.
    """
    if a.n != b.n or a.m != b.m:
        return False
    if sorted(a.edge_sizes.tolist()) != sorted(b.edge_sizes.tolist()):
        return False
    deg_a, deg_b = a.degrees(), b.degrees()
    if sorted(deg_a.tolist()) != sorted(deg_b.tolist()) or (a.n and deg_a[0] != deg_b[0]):
        return False
    _check_cap(a, cap)
    if a.n <= 1 or a.m == 0:
        return True
    rest = np.array(list(itertools.permutations(range(1, a.n))), dtype=np.int64).reshape(-1, a.n - 1)
    perms = np.hstack([np.zeros((len(rest), 1), dtype=np.int64), rest])
    target = np.sort(_edge_images(b, np.arange(b.n, dtype=np.int64)[None, :])[0])
    images = np.sort(_edge_images(a, perms), axis=1)
    return bool((images == target).all(axis=1).any())


def neighborhoods_isomorphic(h: Hypergraph, u: int, v: int, cap: Optional[int] = None) -> bool:
    """Brute-force isomorphism N(u) -> N(v) sending u to v"""
    return rooted_isomorphic(neighborhood(h, u).hypergraph, neighborhood(h, v).hypergraph, cap)


def irregular_pair(h: Hypergraph, cap: Optional[int] = None) -> Optional[Tuple[int, int]]:
    """First vertex pair (0, v) with non-isomorphic neighborhoods, or None.

    Isomorphism is an equivalence, so comparing every vertex against vertex 0
    decides regularity.
    """
    for v in range(1, h.n):
        if not neighborhoods_isomorphic(h, 0, v, cap):
            return 0, v
    return None


def is_neighborhood_regular(h: Hypergraph, cap: Optional[int] = None) -> bool:
    """All vertex neighborhoods pairwise isomorphic"""
    return irregular_pair(h, cap) is None
