"""
hypersym Core Module
Sparse hypergraph representation: construction, validation, permutation
action, star/clique expansions, components, degrees and the random-walk
stationary distribution.
"""

import logging
from itertools import chain
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp
from scipy.sparse import csgraph

logger = logging.getLogger(__name__)

Edge = Tuple[int, ...]

# ----------------- Errors -----------------

class HypergraphError(ValueError):
    """Invalid hypergraph input; names the offending edge when there is one"""

    def __init__(self, message: str, edge_position: Optional[int] = None,
                 edge: Optional[Sequence[int]] = None, vertex: Optional[int] = None):
        self.edge_position = edge_position
        self.edge = None if edge is None else list(edge)
        self.vertex = vertex
        super().__init__(message)

    def to_dict(self) -> Dict[str, object]:
        return {
            "error": str(self),
            "edge_position": self.edge_position,
            "edge": self.edge,
            "vertex": self.vertex,
        }


class DisconnectedHypergraphError(HypergraphError):
    """Raised when an operation needs a connected hypergraph"""


class PermutationError(ValueError):
    """Raised for non-bijective permutations or size mismatches"""

# ----------------- Domain Types -----------------

def _readonly(array: np.ndarray) -> np.ndarray:
    array.flags.writeable = False
    return array


class Hypergraph:
    """Immutable hypergraph stored as the nonzeros of its star expansion matrix H.

    ``incidence`` is H in CSR form (vertex rows, hyperedge columns) and
    ``incidence_t`` is its transpose (hyperedge rows); together they are the
    dual index vertex -> hyperedges and hyperedge -> vertices.
    """

    __slots__ = ("n", "incidence", "incidence_t", "edge_sizes",
                 "dropped_small", "dropped_duplicates", "_edges", "_edge_set")

    def __init__(self, n: int, edges: Sequence[Edge],
                 dropped_small: int = 0, dropped_duplicates: int = 0):
        # edges must already be canonical (sorted, unique, size >= 2, in range)
        self.n = int(n)
        self._edges: List[Edge] = list(edges)
        self._edge_set = None
        m = len(self._edges)
        sizes = np.fromiter((len(e) for e in self._edges), dtype=np.int64, count=m)
        edge_ptr = np.zeros(m + 1, dtype=np.int64)
        np.cumsum(sizes, out=edge_ptr[1:])
        nnz = int(edge_ptr[-1])
        edge_index = np.fromiter(chain.from_iterable(self._edges), dtype=np.int64, count=nnz)
        data = np.ones(nnz, dtype=np.int8)
        incidence_t = sp.csr_matrix((data, edge_index, edge_ptr), shape=(m, self.n))
        incidence = incidence_t.T.tocsr()
        incidence.sort_indices()
        self.incidence_t = incidence_t
        self.incidence = incidence
        self.edge_sizes = _readonly(sizes)
        self.dropped_small = int(dropped_small)
        self.dropped_duplicates = int(dropped_duplicates)

    @property
    def m(self) -> int:
        return len(self._edges)

    @property
    def nnz(self) -> int:
        return int(self.incidence_t.nnz)

    @property
    def edges(self) -> List[Edge]:
        return list(self._edges)

    def edge(self, e: int) -> Edge:
        return self._edges[e]

    @property
    def vertex_incidence(self) -> List[Tuple[int, ...]]:
        ptr, idx = self.incidence.indptr, self.incidence.indices
        return [tuple(idx[ptr[v]:ptr[v + 1]].tolist()) for v in range(self.n)]

    def incident_edges(self, v: int) -> np.ndarray:
        ptr = self.incidence.indptr
        return self.incidence.indices[ptr[v]:ptr[v + 1]]

    def degrees(self) -> np.ndarray:
        return np.diff(self.incidence.indptr).astype(np.int64)

    def volumes(self) -> np.ndarray:
        return np.asarray(self.incidence @ self.edge_sizes, dtype=np.int64).ravel()

    def edge_set(self) -> frozenset:
        if self._edge_set is None:
            self._edge_set = frozenset(self._edges)
        return self._edge_set

    def same_edge_set(self, other: "Hypergraph") -> bool:
        return self.n == other.n and self.edge_set() == other.edge_set()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Hypergraph):
            return NotImplemented
        return self.n == other.n and self._edges == other._edges

    __hash__ = None

    def __repr__(self) -> str:
        return f"Hypergraph(n={self.n}, m={self.m}, nnz={self.nnz})"


class BipartiteGraph:
    """Star expansion: red nodes 0..left-1 are vertices, blue nodes
    left..left+right-1 are hyperedges. Adjacency is stored in both directions."""

    __slots__ = ("left", "right", "adjacency")

    def __init__(self, left: int, right: int, adjacency: sp.csr_matrix):
        self.left = int(left)
        self.right = int(right)
        self.adjacency = adjacency

    @property
    def num_nodes(self) -> int:
        return self.left + self.right

    @property
    def num_edges(self) -> int:
        return int(self.adjacency.nnz // 2)

    def is_red(self, node: int) -> bool:
        return node < self.left

    def neighbors(self, node: int) -> np.ndarray:
        ptr = self.adjacency.indptr
        return self.adjacency.indices[ptr[node]:ptr[node + 1]]

    def hyperedge_node(self, e: int) -> int:
        return self.left + e


class Permutation:
    """Bijection on vertex ids 0..n-1; ``mapping[v]`` is the image of v"""

    __slots__ = ("mapping",)

    def __init__(self, mapping: Iterable[int]):
        values = tuple(int(v) for v in mapping)
        if sorted(values) != list(range(len(values))):
            raise PermutationError(f"Mapping is not a bijection on 0..{len(values) - 1}: {values}")
        self.mapping = values

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(range(n))

    @classmethod
    def from_cycle(cls, n: int, cycle: Sequence[int]) -> "Permutation":
        mapping = list(range(n))
        for i, v in enumerate(cycle):
            mapping[v] = cycle[(i + 1) % len(cycle)]
        return cls(mapping)

    def __len__(self) -> int:
        return len(self.mapping)

    def __call__(self, v: int) -> int:
        return self.mapping[v]

    def inverse(self) -> "Permutation":
        inv = [0] * len(self.mapping)
        for v, image in enumerate(self.mapping):
            inv[image] = v
        return Permutation(inv)

    def compose(self, other: "Permutation") -> "Permutation":
        """Return self after other: v -> self(other(v))"""
        if len(other) != len(self):
            raise PermutationError(f"Cannot compose permutations of sizes {len(self)} and {len(other)}")
        return Permutation(self.mapping[other.mapping[v]] for v in range(len(self)))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Permutation) and self.mapping == other.mapping

    def __hash__(self) -> int:
        return hash(self.mapping)

    def __repr__(self) -> str:
        return f"Permutation({list(self.mapping)})"


class StationaryDistribution:
    """Per-vertex probabilities of the hypergraph random walk"""

    __slots__ = ("probs",)

    def __init__(self, probs: np.ndarray):
        self.probs = _readonly(np.asarray(probs, dtype=np.float64))

    def __getitem__(self, v: int) -> float:
        return float(self.probs[v])

    def __len__(self) -> int:
        return len(self.probs)


class Components:
    """Vertex partition into connected components plus hyperedge assignment"""

    __slots__ = ("labels", "edge_labels", "vertex_sets")

    def __init__(self, labels: np.ndarray, edge_labels: np.ndarray, vertex_sets: List[Tuple[int, ...]]):
        self.labels = _readonly(labels)
        self.edge_labels = _readonly(edge_labels)
        self.vertex_sets = vertex_sets

    def __len__(self) -> int:
        return len(self.vertex_sets)

    def sizes(self) -> List[int]:
        return [len(s) for s in self.vertex_sets]

    def as_partition(self) -> frozenset:
        return frozenset(frozenset(s) for s in self.vertex_sets)

# ----------------- Construction -----------------

def build(n: int, raw_edges: Iterable[Sequence[int]]) -> Hypergraph:
    """Build a canonical hypergraph from raw vertex-id lists.

    Hyperedges are sorted and deduplicated as sets; empty and singleton
    hyperedges are dropped and counted. Out-of-range ids raise
    HypergraphError naming the edge.
    """
    n = int(n)
    if n < 0:
        raise HypergraphError(f"Vertex count must be nonnegative, got {n}")
    seen = set()
    edges: List[Edge] = []
    dropped_small = 0
    dropped_duplicates = 0
    for position, raw in enumerate(raw_edges):
        edge = tuple(sorted({int(v) for v in raw}))
        if edge and (edge[0] < 0 or edge[-1] >= n):
            bad = edge[0] if edge[0] < 0 else edge[-1]
            raise HypergraphError(
                f"Hyperedge #{position} {list(raw)} has vertex {bad} outside [0, {n})",
                edge_position=position, edge=raw, vertex=bad,
            )
        if len(edge) < 2:
            dropped_small += 1
            continue
        if edge in seen:
            dropped_duplicates += 1
            continue
        seen.add(edge)
        edges.append(edge)

    if dropped_small:
        logger.warning(f"Dropped {dropped_small} empty or singleton hyperedges")
    if dropped_duplicates:
        logger.warning(f"Dropped {dropped_duplicates} duplicate hyperedges")
    logger.debug(f"Built hypergraph with n={n}, m={len(edges)}")
    return Hypergraph(n, edges, dropped_small, dropped_duplicates)


def disjoint_union(hs: Sequence[Hypergraph]) -> Tuple[Hypergraph, List[int]]:
    """Place hypergraphs side by side; returns the union and each vertex offset"""
    offsets: List[int] = []
    edges: List[Edge] = []
    total = 0
    for h in hs:
        offsets.append(total)
        edges.extend(tuple(v + total for v in e) for e in h.edges)
        total += h.n
    return Hypergraph(total, edges), offsets

# ----------------- Degrees -----------------

def _check_vertex(h: Hypergraph, v: int) -> None:
    if not 0 <= v < h.n:
        raise HypergraphError(f"Vertex {v} outside [0, {h.n})", vertex=v)


def degree(h: Hypergraph, v: int) -> int:
    _check_vertex(h, v)
    ptr = h.incidence.indptr
    return int(ptr[v + 1] - ptr[v])


def volume(h: Hypergraph, v: int) -> int:
    """Sum of the sizes of the hyperedges incident to v"""
    _check_vertex(h, v)
    return int(h.edge_sizes[h.incident_edges(v)].sum())

# ----------------- Expansions -----------------

def star_expansion(h: Hypergraph) -> BipartiteGraph:
    n, m = h.n, h.m
    blocks = sp.bmat([[None, h.incidence], [h.incidence_t, None]], format="csr") \
        if n and m else sp.csr_matrix((n + m, n + m), dtype=np.int8)
    blocks.sort_indices()
    return BipartiteGraph(n, m, blocks)


def clique_expansion(h: Hypergraph) -> sp.csr_matrix:
    """Weighted vertex adjacency A = H * D_e^-1 * H^T, diagonal included"""
    if h.m == 0:
        return sp.csr_matrix((h.n, h.n), dtype=np.float64)
    inv_sizes = sp.diags(1.0 / h.edge_sizes.astype(np.float64))
    incidence = h.incidence.astype(np.float64)
    return (incidence @ inv_sizes @ incidence.T).tocsr()


def clique_support(h: Hypergraph) -> sp.csr_matrix:
    """Unweighted off-diagonal support of the clique expansion (a simple graph)"""
    adjacency = clique_expansion(h)
    adjacency.setdiag(0)
    adjacency.eliminate_zeros()
    adjacency.data[:] = 1.0
    adjacency.sort_indices()
    return adjacency

# ----------------- Subhypergraphs and Components -----------------

def induced_subhypergraph(h: Hypergraph, w: Iterable[int]) -> Tuple[Hypergraph, Dict[int, int], List[int]]:
    """Induced subhypergraph on w: keeps exactly the hyperedges inside w.

    Returns the subhypergraph with ids renumbered 0..|w|-1 in increasing
    order, the old->new map and the new->old list.
    """
    new_to_old = sorted({int(v) for v in w})
    for v in new_to_old:
        _check_vertex(h, v)
    old_to_new = {old: new for new, old in enumerate(new_to_old)}
    inside = inside_edge_mask(h, new_to_old)
    edges = [tuple(old_to_new[v] for v in h.edge(e)) for e in np.flatnonzero(inside)]
    return Hypergraph(len(new_to_old), edges), old_to_new, new_to_old


def inside_edge_mask(h: Hypergraph, w: Iterable[int]) -> np.ndarray:
    """Boolean mask over hyperedges: True when every vertex of the edge lies in w"""
    member = np.zeros(h.n, dtype=np.int64)
    member[np.fromiter(w, dtype=np.int64)] = 1
    if h.m == 0:
        return np.zeros(0, dtype=bool)
    counts = np.asarray(h.incidence_t @ member).ravel()
    return counts == h.edge_sizes


def components_of_edges(h: Hypergraph, edge_mask: Optional[np.ndarray] = None) -> Components:
    """Connected components of (V, selected hyperedges) via the star expansion.

    Component ids are ordered by the smallest vertex they contain.
    Unselected hyperedges get edge label -1.
    """
    n, m = h.n, h.m
    if n == 0:
        empty = np.zeros(0, dtype=np.int64)
        return Components(empty, np.full(m, -1, dtype=np.int64), [])
    if edge_mask is None or m == 0:
        incidence = h.incidence
    else:
        incidence = sp.csr_matrix(h.incidence @ sp.diags(edge_mask.astype(np.int8)))
        incidence.eliminate_zeros()
    bipartite = sp.bmat([[None, incidence], [incidence.T, None]], format="csr") \
        if n and m else sp.csr_matrix((n + m, n + m), dtype=np.int8)
    _, raw = csgraph.connected_components(bipartite, directed=False)
    raw_vertex = raw[:n]

    # relabel by first (smallest) vertex of each component
    first_seen: Dict[int, int] = {}
    for label in raw_vertex.tolist():
        if label not in first_seen:
            first_seen[label] = len(first_seen)
    lookup = np.full(int(raw.max()) + 1 if raw.size else 0, -1, dtype=np.int64)
    for label, new in first_seen.items():
        lookup[label] = new
    labels = lookup[raw_vertex] if n else np.zeros(0, dtype=np.int64)

    edge_labels = np.full(m, -1, dtype=np.int64)
    if m:
        selected = np.ones(m, dtype=bool) if edge_mask is None else edge_mask.astype(bool)
        first_vertex = h.incidence_t.indices[h.incidence_t.indptr[:-1]]
        edge_labels[selected] = labels[first_vertex[selected]]

    order = np.argsort(labels, kind="stable")
    bounds = np.searchsorted(labels[order], np.arange(len(first_seen) + 1))
    vertex_sets = [tuple(order[bounds[i]:bounds[i + 1]].tolist()) for i in range(len(first_seen))]
    return Components(labels, edge_labels, vertex_sets)


def connected_components(h: Hypergraph) -> Components:
    return components_of_edges(h)


def is_connected(h: Hypergraph) -> bool:
    return h.n > 0 and len(connected_components(h)) == 1

# ----------------- Permutation Action -----------------

def apply_permutation(h: Hypergraph, p: Permutation) -> Hypergraph:
    if len(p) != h.n:
        raise PermutationError(f"Permutation of size {len(p)} cannot act on {h.n} vertices")
    mapping = p.mapping
    return Hypergraph(h.n, [tuple(sorted(mapping[v] for v in e)) for e in h.edges])


def is_stabilizer(h: Hypergraph, p: Permutation) -> bool:
    """True iff p maps the hyperedge set onto itself"""
    if len(p) != h.n:
        raise PermutationError(f"Permutation of size {len(p)} cannot act on {h.n} vertices")
    edge_set = h.edge_set()
    mapping = p.mapping
    return all(tuple(sorted(mapping[v] for v in e)) in edge_set for e in h.edges)

# ----------------- Random Walk -----------------

def transition_matrix(h: Hypergraph, weights: Optional[Sequence[float]] = None) -> sp.csr_matrix:
    """P[u, v] = sum over e containing u and v of w(e) / (d_w(u) |e|)"""
    w = np.ones(h.m) if weights is None else np.asarray(weights, dtype=np.float64)
    if w.shape != (h.m,):
        raise HypergraphError(f"Expected {h.m} hyperedge weights, got {w.shape}")
    incidence = h.incidence.astype(np.float64)
    weighted_degree = np.asarray(incidence @ w).ravel()
    inv_degree = np.divide(1.0, weighted_degree, out=np.zeros_like(weighted_degree), where=weighted_degree > 0)
    inv_sizes = 1.0 / np.maximum(h.edge_sizes, 1)
    return (sp.diags(inv_degree) @ incidence @ sp.diags(w * inv_sizes) @ incidence.T).tocsr()


def stationary_distribution(h: Hypergraph, require_connected: bool = True) -> StationaryDistribution:
    """Closed form pi(v) = deg(v) / sum deg(u).

    The closed form is the unique stationary distribution only for connected
    hypergraphs; with require_connected=False the degree-proportional vector
    (still stationary, no longer unique) is returned for any input.
    """
    if h.m == 0:
        raise DisconnectedHypergraphError("Stationary distribution needs at least one hyperedge")
    if require_connected and not is_connected(h):
        raise DisconnectedHypergraphError(
            f"Hypergraph with {len(connected_components(h))} components has no unique stationary distribution"
        )
    degrees = h.degrees().astype(np.float64)
    return StationaryDistribution(degrees / degrees.sum())


def power_iteration(h: Hypergraph, tol: float = 1e-14, max_iter: int = 100000) -> StationaryDistribution:
    """Fixed point of pi^T P = pi^T from the uniform start"""
    transition_t = transition_matrix(h).T.tocsr()
    pi = np.full(h.n, 1.0 / h.n)
    for iteration in range(max_iter):
        nxt = transition_t @ pi
        total = nxt.sum()
        if total > 0:
            nxt /= total
        if np.abs(nxt - pi).sum() < tol:
            logger.debug(f"Power iteration converged after {iteration + 1} steps")
            return StationaryDistribution(nxt)
        pi = nxt
    logger.warning(f"Power iteration did not converge in {max_iter} steps")
    return StationaryDistribution(pi)
