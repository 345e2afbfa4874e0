"""
hypersym Fixtures Module
Named small hypergraphs, seeded random generators and the n <= 8 corpus
used by the verification suite and the tests.
"""

import logging
from itertools import combinations
from typing import Dict, List, Sequence, Tuple

import numpy as np

from hypersym_core import Hypergraph, Permutation, apply_permutation, build, disjoint_union

logger = logging.getLogger(__name__)

# ----------------- Named Hypergraphs -----------------

def hypercycle(n: int, k: int = 3) -> Hypergraph:
    """k-uniform hypercycle: hyperedges {i, i+1, ..., i+k-1} mod n"""
    return build(n, [[(i + j) % n for j in range(k)] for i in range(n)])


def c4_3() -> Hypergraph:
    """All four 3-subsets of four vertices"""
    return hypercycle(4, 3)


def c5_3() -> Hypergraph:
    return hypercycle(5, 3)


def c4_c5() -> Hypergraph:
    """Disjoint union of the 4- and 5-vertex 3-uniform hypercycles"""
    union, _ = disjoint_union([c4_3(), c5_3()])
    return union


def cycle3() -> Hypergraph:
    return build(3, [[0, 1], [1, 2], [0, 2]])


def filled_triangle() -> Hypergraph:
    """Triangle with its 3-cycle boundary"""
    return build(3, [[0, 1], [1, 2], [0, 2], [0, 1, 2]])


def path(n: int = 3) -> Hypergraph:
    return build(n, [[i, i + 1] for i in range(n - 1)])


def cycle(n: int) -> Hypergraph:
    return build(n, [[i, (i + 1) % n] for i in range(n)])


def star(leaves: int) -> Hypergraph:
    return build(leaves + 1, [[0, i] for i in range(1, leaves + 1)])


def complete_uniform(n: int, k: int) -> Hypergraph:
    return build(n, combinations(range(n), k))


def fano_plane() -> Hypergraph:
    lines = [[0, 1, 2], [0, 3, 4], [0, 5, 6], [1, 3, 5], [1, 4, 6], [2, 3, 6], [2, 4, 5]]
    return build(7, lines)


def sunflower(petals: int, petal_size: int = 3) -> Hypergraph:
    """Hyperedges sharing exactly one core vertex"""
    edges = []
    next_vertex = 1
    for _ in range(petals):
        edges.append([0] + list(range(next_vertex, next_vertex + petal_size - 1)))
        next_vertex += petal_size - 1
    return build(next_vertex, edges)


def union_of(*hs: Hypergraph) -> Hypergraph:
    union, _ = disjoint_union(list(hs))
    return union


def named_fixtures() -> Dict[str, Hypergraph]:
    """The named fixtures, including the 9-vertex C4/C5 union"""
    return {
        "c3": cycle3(),
        "t": filled_triangle(),
        "path3": path(3),
        "c4_3": c4_3(),
        "c5_3": c5_3(),
        "c4_c5": c4_c5(),
    }

# ----------------- Random Generators -----------------

def random_hypergraph(rng: np.random.Generator, n: int, m: int, max_size: int = 3) -> Hypergraph:
    """m hyperedges with uniform sizes in [2, max_size], possibly disconnected"""
    max_size = max(2, min(max_size, n))
    edges = []
    for _ in range(m):
        size = int(rng.integers(2, max_size + 1))
        edges.append(rng.choice(n, size=size, replace=False).tolist())
    return build(n, edges)


def random_connected_hypergraph(rng: np.random.Generator, n: int, m: int, max_size: int = 3) -> Hypergraph:
    """Connected hypergraph on n >= 2 vertices.

    A spanning chain of hyperedges first attaches every vertex to the
    already covered set; the remaining budget of m is filled with uniform
    random hyperedges.
    """
    if n < 2:
        raise ValueError(f"A connected hypergraph with hyperedges needs n >= 2, got {n}")
    max_size = max(2, min(max_size, n))
    order = rng.permutation(n).tolist()
    covered = [order[0]]
    edges: List[List[int]] = []
    i = 1
    while i < n:
        size = int(rng.integers(2, max_size + 1))
        fresh = int(rng.integers(1, min(size - 1, n - i) + 1))
        old = min(size - fresh, len(covered))
        chosen = rng.choice(covered, size=old, replace=False).tolist()
        edges.append(chosen + order[i:i + fresh])
        covered.extend(order[i:i + fresh])
        i += fresh
    while len(edges) < m:
        size = int(rng.integers(2, max_size + 1))
        edges.append(rng.choice(n, size=size, replace=False).tolist())
    return build(n, edges)


def random_connected_cases(count: int, seed: int, max_n: int = 7, max_m: int = 10) -> List[Hypergraph]:
    rng = np.random.default_rng(seed)
    cases = []
    for _ in range(count):
        n = int(rng.integers(2, max_n + 1))
        m = int(rng.integers(1, max_m + 1))
        cases.append(random_connected_hypergraph(rng, n, m, max_size=min(4, n)))
    return cases


def synthetic_hypergraph(nnz: int, seed: int = 0, planted_fraction: float = 0.1) -> Hypergraph:
    """Large 3-uniform hypergraph with roughly ``nnz`` incidences.

    A fraction of the incidences goes to planted copies of the 6-vertex
    3-uniform hypercycle (symmetric components); the rest are random
    3-sets over a separate vertex range.
    """
    rng = np.random.default_rng(seed)
    planted_copies = int(nnz * planted_fraction) // 18
    edges: List[Tuple[int, ...]] = []
    for copy in range(planted_copies):
        base = 6 * copy
        edges.extend(tuple(sorted(base + (i + j) % 6 for j in range(3))) for i in range(6))
    offset = 6 * planted_copies

    random_edges = max(1, (nnz - 18 * planted_copies) // 3)
    random_vertices = max(3, random_edges)
    draws = rng.integers(0, random_vertices, size=(random_edges, 3))
    draws.sort(axis=1)
    distinct = (draws[:, 0] != draws[:, 1]) & (draws[:, 1] != draws[:, 2])
    draws = np.unique(draws[distinct], axis=0) + offset
    edges.extend(map(tuple, draws.tolist()))
    logger.debug(f"Synthetic hypergraph: {planted_copies} planted components, {len(draws)} random hyperedges")
    return build(offset + random_vertices, edges)

# ----------------- Corpus -----------------

def corpus(seed: int = 0, random_count: int = 30, max_n: int = 8) -> List[Tuple[str, Hypergraph]]:
    """Named and random hypergraphs with at most ``max_n`` vertices"""
    named: List[Tuple[str, Hypergraph]] = [
        ("c3", cycle3()),
        ("t", filled_triangle()),
        ("path3", path(3)),
        ("path5", path(5)),
        ("star3", star(3)),
        ("star5", star(5)),
        ("c4_3", c4_3()),
        ("c5_3", c5_3()),
        ("c6_3", hypercycle(6, 3)),
        ("c7_3", hypercycle(7, 3)),
        ("c8_3", hypercycle(8, 3)),
        ("c6_4", hypercycle(6, 4)),
        ("cycle4", cycle(4)),
        ("cycle6", cycle(6)),
        ("cycle8", cycle(8)),
        ("k4", complete_uniform(4, 2)),
        ("k5", complete_uniform(5, 2)),
        ("k5_3", complete_uniform(5, 3)),
        ("fano", fano_plane()),
        ("sunflower3", sunflower(3)),
        ("c3_c3", union_of(cycle3(), cycle3())),
        ("c3_c4_3", union_of(cycle3(), c4_3())),
        ("path3_c3", union_of(path(3), cycle3())),
        ("t_c3", union_of(filled_triangle(), cycle3())),
        ("c4_3_edge", union_of(c4_3(), build(2, [[0, 1]]))),
        ("cycle4_cycle4", union_of(cycle(4), cycle(4))),
        ("overlap_pairs", build(6, [[0, 1, 2], [0, 1, 3], [2, 4, 5], [3, 4, 5]])),
        ("isolated", build(4, [[0, 1, 2]])),
    ]
    rng = np.random.default_rng(seed)
    generated: List[Tuple[str, Hypergraph]] = []
    for index in range(random_count):
        n = int(rng.integers(3, max_n + 1))
        m = int(rng.integers(2, 2 * n + 1))
        if index % 2:
            h = random_connected_hypergraph(rng, n, m, max_size=min(4, n))
        else:
            h = random_hypergraph(rng, n, m, max_size=min(4, n))
        generated.append((f"random{index}", h))
    return [(name, h) for name, h in named + generated if h.n <= max_n]


def regular_union(orders: Sequence[int], k: int = 3) -> Hypergraph:
    """Disjoint union of k-uniform hypercycles of the given orders"""
    return union_of(*(hypercycle(order, k) for order in orders))


def random_regular_union(rng: np.random.Generator, pieces: int = 2, max_order: int = 7) -> Hypergraph:
    """Randomly relabelled union of k-uniform hypercycles (k in {2, 3}) of distinct random orders.

    Every piece is vertex-transitive with the same degree, so all vertices
    share one GWL-1 color and each piece is a symmetric component.
    """
    k = int(rng.integers(2, 4))
    choices = np.arange(k + 1, max_order + 1)
    if pieces > len(choices):
        raise ValueError(f"Cannot pick {pieces} distinct orders from {choices.tolist()}")
    orders = sorted(rng.choice(choices, size=pieces, replace=False).tolist())
    h = regular_union(orders, k)
    return apply_permutation(h, Permutation(rng.permutation(h.n).tolist()))


def stationary_fixtures(seed: int = 0, random_count: int = 2) -> List[Tuple[str, Hypergraph]]:
    """The C4/C5 union followed by seeded random regular unions"""
    rng = np.random.default_rng(seed)
    cases = [("c4_c5", c4_c5())]
    cases.extend((f"regular_union{index}", random_regular_union(rng)) for index in range(random_count))
    return cases
