"""
hypersym Augmentation Module
Covering-hyperedge attachment, randomized drop/attach sampling and the
stationary-distribution estimators used to pick unbiased attach
probabilities.
"""

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Annotated, Any, Dict, List, Literal, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.sparse as sp
from pydantic import BaseModel, ConfigDict, Field, field_validator

import hypersym_config as config
import hypersym_utility as utility
from hypersym_core import (
    DisconnectedHypergraphError, Edge, Hypergraph, build, is_connected, stationary_distribution,
)
from hypersym_symmetry import SymmetryReport

logger = logging.getLogger(__name__)

Probability = Annotated[float, Field(ge=0.0, le=1.0)]


class AugmentationPlan(BaseModel):
    """Distribution of the augmented hypergraph: drop probability p for every
    hyperedge inside a component, attach probability q_i per component cover"""
    model_config = ConfigDict(frozen=True)

    p: Probability = 0.0
    q: List[Probability] = Field(default_factory=list)
    seed: int = 0
    mode: Literal["attach_only", "replace", "sample"] = "sample"

    @classmethod
    def for_report(cls, report: SymmetryReport, p: float = 0.0, q: Union[float, Sequence[float]] = 1.0,
                   seed: int = 0, mode: str = "sample") -> "AugmentationPlan":
        """Build a plan for a report, broadcasting a scalar q to every component"""
        if isinstance(q, (int, float)):
            q = [float(q)] * len(report)
        return cls(p=p, q=list(q), seed=seed, mode=mode)

    def q_for(self, report: SymmetryReport) -> np.ndarray:
        if len(self.q) != len(report):
            raise ValueError(f"Plan has {len(self.q)} attach probabilities for {len(report)} components")
        return np.asarray(self.q, dtype=np.float64)

    @field_validator("seed")
    @classmethod
    def _check_seed(cls, value: int) -> int:
        if value < 0:
            raise ValueError(f"seed must be nonnegative, got {value}")
        return value


@dataclass(frozen=True)
class StationaryEstimate:
    mean: np.ndarray
    stderr: np.ndarray
    n_samples: int
    method: str = "monte_carlo"


@dataclass
class UnbiasedSolution:
    """Attach probabilities from solve_unbiased with the per-component verdict"""
    p: float
    q: List[float]
    raw_q: List[float]
    residuals: List[float]
    infeasible: List[int] = field(default_factory=list)
    method: str = "exact"
    sweeps: int = 0

    @property
    def feasible(self) -> bool:
        return not self.infeasible

    def to_dict(self) -> Dict[str, Any]:
        return {
            "p": self.p,
            "q": self.q,
            "raw_q": self.raw_q,
            "residuals": self.residuals,
            "infeasible": self.infeasible,
            "feasible": self.feasible,
            "method": self.method,
            "sweeps": self.sweeps,
        }

# ----------------- Deterministic Transforms -----------------

def _covers(report: SymmetryReport) -> List[Edge]:
    return [tuple(c.vertices) for c in report.components]


def attach_covers(h: Hypergraph, r: SymmetryReport) -> Hypergraph:
    """(V, E + R_V): one covering hyperedge per component"""
    return build(h.n, h.edges + _covers(r))


def replace_components(h: Hypergraph, r: SymmetryReport) -> Hypergraph:
    """(V, (E - R_E) + R_V): component hyperedges replaced by their covers"""
    inside = set(r.edge_ids)
    kept = [e for index, e in enumerate(h.edges) if index not in inside]
    return build(h.n, kept + _covers(r))

# ----------------- Sampling -----------------

def sample_with_provenance(h: Hypergraph, r: SymmetryReport,
                           plan: AugmentationPlan) -> Tuple[Hypergraph, Dict[str, Any]]:
    """Draw one augmented hypergraph.

    Every hyperedge of R_E is kept with probability 1 - p, then every cover is
    attached with probability q_i; the draws come from one generator seeded
    with plan.seed, in that order.
    """
    q = plan.q_for(r)
    rng = np.random.default_rng(plan.seed)
    inside = np.asarray(r.edge_ids, dtype=np.int64)
    kept = rng.random(len(inside)) >= plan.p
    attached = rng.random(len(q)) < q

    dropped = set(inside[~kept].tolist())
    covers = _covers(r)
    edge_index = {e: index for index, e in enumerate(h.edges)}
    attached_covers = [covers[i] for i in np.flatnonzero(attached)]
    added = [c for c in attached_covers if c not in edge_index or edge_index[c] in dropped]
    edges = [e for index, e in enumerate(h.edges) if index not in dropped] + attached_covers
    augmented = build(h.n, edges)

    provenance = {
        "mode": plan.mode,
        "p": plan.p,
        "q": list(plan.q),
        "seed": plan.seed,
        "dropped_edges": [list(h.edge(e)) for e in sorted(dropped)],
        "added_covers": [list(c) for c in added],
    }
    logger.info(f"Sampled augmentation: dropped {len(dropped)} hyperedges, attached {int(attached.sum())} covers")
    return augmented, provenance


def sample(h: Hypergraph, r: SymmetryReport, plan: AugmentationPlan) -> Hypergraph:
    augmented, _ = sample_with_provenance(h, r, plan)
    return augmented


def augment(h: Hypergraph, r: SymmetryReport, plan: AugmentationPlan) -> Tuple[Hypergraph, Dict[str, Any]]:
    """Apply the plan's mode and return the augmented hypergraph with its provenance"""
    if plan.mode == "sample":
        return sample_with_provenance(h, r, plan)
    covers = _covers(r)
    if plan.mode == "attach_only":
        augmented, dropped = attach_covers(h, r), []
    else:
        augmented, dropped = replace_components(h, r), [list(h.edge(e)) for e in r.edge_ids]
    provenance = {
        "mode": plan.mode,
        "p": 1.0 if plan.mode == "replace" else 0.0,
        "q": [1.0] * len(covers),
        "seed": plan.seed,
        "dropped_edges": dropped,
        "added_covers": [list(c) for c in covers],
    }
    return augmented, provenance

# ----------------- Stationary Estimators -----------------

class _Layout:
    """Degree bookkeeping for random drop/attach outcomes of one (h, report) pair.

    Random variables are the R_E hyperedges (present when kept) followed by
    the component covers (present when attached). A cover equal to an R_E
    hyperedge only ORs into that hyperedge's presence.
    """

    def __init__(self, h: Hypergraph, r: SymmetryReport):
        self.n = h.n
        self.inside = np.asarray(r.edge_ids, dtype=np.int64)
        self.covers = _covers(r)
        outside = np.ones(h.m, dtype=bool)
        outside[self.inside] = False

        incidence_t = h.incidence_t.astype(np.float64)
        self.base_degree = np.asarray(incidence_t[np.flatnonzero(outside)].sum(axis=0)).ravel() \
            if h.m else np.zeros(h.n)
        self.base_total = float(h.edge_sizes[outside].sum())
        self.inside_incidence = incidence_t[self.inside].tocsr()
        self.inside_sizes = h.edge_sizes[self.inside].astype(np.float64)

        position = {h.edge(e): j for j, e in enumerate(self.inside.tolist())}
        edge_set = h.edge_set()
        self.aliases: List[Tuple[int, int]] = []
        rows, cols, sizes = [], [], []
        for i, cover in enumerate(self.covers):
            if cover in position:
                self.aliases.append((i, position[cover]))
                sizes.append(0.0)
                continue
            if cover in edge_set:
                # already present outside every component
                sizes.append(0.0)
                continue
            rows.extend([i] * len(cover))
            cols.extend(cover)
            sizes.append(float(len(cover)))
        self.cover_incidence = sp.csr_matrix(
            (np.ones(len(rows)), (rows, cols)), shape=(len(self.covers), h.n)
        )
        self.cover_sizes = np.asarray(sizes, dtype=np.float64)

    @property
    def num_variables(self) -> int:
        return len(self.inside) + len(self.covers)

    def probabilities(self, p: float, q: np.ndarray) -> np.ndarray:
        """Presence probability of every variable"""
        return np.concatenate([np.full(len(self.inside), 1.0 - p), np.asarray(q, dtype=np.float64)])

    def stationary(self, present: np.ndarray) -> np.ndarray:
        """Per-outcome pi-hat for a boolean (outcomes x variables) presence matrix.

        Vertices left without hyperedges get 0; an outcome with no hyperedges
        at all gives the zero vector.
        """
        r = len(self.inside)
        kept = present[:, :r].copy()
        attached = present[:, r:].copy()
        for i, j in self.aliases:
            kept[:, j] |= attached[:, i]
            attached[:, i] = False
        kept_f = kept.astype(np.float64)
        attached_f = attached.astype(np.float64)
        degree = np.broadcast_to(self.base_degree, (len(present), self.n)).copy()
        if r:
            degree += (self.inside_incidence.T @ kept_f.T).T
        if len(self.covers):
            degree += (self.cover_incidence.T @ attached_f.T).T
        total = self.base_total + kept_f @ self.inside_sizes + attached_f @ self.cover_sizes
        out = np.zeros_like(degree)
        np.divide(degree, total[:, None], out=out, where=total[:, None] > 0)
        return out


def _target(h: Hypergraph, allow_disconnected: bool) -> np.ndarray:
    return np.array(stationary_distribution(h, require_connected=not allow_disconnected).probs)


def _check_connected(h: Hypergraph, allow_disconnected: bool) -> None:
    if not allow_disconnected and not is_connected(h):
        raise DisconnectedHypergraphError("Stationary estimates need a connected hypergraph; "
                                          "pass allow_disconnected to use the degree-proportional target")


def _exact_mean(layout: _Layout, probs: np.ndarray, limit: int) -> np.ndarray:
    """E[pi-hat] by enumerating every outcome of the non-deterministic variables"""
    free = np.flatnonzero((probs > 0.0) & (probs < 1.0))
    if len(free) > limit:
        raise ValueError(f"{len(free)} random hyperedges exceed the exact enumeration limit of {limit}")
    fixed = probs >= 1.0
    free_probs = probs[free]
    total_outcomes = 1 << len(free)
    block = max(1, min(total_outcomes, 1 << 16))
    shifts = np.arange(len(free), dtype=np.int64)
    mean = np.zeros(layout.n)
    for start in range(0, total_outcomes, block):
        index = np.arange(start, min(start + block, total_outcomes), dtype=np.int64)
        bits = ((index[:, None] >> shifts) & 1).astype(bool)
        weights = np.where(bits, free_probs, 1.0 - free_probs).prod(axis=1)
        present = np.broadcast_to(fixed, (len(index), len(probs))).copy()
        present[:, free] = bits
        mean += weights @ layout.stationary(present)
    return mean


def _chunk_moments(layout: _Layout, probs: np.ndarray, size: int,
                   seed_seq: np.random.SeedSequence) -> Tuple[int, np.ndarray, np.ndarray]:
    rng = np.random.default_rng(seed_seq)
    present = rng.random((size, len(probs))) < probs
    values = layout.stationary(present)
    mean = values.mean(axis=0)
    return size, mean, ((values - mean) ** 2).sum(axis=0)


def _monte_carlo(layout: _Layout, probs: np.ndarray, n_samples: int, seed: int,
                 threads: int) -> StationaryEstimate:
    """Chunked Monte Carlo with one SeedSequence child per chunk; merged in chunk order"""
    sizes = utility.chunk_sizes(n_samples, config.config.monte_carlo_chunk)
    streams = np.random.SeedSequence(seed).spawn(len(sizes))
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        parts = list(pool.map(lambda args: _chunk_moments(layout, probs, *args), zip(sizes, streams)))

    count, mean, m2 = 0, np.zeros(layout.n), np.zeros(layout.n)
    for size, chunk_mean, chunk_m2 in parts:
        combined = count + size
        delta = chunk_mean - mean
        mean = mean + delta * size / combined
        m2 = m2 + chunk_m2 + delta ** 2 * count * size / combined
        count = combined
    if count > 1:
        stderr = np.sqrt(m2 / (count - 1)) / np.sqrt(count)
    else:
        stderr = np.zeros(layout.n)
    return StationaryEstimate(mean, stderr, count, "monte_carlo")


def expected_stationary(h: Hypergraph, r: SymmetryReport, plan: AugmentationPlan,
                        n_samples: Optional[int] = None, seed: Optional[int] = None,
                        threads: Optional[int] = None, allow_disconnected: bool = False) -> StationaryEstimate:
    """Monte Carlo estimate of E[pi-hat(v)] with standard errors"""
    n_samples = config.config.monte_carlo_samples if n_samples is None else int(n_samples)
    if n_samples <= 0:
        raise ValueError(f"n_samples must be positive, got {n_samples}")
    _check_connected(h, allow_disconnected)
    layout = _Layout(h, r)
    probs = layout.probabilities(plan.p, plan.q_for(r))
    start = time.perf_counter()
    estimate = _monte_carlo(layout, probs, n_samples, plan.seed if seed is None else seed,
                            config.config.threads if threads is None else threads)
    logger.info(f"Estimated E[pi-hat] from {n_samples} samples in {utility.format_duration(time.perf_counter() - start)}")
    return estimate


def exact_expected_stationary(h: Hypergraph, r: SymmetryReport, plan: AugmentationPlan,
                              allow_disconnected: bool = False, limit: Optional[int] = None) -> np.ndarray:
    _check_connected(h, allow_disconnected)
    layout = _Layout(h, r)
    probs = layout.probabilities(plan.p, plan.q_for(r))
    return _exact_mean(layout, probs, config.config.enumeration_limit if limit is None else limit)


class _Estimator:
    """E[pi-hat] as a function of q, exact when the variable count allows it"""

    def __init__(self, h: Hypergraph, r: SymmetryReport, p: float, n_samples: int, seed: int, threads: int):
        self.layout = _Layout(h, r)
        self.p = p
        self.limit = config.config.enumeration_limit
        self.exact = self.layout.num_variables <= self.limit
        self.method = "exact" if self.exact else "monte_carlo"
        self.n_samples = n_samples
        self.seed = seed
        self.threads = threads

    def __call__(self, q: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        probs = self.layout.probabilities(self.p, q)
        if self.exact:
            return _exact_mean(self.layout, probs, self.limit), np.zeros(self.layout.n)
        # common random numbers: the same seed for every q
        estimate = _monte_carlo(self.layout, probs, self.n_samples, self.seed, self.threads)
        return estimate.mean, estimate.stderr


def solve_unbiased(h: Hypergraph, r: SymmetryReport, p: float, tolerance: Optional[float] = None,
                   allow_disconnected: bool = False, n_samples: Optional[int] = None,
                   seed: Optional[int] = None, threads: Optional[int] = None) -> UnbiasedSolution:
    """Attach probabilities q_i making E[pi-hat(v_i)] = pi(v_i) at a representative
    vertex v_i of every component, for a fixed drop probability p.

    E[pi-hat(v)] = C1 + q_i * C2 is affine in q_i; each sweep solves it for every
    component in turn with the other q fixed, keeping q inside [0, 1]. After the
    sweeps a component whose residual is still outside tolerance is infeasible
    (p must change) and its unprojected q is reported.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"Drop probability must be in [0, 1], got {p}")
    tolerance = config.config.unbiased_tolerance if tolerance is None else tolerance
    _check_connected(h, allow_disconnected)
    target = _target(h, allow_disconnected)
    k = len(r)
    representatives = [c.vertices[0] for c in r.components]

    if p == 0.0 or k == 0:
        # nothing dropped: pi-hat equals pi without any cover
        zeros = [0.0] * k
        return UnbiasedSolution(p, zeros, zeros, zeros, [], "exact", 0)

    estimator = _Estimator(
        h, r, p,
        config.config.monte_carlo_samples if n_samples is None else int(n_samples),
        config.config.default_seed if seed is None else seed,
        config.config.threads if threads is None else threads,
    )
    q = np.ones(k)
    raw_q = np.ones(k)
    sweeps = 0
    for sweeps in range(1, config.config.unbiased_max_sweeps + 1):
        largest_step = 0.0
        for i, v in enumerate(representatives):
            low_q, high_q = q.copy(), q.copy()
            low_q[i], high_q[i] = 0.0, 1.0
            c1 = estimator(low_q)[0][v]
            c2 = estimator(high_q)[0][v] - c1
            if c2 != 0.0:
                raw_q[i] = (target[v] - c1) / c2
            else:
                raw_q[i] = 0.0 if abs(target[v] - c1) <= tolerance else np.inf
            new = float(np.clip(raw_q[i], 0.0, 1.0))
            largest_step = max(largest_step, abs(new - q[i]))
            q[i] = new
        logger.debug(f"Unbiased solve sweep {sweeps}: q={q.tolist()}, largest step {largest_step:.3g}")
        if largest_step <= tolerance:
            break
    else:
        logger.warning(f"Unbiased solve did not settle within {sweeps} sweeps")

    mean, stderr = estimator(q)
    residuals = [float(mean[v] - target[v]) for v in representatives]
    infeasible = [
        i for i, v in enumerate(representatives)
        if abs(residuals[i]) > tolerance + 3.0 * float(stderr[v])
    ]
    if infeasible:
        logger.warning(f"No unbiased attach probability in [0, 1] for components {infeasible} at p={p}")
    return UnbiasedSolution(
        p=float(p),
        q=q.tolist(),
        raw_q=raw_q.tolist(),
        residuals=residuals,
        infeasible=infeasible,
        method=estimator.method,
        sweeps=sweeps,
    )


def residual_bias(h: Hypergraph, r: SymmetryReport, plan: AugmentationPlan,
                  allow_disconnected: bool = False, n_samples: Optional[int] = None,
                  seed: Optional[int] = None) -> np.ndarray:
    """E[pi-hat] - pi for every vertex, exact when the variable count allows it"""
    _check_connected(h, allow_disconnected)
    layout = _Layout(h, r)
    if layout.num_variables <= config.config.enumeration_limit:
        mean = exact_expected_stationary(h, r, plan, allow_disconnected)
    else:
        mean = expected_stationary(h, r, plan, n_samples, seed, allow_disconnected=allow_disconnected).mean
    return mean - _target(h, allow_disconnected)
