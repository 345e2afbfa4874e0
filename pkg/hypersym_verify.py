"""
hypersym Verification Module
Oracle suite run by ``hypersym verify``: each check compares refinement,
symmetry finding or augmentation against an exact oracle on fixtures and
seeded random hypergraphs.
"""

import logging
import time
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

import hypersym_config as config
import hypersym_utility as utility
from hypersym_augment import (
    AugmentationPlan, attach_covers, expected_stationary, replace_components, sample, solve_unbiased,
)
from hypersym_core import (
    Hypergraph, Permutation, apply_permutation, connected_components, induced_subhypergraph, stationary_distribution,
)
from hypersym_fixtures import (
    c4_3, c4_c5, c5_3, corpus, cycle3, filled_triangle, random_connected_cases, random_hypergraph, regular_union,
    stationary_fixtures,
)
from hypersym_oracle import automorphisms, irregular_pair, neighborhood, verify_duality
from hypersym_refine import CONVERGE, gwl1, partition_of
from hypersym_symmetry import find_symmetries

logger = logging.getLogger(__name__)

SPLIT_ORDERS = [(4, 5), (4, 6), (5, 7), (4, 5, 6), (4, 6, 7)]


@dataclass
class CheckResult:
    """Outcome of one oracle check.

    An advisory check reports its counterexamples (WARN) without failing the
    suite; it tests a claim with known exceptions.
    """
    name: str
    passed: bool
    checked: int
    counterexample: Optional[Dict[str, Any]] = None
    seconds: float = 0.0
    advisory: bool = False

    @property
    def blocking(self) -> bool:
        return not self.passed and not self.advisory

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "passed": self.passed,
            "checked": self.checked,
            "counterexample": self.counterexample,
            "seconds": self.seconds,
            "advisory": self.advisory,
        }

    def summary_line(self) -> str:
        status = "PASS" if self.passed else ("WARN" if self.advisory else "FAIL")
        return f"{status} {self.name} ({self.checked} checked, {utility.format_duration(self.seconds)})"


def _timed(name: str, check: Callable[[], Tuple[int, Optional[Dict[str, Any]]]], advisory: bool = False) -> CheckResult:
    start = time.perf_counter()
    checked, counterexample = check()
    result = CheckResult(name, counterexample is None, checked, counterexample, time.perf_counter() - start, advisory)
    log = logger.info if result.passed else logger.warning
    log(result.summary_line())
    return result

# ----------------- Checks -----------------

def _duality_pairs(pairs: Sequence[Tuple[str, Hypergraph, Hypergraph]], max_iteration: int):
    checked = 0
    for name, h1, h2 in pairs:
        for i in range(1, max_iteration + 1):
            verdict = verify_duality(h1, h2, i)
            checked += 1
            if not verdict.passed:
                return checked, {"case": name, **verdict.counterexample}
    return checked, None


def check_duality_fixtures(max_iteration: Optional[int] = None) -> CheckResult:
    max_iteration = max_iteration or config.config.duality_max_iteration
    pairs = [
        ("c4_3/c5_3", c4_3(), c5_3()),
        ("t/c3", filled_triangle(), cycle3()),
        ("c3/c3", cycle3(), cycle3()),
    ]
    return _timed("duality_fixtures", lambda: _duality_pairs(pairs, max_iteration))


def check_duality_random(count: Optional[int] = None, seed: int = 0,
                         max_iteration: Optional[int] = None) -> CheckResult:
    count = config.config.duality_random_cases if count is None else count
    max_iteration = max_iteration or config.config.duality_max_iteration
    cases = random_connected_cases(count, seed)
    pairs = [(f"random{k}/random{(k + 1) % count}", cases[k], cases[(k + 1) % count]) for k in range(count)]
    return _timed("duality_random", lambda: _duality_pairs(pairs, max_iteration))


def check_limitation_exhibit() -> CheckResult:
    def run():
        h = c4_c5()
        before = gwl1(h, L=CONVERGE).num_node_classes()
        orbits = automorphisms(h, cap=h.n)
        report = find_symmetries(h, L=CONVERGE)
        after = gwl1(attach_covers(h, report), L=CONVERGE)
        details = {
            "classes_before": before,
            "orbits": len(orbits),
            "classes_after": after.num_node_classes(),
        }
        matches = partition_of(after.final_node_colors) == orbits.as_partition()
        if before != 1 or len(orbits) != 2 or not matches:
            return 1, details
        return 1, None
    return _timed("limitation_exhibit", run)


def _orbit_violation(h: Hypergraph, colors: np.ndarray) -> Optional[Dict[str, Any]]:
    orbits = automorphisms(h)
    for orbit in orbits.orbits:
        values = {int(colors[v]) for v in orbit}
        if len(values) > 1:
            return {"orbit": list(orbit), "colors": sorted(values)}
    return None


def check_soundness(cases: Sequence[Tuple[str, Hypergraph]]) -> CheckResult:
    """Converged GWL-1 colors are constant on automorphism orbits"""
    def run():
        for checked, (name, h) in enumerate(cases, start=1):
            violation = _orbit_violation(h, gwl1(h, L=CONVERGE).final_node_colors)
            if violation:
                return checked, {"case": name, **violation}
        return len(cases), None
    return _timed("gwl1_soundness", run)


def check_invariance_preservation(cases: Sequence[Tuple[str, Hypergraph]]) -> CheckResult:
    """Colors after attaching covers stay constant on orbits of the original hypergraph"""
    def run():
        for checked, (name, h) in enumerate(cases, start=1):
            augmented = attach_covers(h, find_symmetries(h, L=CONVERGE))
            violation = _orbit_violation(h, gwl1(augmented, L=CONVERGE).final_node_colors)
            if violation:
                return checked, {"case": name, **violation}
        return len(cases), None
    return _timed("invariance_preservation", run)


def check_component_regularity(cases: Sequence[Tuple[str, Hypergraph]]) -> CheckResult:
    """Every component reported at convergence is neighborhood-regular.

    Neighborhoods are compared by brute-force rooted isomorphism inside the
    component; components above the automorphism cap are skipped. Vertices
    of one component always share their depth-2 cover trees but not
    necessarily the overlap pattern of their hyperedges, so violations are
    collected and reported without failing the suite.
    """
    def run():
        checked = 0
        violations = []
        for name, h in cases:
            for component in find_symmetries(h, L=CONVERGE).components:
                if component.size > config.config.automorphism_cap:
                    continue
                sub, _, new_to_old = induced_subhypergraph(h, component.vertices)
                checked += 1
                pair = irregular_pair(sub)
                if pair is not None:
                    violations.append({
                        "case": name,
                        "component": list(component.vertices),
                        "vertices": [new_to_old[v] for v in pair],
                        "neighborhood_sizes": [neighborhood(sub, v).size for v in pair],
                    })
        if violations:
            return checked, {"violations": violations}
        return checked, None
    return _timed("component_regularity", run, advisory=True)


def check_class_split_by_size(orders_list: Sequence[Sequence[int]] = SPLIT_ORDERS) -> CheckResult:
    """After attaching covers, classes of a union of regular pieces follow piece order"""
    def run():
        for checked, orders in enumerate(orders_list, start=1):
            h = regular_union(orders)
            colors = gwl1(attach_covers(h, find_symmetries(h, L=CONVERGE)), L=CONVERGE).final_node_colors
            expected = frozenset(frozenset(c) for c in connected_components(h).vertex_sets)
            if partition_of(colors) != expected:
                return checked, {"orders": list(orders), "classes": len(partition_of(colors))}
        return len(orders_list), None
    return _timed("class_split_by_size", run)


def check_equivariance(count: int = 100, seed: int = 0) -> CheckResult:
    """Refinement partitions and symmetry reports commute with vertex permutations"""
    def run():
        rng = np.random.default_rng(seed)
        for checked in range(1, count + 1):
            n = int(rng.integers(3, 13))
            h = random_hypergraph(rng, n, int(rng.integers(2, 2 * n + 1)), max_size=4)
            perm = Permutation(rng.permutation(n).tolist())
            moved = apply_permutation(h, perm)

            def image(sets):
                return frozenset(frozenset(perm(v) for v in s) for s in sets)

            colors = gwl1(h, L=CONVERGE).final_node_colors
            moved_colors = gwl1(moved, L=CONVERGE).final_node_colors
            if partition_of(moved_colors) != image(partition_of(colors)):
                return checked, {"edges": h.edges, "permutation": list(perm.mapping), "part": "gwl1"}
            report = find_symmetries(h)
            moved_report = find_symmetries(moved)
            if frozenset(frozenset(s) for s in moved_report.vertex_sets) != image(report.vertex_sets):
                return checked, {"edges": h.edges, "permutation": list(perm.mapping), "part": "find_symmetries"}
        return count, None
    return _timed("equivariance", run)


def _stationary_violation(name: str, h: Hypergraph, p: float, seed: int,
                          n_samples: Optional[int]) -> Optional[Dict[str, Any]]:
    report = find_symmetries(h, L=CONVERGE)
    solution = solve_unbiased(h, report, p, allow_disconnected=True)
    if not solution.feasible or not all(0.0 <= q <= 1.0 for q in solution.q):
        return {"case": name, "p": p, **solution.to_dict()}
    plan = AugmentationPlan.for_report(report, p=p, q=solution.q, seed=seed)
    estimate = expected_stationary(h, report, plan, n_samples, seed, allow_disconnected=True)
    target = stationary_distribution(h, require_connected=False).probs
    for c in report.components:
        v = c.vertices[0]
        deviation = abs(float(estimate.mean[v]) - float(target[v]))
        if deviation > 3.0 * float(estimate.stderr[v]):
            return {"case": name, "p": p, "q": solution.q, "vertex": v,
                    "deviation": deviation, "stderr": float(estimate.stderr[v])}
    return None


def check_stationary_unbiased(drop_probabilities: Sequence[float] = (0.8, 0.9), seed: int = 0,
                              n_samples: Optional[int] = None, random_count: int = 2) -> CheckResult:
    """Solved attach probabilities lie in [0, 1] and make the Monte Carlo mean of
    pi-hat agree with pi within 3 standard errors at every component
    representative; the degenerate sampling identities hold exactly"""
    def run():
        checked = 0
        for name, h in stationary_fixtures(seed, random_count):
            for p in drop_probabilities:
                checked += 1
                violation = _stationary_violation(name, h, p, seed, n_samples)
                if violation:
                    return checked, violation
        h = c4_c5()
        report = find_symmetries(h, L=CONVERGE)
        identity = sample(h, report, AugmentationPlan.for_report(report, p=0.0, q=0.0))
        replaced = sample(h, report, AugmentationPlan.for_report(report, p=1.0, q=1.0))
        checked += 2
        if identity != h or replaced != replace_components(h, report):
            return checked, {"identity": identity == h, "replace": replaced == replace_components(h, report)}
        return checked, None
    return _timed("stationary_unbiased", run)


def check_hypergraph(h: Hypergraph, name: str = "input", max_iteration: Optional[int] = None) -> List[CheckResult]:
    """Checks for a user-supplied hypergraph: duality of each connected
    component with itself, and the orbit checks when it is small enough"""
    max_iteration = max_iteration or config.config.duality_max_iteration
    pairs = []
    for index, vertices in enumerate(connected_components(h).vertex_sets):
        sub, _, _ = induced_subhypergraph(h, vertices)
        if sub.m:
            pairs.append((f"{name}[{index}]", sub, sub))
    results = [_timed(f"duality_{name}", lambda: _duality_pairs(pairs, max_iteration))]
    if h.n <= config.config.automorphism_cap:
        results.append(check_soundness([(name, h)]))
        results.append(check_invariance_preservation([(name, h)]))
    return results


def run_suite(extra: Optional[Sequence[Tuple[str, Hypergraph]]] = None, random_cases: Optional[int] = None,
              seed: Optional[int] = None, fixtures: bool = True) -> List[CheckResult]:
    """Run the oracle checks; ``extra`` adds per-hypergraph checks"""
    seed = config.config.default_seed if seed is None else seed
    results: List[CheckResult] = []
    if fixtures:
        cases = corpus(seed)
        results.extend([
            check_duality_fixtures(),
            check_duality_random(random_cases, seed),
            check_limitation_exhibit(),
            check_soundness(cases),
            check_invariance_preservation(cases),
            check_component_regularity(cases),
            check_class_split_by_size(),
            check_equivariance(seed=seed),
            check_stationary_unbiased(seed=seed),
        ])
    for name, h in extra or []:
        results.extend(check_hypergraph(h, name))
    failed = [r.name for r in results if r.blocking]
    warned = [r.name for r in results if not r.passed and r.advisory]
    logger.info(f"Verification finished: {len(results) - len(failed) - len(warned)} passed, "
                f"{len(warned)} warned, {len(failed)} failed")
    return results
