"""
Unit tests for hypersym_verify module
"""

import unittest
from unittest.mock import patch

import numpy as np

import hypersym_verify as verify
from hypersym_augment import StationaryEstimate
from hypersym_core import build
from hypersym_fixtures import c4_c5, corpus, cycle3, fano_plane, hypercycle, path
from hypersym_refine import ColorHistory


class TestCheckResult(unittest.TestCase):
    """Test cases for check results"""

    def test_summary_line(self):
        """Test the pass and fail summary lines"""
        passed = verify.CheckResult("demo", True, 3)
        failed = verify.CheckResult("demo", False, 1, {"case": "x"})
        self.assertTrue(passed.summary_line().startswith("PASS demo (3 checked"))
        self.assertTrue(failed.summary_line().startswith("FAIL demo"))
        self.assertEqual(failed.to_dict()["counterexample"], {"case": "x"})
        self.assertTrue(failed.blocking)

    def test_advisory_warns(self):
        """Test that an advisory failure warns without blocking"""
        warned = verify.CheckResult("demo", False, 2, {"case": "x"}, advisory=True)
        self.assertTrue(warned.summary_line().startswith("WARN demo"))
        self.assertFalse(warned.blocking)
        self.assertTrue(warned.to_dict()["advisory"])


class TestChecks(unittest.TestCase):
    """Test cases for the individual oracle checks"""

    @classmethod
    def setUpClass(cls):
        cls.cases = corpus(seed=0, random_count=6)

    def test_duality_fixtures(self):
        """Test the fixture duality pairs"""
        result = verify.check_duality_fixtures()
        self.assertTrue(result.passed, result.counterexample)
        self.assertEqual(result.checked, 9)

    def test_duality_random(self):
        """Test duality on a few seeded random pairs"""
        result = verify.check_duality_random(count=10, seed=1)
        self.assertTrue(result.passed, result.counterexample)
        self.assertEqual(result.checked, 30)

    def test_limitation_exhibit(self):
        """Test the one-class / two-orbit union and its repair by covers"""
        result = verify.check_limitation_exhibit()
        self.assertTrue(result.passed, result.counterexample)

    def test_soundness(self):
        """Test that refinement colors are constant on orbits"""
        result = verify.check_soundness(self.cases)
        self.assertTrue(result.passed, result.counterexample)
        self.assertEqual(result.checked, len(self.cases))

    def test_invariance_preservation(self):
        """Test that covers keep colors constant on the original orbits"""
        result = verify.check_invariance_preservation(self.cases)
        self.assertTrue(result.passed, result.counterexample)

    def test_component_regularity(self):
        """Test that components of vertex-transitive pieces are neighborhood-regular"""
        cases = [("c4_c5", c4_c5()), ("fano", fano_plane()), ("c6_3", hypercycle(6, 3))]
        result = verify.check_component_regularity(cases)
        self.assertTrue(result.passed, result.counterexample)
        self.assertEqual(result.checked, 4)

    def test_irregular_component_reported(self):
        """Test that a component whose hyperedges overlap unevenly is reported"""
        h = build(6, [[0, 1, 2], [0, 1, 3], [2, 4, 5], [3, 4, 5]])
        result = verify.check_component_regularity([("overlap_pairs", h)])
        self.assertFalse(result.passed)
        self.assertTrue(result.advisory)
        self.assertFalse(result.blocking)
        self.assertEqual(result.counterexample["violations"], [{
            "case": "overlap_pairs",
            "component": [0, 1, 2, 3, 4, 5],
            "vertices": [0, 2],
            "neighborhood_sizes": [4, 5],
        }])

    def test_corpus_regularity_exceptions(self):
        """Test that the corpus run surfaces the uneven-overlap fixture"""
        result = verify.check_component_regularity(self.cases)
        self.assertGreater(result.checked, 0)
        self.assertFalse(result.passed)
        cases = [v["case"] for v in result.counterexample["violations"]]
        self.assertIn("overlap_pairs", cases)
        self.assertNotIn("c4_3", cases)

    def test_class_split_by_size(self):
        """Test that covers separate regular pieces of different orders"""
        result = verify.check_class_split_by_size()
        self.assertTrue(result.passed, result.counterexample)

    def test_equivariance(self):
        """Test equivariance on a few random permutations"""
        result = verify.check_equivariance(count=20, seed=3)
        self.assertTrue(result.passed, result.counterexample)

    def test_stationary_unbiased(self):
        """Test the unbiased solve with 3-sigma sampling agreement on the union
        and two random regular unions, plus the degenerate identities"""
        result = verify.check_stationary_unbiased()
        self.assertTrue(result.passed, result.counterexample)
        self.assertEqual(result.checked, 8)

    def test_stationary_deviation_reported(self):
        """Test that an estimate far from pi is reported with its vertex"""
        def far_off(h, r, plan, *args, **kwargs):
            return StationaryEstimate(np.zeros(h.n), np.full(h.n, 1e-6), 10)
        with patch("hypersym_verify.expected_stationary", side_effect=far_off):
            result = verify.check_stationary_unbiased(drop_probabilities=(0.8,), random_count=0)
        self.assertFalse(result.passed)
        self.assertEqual(result.counterexample["case"], "c4_c5")
        self.assertEqual(result.counterexample["vertex"], 0)

    def test_soundness_failure_reported(self):
        """Test that a color split inside an orbit is reported with its case"""
        split = ColorHistory((np.array([0, 1, 2]),), (np.zeros(3, dtype=np.int64),), 0)
        with patch("hypersym_verify.gwl1", return_value=split):
            result = verify.check_soundness([("c3", cycle3())])
        self.assertFalse(result.passed)
        self.assertEqual(result.counterexample["case"], "c3")
        self.assertEqual(result.counterexample["colors"], [0, 1, 2])


class TestRunSuite(unittest.TestCase):
    """Test cases for running the suite"""

    def test_user_hypergraph_only(self):
        """Test that extra hypergraphs run without the fixture checks"""
        results = verify.run_suite(extra=[("p4", path(4))], fixtures=False)
        self.assertEqual([r.name for r in results], ["duality_p4", "gwl1_soundness", "invariance_preservation"])
        self.assertTrue(all(r.passed for r in results))

    def test_large_hypergraph_skips_orbit_checks(self):
        """Test that only duality runs above the automorphism cap"""
        results = verify.check_hypergraph(path(10), "p10")
        self.assertEqual(len(results), 1)
        self.assertTrue(results[0].passed)


if __name__ == '__main__':
    unittest.main()
