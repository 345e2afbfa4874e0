"""
Unit tests for hypersym_oracle module
"""

import unittest

from hypersym_core import DisconnectedHypergraphError, build, star_expansion
from hypersym_fixtures import c4_3, c4_c5, c5_3, cycle3, filled_triangle, path, random_connected_cases
from hypersym_oracle import (
    BLUE, RED, CoverCoder, OracleCapError, automorphisms, canonical_code, is_neighborhood_regular,
    irregular_pair, k_set_isomorphic, neighborhood, neighborhoods_isomorphic, rooted_isomorphic, stabilizers,
    trees_isomorphic, unroll, verify_duality,
)


class TestUnroll(unittest.TestCase):
    """Test cases for universal-cover unrolling"""

    def test_depth_zero(self):
        """Test that depth 0 gives only the root"""
        b = star_expansion(cycle3())
        tree = unroll(b, 4, 0)
        self.assertEqual(len(tree), 1)
        self.assertEqual(tree.colors, (BLUE,))

    def test_cycle_depth_two(self):
        """Test that a C3 vertex has two hyperedge children with one vertex each"""
        tree = unroll(star_expansion(cycle3()), 0, 2)
        self.assertEqual(tree.colors[0], RED)
        self.assertEqual(len(tree.children[0]), 2)
        for child in tree.children[0]:
            self.assertEqual(tree.colors[child], BLUE)
            self.assertEqual(len(tree.children[child]), 1)
            self.assertEqual(tree.colors[tree.children[child][0]], RED)

    def test_no_backtracking_but_cycles_unroll(self):
        """Test that the cover keeps going around a cycle"""
        tree = unroll(star_expansion(cycle3()), 0, 6)
        self.assertEqual(len(tree), 1 + 2 + 2 + 2 + 2 + 2 + 2)

    def test_hyperedge_roots_of_c4_and_c5(self):
        """Test that hyperedge roots of C4^3 and C5^3 unroll identically"""
        b4, b5 = star_expansion(c4_3()), star_expansion(c5_3())
        for depth in range(5):
            self.assertEqual(canonical_code(unroll(b4, 4, depth)), canonical_code(unroll(b5, 5, depth)))

    def test_invalid_root(self):
        """Test that roots outside the star expansion are rejected"""
        with self.assertRaises(ValueError):
            unroll(star_expansion(cycle3()), 6, 1)


class TestCanonicalCodes(unittest.TestCase):
    """Test cases for rooted tree codes"""

    def test_single_nodes(self):
        """Test that two single red nodes with one label agree"""
        b = star_expansion(cycle3())
        self.assertEqual(canonical_code(unroll(b, 0, 0)), canonical_code(unroll(b, 1, 0)))

    def test_c4_c5_vertex_roots(self):
        """Test that depth-2 vertex roots of C4^3 and C5^3 agree"""
        self.assertEqual(canonical_code(unroll(star_expansion(c4_3()), 0, 2)),
                         canonical_code(unroll(star_expansion(c5_3()), 0, 2)))

    def test_triangle_versus_cycle(self):
        """Test that depth-2 vertex roots of the filled triangle and C3 differ"""
        self.assertNotEqual(canonical_code(unroll(star_expansion(filled_triangle()), 0, 2)),
                            canonical_code(unroll(star_expansion(cycle3()), 0, 2)))

    def test_labels_matter(self):
        """Test that vertex labels enter the code"""
        b = star_expansion(path(3))
        self.assertNotEqual(canonical_code(unroll(b, 0, 2, labels=[0, 0, 1])),
                            canonical_code(unroll(b, 2, 2, labels=[0, 0, 1])))

    def test_networkx_agrees(self):
        """Test that equal codes coincide with networkx rooted isomorphism"""
        trees = []
        for h in (cycle3(), filled_triangle(), c4_3(), c5_3(), path(4)):
            b = star_expansion(h)
            trees.extend(unroll(b, root, 3) for root in (0, h.n))
        for first in trees:
            for second in trees:
                self.assertEqual(canonical_code(first) == canonical_code(second), trees_isomorphic(first, second))

    def test_cover_coder_matches_codes(self):
        """Test that interned ids agree with explicit codes"""
        b = star_expansion(path(4))
        coder = CoverCoder(b)
        for u in range(b.num_nodes):
            for v in range(b.num_nodes):
                same = canonical_code(unroll(b, u, 3)) == canonical_code(unroll(b, v, 3))
                self.assertEqual(coder.code(u, 3) == coder.code(v, 3), same)


class TestDuality(unittest.TestCase):
    """Test cases for the refinement/cover duality check"""

    def test_c4_c5(self):
        """Test that C4^3 and C5^3 agree everywhere at i=3"""
        verdict = verify_duality(c4_3(), c5_3(), 3)
        self.assertTrue(verdict.passed)
        self.assertEqual(verdict.equal_node_pairs, verdict.node_pairs)
        self.assertEqual(verdict.node_pairs, 20)

    def test_triangle_cycle(self):
        """Test that the filled triangle and C3 differ everywhere at i=1"""
        verdict = verify_duality(filled_triangle(), cycle3(), 1)
        self.assertTrue(verdict.passed)
        self.assertEqual(verdict.equal_node_pairs, 0)

    def test_reflexive(self):
        """Test that a hypergraph is dual to itself"""
        for i in (1, 2, 3):
            self.assertTrue(verify_duality(path(4), path(4), i).passed)

    def test_random_pairs(self):
        """Test duality on seeded random connected hypergraphs"""
        cases = random_connected_cases(20, seed=8)
        for k in range(len(cases) - 1):
            for i in (1, 2):
                verdict = verify_duality(cases[k], cases[k + 1], i)
                self.assertTrue(verdict.passed, verdict.to_dict())

    def test_disconnected_rejected(self):
        """Test that disconnected inputs are refused"""
        with self.assertRaises(DisconnectedHypergraphError):
            verify_duality(c4_c5(), c4_3(), 1)

    def test_iteration_checked(self):
        """Test that i must be positive"""
        with self.assertRaises(ValueError):
            verify_duality(c4_3(), c4_3(), 0)


class TestAutomorphisms(unittest.TestCase):
    """Test cases for brute-force automorphisms"""

    def test_cycle(self):
        """Test that C3 has one orbit and six automorphisms"""
        orbits = automorphisms(cycle3())
        self.assertEqual(len(orbits), 1)
        self.assertEqual(orbits.group_size, 6)

    def test_path(self):
        """Test that the path has orbits {0,2} and {1}"""
        orbits = automorphisms(path(3))
        self.assertEqual(orbits.as_partition(), frozenset({frozenset({0, 2}), frozenset({1})}))
        self.assertEqual(orbits.group_size, 2)

    def test_c4_3(self):
        """Test that every permutation of C4^3 is an automorphism"""
        orbits = automorphisms(c4_3())
        self.assertEqual(len(orbits), 1)
        self.assertEqual(orbits.group_size, 24)

    def test_union_two_orbits(self):
        """Test that C4^3 + C5^3 has two orbits"""
        orbits = automorphisms(c4_c5(), cap=9)
        self.assertEqual(orbits.as_partition(), frozenset({frozenset(range(4)), frozenset(range(4, 9))}))

    def test_cap(self):
        """Test that enumeration above the cap is refused"""
        with self.assertRaises(OracleCapError):
            automorphisms(c4_c5())

    def test_stabilizers_without_edges(self):
        """Test that every permutation stabilizes an edgeless hypergraph"""
        self.assertEqual(len(stabilizers(build(3, []))), 6)


class TestKSetIsomorphism(unittest.TestCase):
    """Test cases for k-node set isomorphism"""

    def test_identity(self):
        """Test that a set is isomorphic to itself"""
        self.assertTrue(k_set_isomorphic(path(3), {0, 1}, {0, 1}))

    def test_cycle_pairs(self):
        """Test that all pairs of C3 are isomorphic"""
        self.assertTrue(k_set_isomorphic(cycle3(), {0, 1}, {1, 2}))
        self.assertTrue(k_set_isomorphic(cycle3(), {0, 2}, {0, 1}))

    def test_path_pairs(self):
        """Test {0,1} ~ {1,2} and {0,1} !~ {0,2} on the path"""
        self.assertTrue(k_set_isomorphic(path(3), {0, 1}, {1, 2}))
        self.assertFalse(k_set_isomorphic(path(3), {0, 1}, {0, 2}))

    def test_size_mismatch(self):
        """Test that sets of different sizes are rejected"""
        with self.assertRaises(ValueError):
            k_set_isomorphic(path(3), {0}, {0, 1})


class TestNeighborhoods(unittest.TestCase):
    """Test cases for neighborhood regularity"""

    def test_regular_hypercycles(self):
        """Test that C4^3 and C5^3 are neighborhood-regular"""
        self.assertTrue(is_neighborhood_regular(c4_3()))
        self.assertTrue(is_neighborhood_regular(c5_3()))

    def test_path_not_regular(self):
        """Test that the path has an end and a middle"""
        self.assertFalse(is_neighborhood_regular(path(3)))
        self.assertTrue(neighborhoods_isomorphic(path(3), 0, 2))
        self.assertFalse(neighborhoods_isomorphic(path(3), 0, 1))

    def test_neighborhood(self):
        """Test that N(v) keeps the incident hyperedges with the root as vertex 0"""
        nb = neighborhood(build(5, [[1, 2, 3], [3, 4], [0, 1]]), 3)
        self.assertEqual(nb.vertices, (3, 1, 2, 4))
        self.assertEqual(nb.size, 4)
        self.assertEqual(nb.hypergraph.edge_set(), frozenset({(0, 1, 2), (0, 3)}))

    def test_isolated_vertex_neighborhood(self):
        """Test that a vertex without hyperedges has a one-vertex neighborhood"""
        nb = neighborhood(build(4, [[0, 1, 2]]), 3)
        self.assertEqual((nb.size, nb.hypergraph.m), (1, 0))
        with self.assertRaises(ValueError):
            neighborhood(path(3), 3)

    def test_rooted_isomorphism(self):
        """Test that the root must map to the root"""
        self.assertTrue(rooted_isomorphic(path(3), build(3, [[0, 2], [1, 2]])))
        self.assertFalse(rooted_isomorphic(path(3), build(3, [[0, 1], [0, 2]])))

    def test_overlap_position_matters(self):
        """Test equal sizes and degrees where the small hyperedge sits differently"""
        bridge = build(5, [[0, 1, 2], [0, 3, 4], [1, 3]])
        self.assertTrue(rooted_isomorphic(bridge, build(5, [[0, 1, 2], [0, 3, 4], [2, 4]])))
        self.assertFalse(rooted_isomorphic(bridge, build(5, [[0, 1, 2], [0, 3, 4], [1, 2]])))

    def test_overlap_pattern_distinguished(self):
        """Test vertices with equal hyperedge sizes but different overlaps"""
        h = build(6, [[0, 1, 2], [0, 1, 3], [2, 4, 5], [3, 4, 5]])
        self.assertTrue(neighborhoods_isomorphic(h, 0, 1))
        self.assertFalse(neighborhoods_isomorphic(h, 0, 2))
        self.assertEqual(irregular_pair(h), (0, 2))
        self.assertFalse(is_neighborhood_regular(h))
        b = star_expansion(h)
        self.assertEqual(canonical_code(unroll(b, 0, 2)), canonical_code(unroll(b, 2, 2)))

    def test_cap(self):
        """Test that a neighborhood above the cap is refused"""
        h = build(6, [[0, 1, 2, 3, 4, 5]])
        self.assertTrue(rooted_isomorphic(h, h))
        with self.assertRaises(OracleCapError):
            rooted_isomorphic(h, h, cap=5)


if __name__ == '__main__':
    unittest.main()
