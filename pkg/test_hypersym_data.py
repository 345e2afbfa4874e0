"""
Unit tests for hypersym_data module
"""

import io
import json
import os
import shutil
import tempfile
import unittest

import numpy as np
from pydantic import ValidationError

from hypersym_core import build
from hypersym_data import (
    DataFormatError, SplitSpec, TemporalHypergraph, carry_timestamps, dataset_exists, detect_format,
    dump_json_hypergraph, emit_simplex_list, hypergraph_from_json, hypergraph_to_json, load_dataset,
    negative_sample, parse_simplex_list, percentile_nearest_rank, save_simplex_list, simplex_list_paths,
    temporal_split,
)
from hypersym_fixtures import complete_uniform, cycle3, hypercycle, path


class TestTemporalHypergraph(unittest.TestCase):
    """Test cases for the timestamped hypergraph container"""

    def test_default_labels(self):
        """Test that labels default to the vertex ids"""
        th = TemporalHypergraph(path(3), [1.0, 2.0])
        self.assertEqual(th.labels, [0, 1, 2])

    def test_timestamp_count_checked(self):
        """Test that every hyperedge needs one timestamp"""
        with self.assertRaises(DataFormatError):
            TemporalHypergraph(path(3), [1.0])

    def test_timestamps_finite(self):
        """Test that NaN timestamps are rejected"""
        with self.assertRaises(DataFormatError):
            TemporalHypergraph(path(3), [1.0, float("nan")])


class TestSimplexList(unittest.TestCase):
    """Test cases for the three-stream simplex-list format"""

    def test_single_simplex(self):
        """Test that one 3-simplex becomes hyperedge {0,1,2} at t=5.0"""
        th = parse_simplex_list("3\n", "1\n2\n3\n", "5.0\n")
        self.assertEqual(th.hypergraph.n, 3)
        self.assertEqual(th.hypergraph.edges, [(0, 1, 2)])
        self.assertEqual(th.timestamps.tolist(), [5.0])
        self.assertEqual(th.labels, [1, 2, 3])

    def test_duplicates_keep_earliest(self):
        """Test that a repeated simplex keeps its earliest timestamp"""
        th = parse_simplex_list("2 2 2", "1 2 2 1 2 3", "7 3 4")
        self.assertEqual(th.hypergraph.edges, [(0, 1), (1, 2)])
        self.assertEqual(th.timestamps.tolist(), [3.0, 4.0])

    def test_singletons_dropped(self):
        """Test that singleton simplices are dropped with their labels"""
        with self.assertLogs("hypersym_data", level="WARNING"):
            th = parse_simplex_list(["1", "2"], ["5", "1", "2"], ["1", "2"])
        self.assertEqual(th.hypergraph.n, 2)
        self.assertEqual(th.labels, [1, 2])

    def test_length_mismatch(self):
        """Test that nverts and simplices must agree"""
        with self.assertRaises(DataFormatError):
            parse_simplex_list("3", "1 2", "5.0")

    def test_times_mismatch(self):
        """Test that there is one timestamp per simplex"""
        with self.assertRaises(DataFormatError):
            parse_simplex_list("2", "1 2", "5.0 6.0")

    def test_non_numeric(self):
        """Test that non-numeric tokens are reported"""
        with self.assertRaises(DataFormatError):
            parse_simplex_list("2", "1 x", "5.0")

    def test_file_objects(self):
        """Test that open text streams are accepted"""
        th = parse_simplex_list(io.StringIO("2\n"), io.StringIO("4\n9\n"), io.StringIO("1.5\n"))
        self.assertEqual(th.labels, [4, 9])

    def test_emit_original_labels(self):
        """Test that emitted streams use the original labels"""
        th = parse_simplex_list("3", "1 2 3", "5.0")
        self.assertEqual(emit_simplex_list(th), ("3\n", "1\n2\n3\n", "5.0\n"))

    def test_file_round_trip(self):
        """Test saving and loading a simplex-list prefix"""
        th = parse_simplex_list("2 3 2", "10 20 20 30 40 10 40", "1 2.25 3")
        temp_dir = tempfile.mkdtemp()
        try:
            prefix = os.path.join(temp_dir, "toy")
            save_simplex_list(th, prefix)
            for part in simplex_list_paths(prefix):
                self.assertTrue(os.path.isfile(part))
            self.assertTrue(dataset_exists(prefix))
            self.assertEqual(detect_format(prefix), "simplex")
            self.assertEqual(load_dataset(prefix), th)
        finally:
            shutil.rmtree(temp_dir)

    def test_missing_prefix(self):
        """Test that a missing simplex-list prefix raises FileNotFoundError"""
        with self.assertRaises(FileNotFoundError):
            load_dataset("/nonexistent/prefix", fmt="simplex")


class TestJsonFormat(unittest.TestCase):
    """Test cases for the JSON hypergraph format"""

    def test_positions_as_timestamps(self):
        """Test that missing timestamps default to hyperedge positions"""
        th = hypergraph_from_json({"n": 4, "edges": [[0, 1], [1, 2, 3]]})
        self.assertEqual(th.timestamps.tolist(), [0.0, 1.0])

    def test_duplicates_keep_earliest(self):
        """Test that duplicate hyperedges keep the earliest timestamp"""
        th = hypergraph_from_json({"n": 2, "edges": [[0, 1], [1, 0]], "timestamps": [5, 2]})
        self.assertEqual(th.hypergraph.m, 1)
        self.assertEqual(th.timestamps.tolist(), [2.0])

    def test_missing_keys(self):
        """Test that n and edges are required"""
        with self.assertRaises(DataFormatError):
            hypergraph_from_json({"edges": []})

    def test_timestamp_count(self):
        """Test that timestamps must match the hyperedges"""
        with self.assertRaises(DataFormatError):
            hypergraph_from_json({"n": 2, "edges": [[0, 1]], "timestamps": [1, 2]})

    def test_plain_hypergraph(self):
        """Test that a bare hypergraph serializes without timestamps"""
        self.assertEqual(hypergraph_to_json(path(3)), {"n": 3, "edges": [[0, 1], [1, 2]]})

    def test_file_round_trip(self):
        """Test dumping and loading a JSON file"""
        th = TemporalHypergraph(build(5, [[0, 1, 2], [2, 3], [3, 4]]), [0.5, 1.25, 3.0])
        temp_dir = tempfile.mkdtemp()
        try:
            target = os.path.join(temp_dir, "toy.json")
            dump_json_hypergraph(th, target)
            with open(target, encoding="utf-8") as f:
                self.assertEqual(json.load(f)["timestamps"], [0.5, 1.25, 3.0])
            self.assertEqual(detect_format(target), "json")
            self.assertEqual(load_dataset(target), th)
        finally:
            shutil.rmtree(temp_dir)

    def test_invalid_json(self):
        """Test that malformed JSON raises DataFormatError"""
        with tempfile.NamedTemporaryFile("w", suffix=".json", delete=False) as f:
            f.write("{not json")
        try:
            with self.assertRaises(DataFormatError):
                load_dataset(f.name)
        finally:
            os.unlink(f.name)


class TestCarryTimestamps(unittest.TestCase):
    """Test cases for carrying timestamps onto augmented hypergraphs"""

    def test_new_edges_get_latest(self):
        """Test that known hyperedges keep their time and covers get the latest"""
        th = TemporalHypergraph(path(3), [1.0, 4.0], [7, 8, 9])
        carried = carry_timestamps(th, build(3, [[0, 1], [1, 2], [0, 1, 2]]))
        self.assertEqual(carried.timestamps.tolist(), [1.0, 4.0, 4.0])
        self.assertEqual(carried.labels, [7, 8, 9])

    def test_vertex_count_checked(self):
        """Test that the vertex set must not change"""
        with self.assertRaises(ValueError):
            carry_timestamps(TemporalHypergraph(path(3), [1.0, 2.0]), path(4))


class TestPercentile(unittest.TestCase):
    """Test cases for nearest-rank percentiles"""

    def test_one_to_ten(self):
        """Test P80 = 8 and P85 = 9 on 1..10"""
        values = list(range(1, 11))
        self.assertEqual(percentile_nearest_rank(values, 0.80), 8.0)
        self.assertEqual(percentile_nearest_rank(values, 0.85), 9.0)
        self.assertEqual(percentile_nearest_rank(values, 1.0), 10.0)

    def test_empty(self):
        """Test that an empty sequence has no percentile"""
        with self.assertRaises(ValueError):
            percentile_nearest_rank([], 0.5)


class TestNegativeSampling(unittest.TestCase):
    """Test cases for negative k-set sampling"""

    def test_complete_hypergraph_shortfall(self):
        """Test that K4^3 has no negative 3-sets"""
        with self.assertLogs("hypersym_data", level="WARNING"):
            sample = negative_sample(complete_uniform(4, 3), 3, 2, seed=0)
        self.assertEqual(sample.sets, [])
        self.assertEqual(sample.shortfall, 2)
        self.assertEqual(sample.available, 0)

    def test_only_candidate(self):
        """Test that C3 has exactly one negative 3-set"""
        sample = negative_sample(cycle3(), 3, 1, seed=0)
        self.assertEqual(sample.sets, [(0, 1, 2)])
        self.assertEqual(sample.shortfall, 0)

    def test_rejection_shortfall(self):
        """Test that rejection sampling reports its shortfall"""
        with self.assertLogs("hypersym_data", level="WARNING"):
            sample = negative_sample(complete_uniform(4, 3), 3, 1, seed=0, exact_limit=0)
        self.assertEqual(sample.shortfall, 1)
        self.assertIsNone(sample.available)

    def test_sets_are_valid(self):
        """Test that sampled sets are distinct non-hyperedges of size k"""
        h = hypercycle(8, 3)
        sample = negative_sample(h, 3, 10, seed=4)
        self.assertEqual(len(sample.sets), 10)
        self.assertEqual(len(set(sample.sets)), 10)
        edges = h.edge_set()
        for candidate in sample.sets:
            self.assertEqual(len(candidate), 3)
            self.assertNotIn(candidate, edges)

    def test_seeded_determinism(self):
        """Test that a seed fixes the sample"""
        h = hypercycle(8, 3)
        self.assertEqual(negative_sample(h, 3, 5, seed=9).sets, negative_sample(h, 3, 5, seed=9).sets)

    def test_size_checked(self):
        """Test that k must fit in the vertex set"""
        with self.assertRaises(ValueError):
            negative_sample(path(3), 4, 1)


class TestSplitSpec(unittest.TestCase):
    """Test cases for split parameters"""

    def test_defaults(self):
        """Test the default percentiles and target size"""
        spec = SplitSpec()
        self.assertEqual((spec.train_pct, spec.val_pct, spec.target_size), (0.80, 0.85, 3))

    def test_order_enforced(self):
        """Test that train_pct must be below val_pct"""
        with self.assertRaises(ValidationError):
            SplitSpec(train_pct=0.9, val_pct=0.8)

    def test_target_size(self):
        """Test that targets need at least two vertices"""
        with self.assertRaises(ValidationError):
            SplitSpec(target_size=1)


class TestTemporalSplit(unittest.TestCase):
    """Test cases for temporal train/val/test splits"""

    def test_percentile_cuts(self):
        """Test that timestamps 1..10 put t <= 8 in train"""
        th = TemporalHypergraph(path(11), np.arange(1, 11, dtype=np.float64))
        split = temporal_split(th, SplitSpec())
        self.assertEqual((split.train_threshold, split.val_threshold), (8.0, 9.0))
        self.assertEqual(len(split.train.observed), 8)
        self.assertEqual(split.val.observed, [(8, 9)])
        self.assertEqual(split.test.observed, [(9, 10)])

    def test_equal_timestamps(self):
        """Test that identical timestamps all land in train"""
        th = TemporalHypergraph(path(6), [2.0] * 5)
        split = temporal_split(th)
        self.assertEqual(len(split.train.observed), 5)
        self.assertEqual(split.val.observed, [])
        self.assertEqual(split.test.observed, [])

    def test_raising_train_pct_keeps_train(self):
        """Test that a larger train percentile never drops a train hyperedge"""
        stamps = np.random.default_rng(2).integers(0, 5, size=20).astype(np.float64)
        th = TemporalHypergraph(path(21), stamps)
        smaller = temporal_split(th, SplitSpec(train_pct=0.5, val_pct=0.9)).train.observed
        larger = temporal_split(th, SplitSpec(train_pct=0.8, val_pct=0.9)).train.observed
        self.assertTrue(set(smaller) <= set(larger))

    def test_no_targets(self):
        """Test that without size-3 hyperedges there are no positives or negatives"""
        th = TemporalHypergraph(path(6), [1.0, 2.0, 3.0, 4.0, 5.0])
        split = temporal_split(th)
        for _, part in split.parts():
            self.assertEqual(part.positives, [])
            self.assertEqual(part.negatives, [])
            self.assertEqual(part.shortfall, 0)

    def test_positives_and_negatives(self):
        """Test that half the targets become positives with matching negatives"""
        h = hypercycle(8, 3)
        split = temporal_split(TemporalHypergraph(h, [0.0] * 8), SplitSpec(seed=3))
        train = split.train
        self.assertEqual(len(train.positives), 4)
        self.assertEqual(len(train.observed), 4)
        self.assertEqual(set(train.positives) | set(train.observed), set(h.edges))
        self.assertEqual(len(train.negatives), 4)
        edges = h.edge_set()
        self.assertTrue(all(s not in edges for s in train.negatives))

    def test_negative_ratio(self):
        """Test that the ratio scales the negative count"""
        th = TemporalHypergraph(hypercycle(8, 3), [0.0] * 8)
        split = temporal_split(th, SplitSpec(negative_ratio=0.5))
        self.assertEqual(len(split.train.negatives), 2)

    def test_seeded_determinism(self):
        """Test that one seed gives one split"""
        th = TemporalHypergraph(hypercycle(8, 3), np.arange(8, dtype=np.float64))
        spec = SplitSpec(seed=11)
        self.assertEqual(temporal_split(th, spec).to_dict(), temporal_split(th, spec).to_dict())

    def test_bundle_layout(self):
        """Test the serialized split bundle"""
        th = TemporalHypergraph(hypercycle(8, 3), np.arange(8, dtype=np.float64))
        bundle = temporal_split(th).to_dict()
        self.assertEqual(set(bundle), {"train", "val", "test", "thresholds", "spec"})
        self.assertEqual(bundle["spec"]["target_size"], 3)

    def test_empty_rejected(self):
        """Test that a hypergraph without hyperedges cannot be split"""
        with self.assertRaises(DataFormatError):
            temporal_split(TemporalHypergraph(build(3, []), []))


if __name__ == '__main__':
    unittest.main()
