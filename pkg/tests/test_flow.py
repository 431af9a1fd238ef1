"""
Test Suite for Flow Module

Tests classical max flow, the quantum min-cut, edge-disjoint paths and
the power-of-d transforms.
"""

import unittest

from hypothesis import given, settings
from hypothesis import strategies as st

from core.errors import ParameterError, PowerOfBaseError
from core.flow import (exact_power, expand_uniform, has_loopfree_power_flow, largest_power_at_most,
                       log_weights, max_flow, menger_paths, min_product_cut, quantum_min_cut,
                       thin_network, unit_min_cut_cardinality)
from core.netgraph import Port, Terminal, enumerate_cuts, parse_network
from tests.support import ConfigTestCase, small_networks
from utils.fixtures import fig3, fig4, hexagon_l3, passthrough, random_power_network, square_l1


class TestMaxFlow(ConfigTestCase):
    """Test cases for integer max flow."""

    def test_unit_flow_fig3(self):
        result = max_flow(fig3())
        self.assertEqual(result.value, 2)
        self.assertEqual(unit_min_cut_cardinality(fig3()), 2)

    def test_capacity_weighted_flow(self):
        net = fig3()
        result = max_flow(net, {e.id: e.capacity for e in net.edges})
        self.assertEqual(result.value, 6)

    def test_flow_respects_weights(self):
        net = fig3()
        weights = {e.id: e.capacity for e in net.edges}
        for f in max_flow(net, weights).flows:
            self.assertLessEqual(f.amount, weights[f.edge_id])
            self.assertGreater(f.amount, 0)

    def test_negative_weight_rejected(self):
        with self.assertRaises(ParameterError):
            max_flow(fig3(), {0: -1})

    def test_passthrough(self):
        self.assertEqual(max_flow(passthrough(7)).value, 1)

    @settings(max_examples=100, deadline=None)
    @given(small_networks())
    def test_value_equals_min_cut_weight(self, net):
        weights = {e.id: e.capacity for e in net.edges}
        cheapest = min(sum(weights[eid] for eid in cut.edges) for cut in enumerate_cuts(net))
        self.assertEqual(max_flow(net, weights).value, cheapest)

    @settings(max_examples=100, deadline=None)
    @given(small_networks())
    def test_flow_is_conserved_at_vertices(self, net):
        result = max_flow(net, {e.id: e.capacity for e in net.edges})
        balance = {vid: 0 for vid in net.vertex_ids}
        for f in result.flows:
            if isinstance(f.tail, Port):
                balance[f.tail.vertex] -= f.amount
            if isinstance(f.head, Port):
                balance[f.head.vertex] += f.amount
        self.assertEqual(balance, {vid: 0 for vid in net.vertex_ids})
        leaving = sum(f.amount for f in result.flows if isinstance(f.tail, Terminal))
        self.assertEqual(leaving, result.value)


class TestQuantumMinCut(ConfigTestCase):
    """Test cases for the product min cut."""

    def test_fig3(self):
        self.assertEqual(quantum_min_cut(fig3()), 8)

    def test_fig4_variants(self):
        for p, q in ((2, 2), (3, 2), (2, 3)):
            with self.subTest(p=p, q=q):
                self.assertEqual(quantum_min_cut(fig4(p, q)), 8)

    def test_hexagon(self):
        self.assertEqual(quantum_min_cut(hexagon_l3()), 8)

    def test_passthrough(self):
        self.assertEqual(quantum_min_cut(passthrough(5)), 5)

    def test_min_cut_edges_multiply_to_value(self):
        net = square_l1()
        cut = min_product_cut(net)
        product = 1
        for eid in cut.edges:
            product *= net.edges[eid].capacity
        self.assertEqual(product, cut.value)
        self.assertEqual(cut.value, 4)

    def test_log_flow_path_without_oracle(self):
        # below the vertex count, confirmation falls to the doubled-precision rerun
        self.config.settings["limits"]["verify_vertices"] = 1
        self.assertEqual(quantum_min_cut(fig3()), 8)
        self.assertEqual(quantum_min_cut(hexagon_l3()), 8)

    def test_log_weights(self):
        net = parse_network("v a 2\ne 1 S.1 a.1\ne 2 a.2 T.1\n")
        weights = log_weights(net, 10)
        self.assertEqual(weights[0], 0)
        self.assertEqual(weights[1], 1024)

    @settings(max_examples=50, deadline=None)
    @given(small_networks(max_vertices=4, max_capacity=6, max_configurations=10 ** 9))
    def test_agrees_with_oracle(self, net):
        self.assertEqual(quantum_min_cut(net), enumerate_cuts(net)[0].value)

    def test_random_power_networks_agree_with_oracle(self):
        for seed in range(5):
            net = random_power_network(seed)
            with self.subTest(seed=seed):
                self.assertEqual(quantum_min_cut(net), enumerate_cuts(net)[0].value)


class TestMengerPaths(ConfigTestCase):
    """Test cases for edge-disjoint path decomposition."""

    def _check_paths(self, net):
        paths = menger_paths(net)
        self.assertEqual(len(paths), unit_min_cut_cardinality(net))
        self.assertEqual(len(paths.edge_ids), len(set(paths.edge_ids)))
        for path in paths:
            first, last = net.edges[path.edges[0]], net.edges[path.edges[-1]]
            self.assertTrue(isinstance(first.a, Terminal) or isinstance(first.b, Terminal))
            self.assertTrue(isinstance(last.a, Terminal) or isinstance(last.b, Terminal))
            self.assertEqual(len(path.edges), len(path.vertices) + 1)
            self.assertEqual(len(set(path.vertices)), len(path.vertices))
        return paths

    def test_fig3(self):
        paths = self._check_paths(fig3())
        self.assertEqual(len(paths), 2)

    def test_hexagon(self):
        paths = self._check_paths(hexagon_l3())
        self.assertEqual(len(paths), 3)
        self.assertEqual(sorted(p.input_terminal for p in paths), [1, 2, 3])

    def test_expanded_random_networks(self):
        for seed in range(5):
            with self.subTest(seed=seed):
                self._check_paths(expand_uniform(random_power_network(seed), 2))


class TestPowerTransforms(ConfigTestCase):
    """Test cases for expansion and thinning."""

    def test_exact_power(self):
        self.assertEqual(exact_power(8, 2), 3)
        self.assertEqual(exact_power(1, 3), 0)
        self.assertIsNone(exact_power(6, 2))
        self.assertIsNone(exact_power(12, 3))

    def test_largest_power_at_most(self):
        self.assertEqual(largest_power_at_most(7, 2), 4)
        self.assertEqual(largest_power_at_most(1, 2), 1)
        self.assertEqual(largest_power_at_most(9, 3), 9)

    def test_base_must_be_at_least_two(self):
        with self.assertRaises(ParameterError):
            thin_network(fig3(), 1)

    def test_expand_passthrough(self):
        expanded = expand_uniform(passthrough(4), 2)
        self.assertEqual(len(expanded.edges), 2)
        self.assertEqual(expanded.inputs, (0, 1))
        self.assertEqual(expanded.outputs, (0, 1))
        self.assertEqual(quantum_min_cut(expanded), 4)

    def test_expand_keeps_min_cut(self):
        for seed in range(5):
            net = random_power_network(seed)
            with self.subTest(seed=seed):
                expanded = expand_uniform(net, 2)
                self.assertTrue(all(e.capacity == 2 for e in expanded.edges))
                self.assertEqual(quantum_min_cut(expanded), quantum_min_cut(net))

    def test_expand_rejects_non_powers(self):
        with self.assertRaises(PowerOfBaseError):
            expand_uniform(fig3(), 2)

    def test_thin_fig3(self):
        thinned = thin_network(fig3(), 2)
        self.assertEqual([e.capacity for e in thinned.edges], [2] * 7)
        self.assertEqual(quantum_min_cut(thinned), 4)

    @settings(max_examples=30, deadline=None)
    @given(small_networks(max_capacity=9, max_configurations=10 ** 9), st.integers(2, 3))
    def test_thinning_never_raises_min_cut(self, net, d):
        self.assertLessEqual(quantum_min_cut(thin_network(net, d)), quantum_min_cut(net))


class TestLoopFreeFlow(ConfigTestCase):
    """Test cases for the loop-free integral log-flow check."""

    def test_hexagon_left_to_right(self):
        report = has_loopfree_power_flow(hexagon_l3())
        self.assertTrue(report.max_flow_matches_cut)
        self.assertTrue(report.integral)
        self.assertTrue(report.acyclic)
        self.assertTrue(report.holds)
        self.assertAlmostEqual(report.log_qmc, 3.0)

    def test_reversed_links_block_the_flow(self):
        net = hexagon_l3()
        internal = {e.id: False for e in net.edges if e.id >= 6}
        report = has_loopfree_power_flow(net, internal)
        self.assertFalse(report.max_flow_matches_cut)
        self.assertFalse(report.holds)


if __name__ == '__main__':
    unittest.main()
