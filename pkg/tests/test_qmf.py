"""
Test Suite for Quantum Max-Flow Module

Tests sampled max flows of the worked examples, path tensors, the thinning
bounds, the GHZ-form decomposition, the rank-3 symmetry and the example
families.
"""

import unittest

import numpy as np

from core.errors import (DegenerateTensorError, ParameterError, PowerOfBaseError,
                         ResourceLimitError)
from core.flow import quantum_min_cut
from core.qmf import (best_ratio_family, construct_path_tensors, estimate_qmf, estimate_qmf_v2,
                      ghz_decompose, ghz_tensor, min_capacity_bound, qmf_family_2n2jk, qmf_family_grid,
                      qmf_lower_bound, rk3_closed_form, scaling_experiment, verify_rk3_symmetry)
from core.tensor import ComplexFloat, PrimeField, contract
from tests.support import ConfigTestCase
from utils.fixtures import (fig3, fig4, hexagon_l3, passthrough, random_power_network, square_l1,
                            square_l2)


class TestEstimateQmf(ConfigTestCase):
    """Test cases for randomized rank sampling."""

    def test_fig3_falls_short_of_min_cut(self):
        estimate = estimate_qmf(fig3(), trials=20, seed=42)
        self.assertEqual(estimate.qmc, 8)
        self.assertEqual(estimate.best, 7)
        self.assertFalse(estimate.equals_qmc)
        self.assertEqual(estimate.trials, 20)

    def test_fig3_never_exceeds_seven(self):
        estimate = estimate_qmf(fig3(), trials=1000, seed=7, stop_at_qmc=False)
        self.assertEqual(max(estimate.ranks), 7)
        self.assertEqual(len(estimate.ranks), 1000)

    def test_fig4_reaches_min_cut(self):
        for p, q in ((3, 2), (2, 3)):
            with self.subTest(p=p, q=q):
                estimate = estimate_qmf(fig4(p, q), trials=20, seed=1)
                self.assertEqual(estimate.best, 8)
                self.assertTrue(estimate.equals_qmc)
                # stops at the first trial reaching the min cut
                self.assertEqual(estimate.ranks[-1], 8)
                self.assertEqual(estimate.trials, len(estimate.seeds))

    def test_fig4_base_case(self):
        self.assertEqual(estimate_qmf(fig4(2, 2), trials=20, seed=3).best, 7)

    def test_hexagon_reaches_min_cut(self):
        self.assertEqual(estimate_qmf(hexagon_l3(), trials=10).best, 8)

    def test_complex_domain_agrees(self):
        estimate = estimate_qmf(fig3(), trials=10, seed=5, domain=ComplexFloat())
        self.assertEqual(estimate.best, 7)
        self.assertEqual(estimate.domain, "complex")

    def test_passthrough(self):
        self.assertEqual(estimate_qmf(passthrough(6), trials=1).best, 6)

    def test_seeded_runs_repeat(self):
        a = estimate_qmf(fig3(), trials=5, seed=9, stop_at_qmc=False)
        b = estimate_qmf(fig3(), trials=5, seed=9, stop_at_qmc=False)
        self.assertEqual(a.ranks, b.ranks)
        self.assertEqual(a.seeds, b.seeds)

    def test_to_dict(self):
        result = estimate_qmf(fig4(3, 2), trials=5).to_dict()
        self.assertEqual(set(result), {"best", "trials", "qmc", "equals_qmc", "seeds"})
        self.assertTrue(result["equals_qmc"])

    def test_trials_must_be_positive(self):
        with self.assertRaises(ParameterError):
            estimate_qmf(fig3(), trials=0)

    def test_dimension_guard(self):
        with self.assertRaises(ResourceLimitError):
            estimate_qmf(fig3(), trials=1, max_dim=10)

    def test_defaults_come_from_config(self):
        self.config.settings["sampling"]["trials"] = 3
        estimate = estimate_qmf(fig3(), stop_at_qmc=False)
        self.assertEqual(estimate.trials, 3)


class TestEstimateQmfV2(ConfigTestCase):
    """Test cases for shared tensors per valence type."""

    def test_square_and_hexagon_lattices(self):
        cases = ((square_l1(), 4, 3), (square_l2(), 4, 4), (hexagon_l3(), 8, 6))
        for net, qmc, expected in cases:
            with self.subTest(net=net.name):
                estimate = estimate_qmf_v2(net, trials=50, seed=42)
                self.assertEqual(estimate.qmc, qmc)
                self.assertEqual(estimate.best, expected)
                self.assertEqual(estimate.version, 2)

    def test_lattices_never_exceed_shared_rank(self):
        cases = ((square_l1(), 3), (square_l2(), 4), (hexagon_l3(), 6))
        for net, expected in cases:
            with self.subTest(net=net.name):
                estimate = estimate_qmf_v2(net, trials=1000, seed=42, stop_at_qmc=False)
                self.assertEqual(max(estimate.ranks), expected)
                self.assertEqual(len(estimate.ranks), 1000)

    def test_v2_never_beats_v1(self):
        net = hexagon_l3()
        self.assertLessEqual(estimate_qmf_v2(net, trials=10).best, estimate_qmf(net, trials=10).best)


class TestPathTensors(ConfigTestCase):
    """Test cases for the path-tensor construction."""

    def test_rank_equals_min_cut_on_power_networks(self):
        for seed in range(5):
            net = random_power_network(seed)
            with self.subTest(seed=seed):
                assign = construct_path_tensors(net)
                self.assertEqual(contract(net, assign).rank(), quantum_min_cut(net))

    def test_hexagon(self):
        net = hexagon_l3()
        self.assertEqual(contract(net, construct_path_tensors(net)).rank(), 8)

    def test_entries_are_zero_or_one(self):
        assign = construct_path_tensors(hexagon_l3())
        for _, tensor in assign.items():
            self.assertTrue(set(int(x) for x in tensor.reshape(-1)) <= {0, 1})

    def test_complex_domain(self):
        net = square_l1()
        assign = construct_path_tensors(net, domain=ComplexFloat())
        self.assertEqual(contract(net, assign).rank(), 4)

    def test_rejects_non_powers(self):
        with self.assertRaises(PowerOfBaseError):
            construct_path_tensors(fig3())


class TestBounds(ConfigTestCase):
    """Test cases for the thinning lower bounds."""

    def test_min_capacity_bound(self):
        self.assertEqual(min_capacity_bound(fig3()), 4)
        self.assertEqual(min_capacity_bound(passthrough(5)), 5)

    def test_lower_bound_fig3(self):
        bound = qmf_lower_bound(fig3())
        self.assertEqual(bound, 4)
        self.assertLessEqual(bound, estimate_qmf(fig3(), trials=5).best)

    def test_lower_bound_is_tight_on_powers(self):
        self.assertEqual(qmf_lower_bound(hexagon_l3()), 8)


class TestGhzForm(ConfigTestCase):
    """Test cases for the GHZ-form decomposition."""

    def test_random_tensors_reconstruct(self):
        rng = np.random.default_rng(2024)
        for _ in range(100):
            t = rng.standard_normal((2, 2, 2)) + 1j * rng.standard_normal((2, 2, 2))
            decomposition = ghz_decompose(t)
            self.assertLessEqual(decomposition.relative_error(t), 1e-9)

    def test_eigenvalues_are_distinct(self):
        rng = np.random.default_rng(1)
        t = rng.standard_normal((2, 2, 2)) + 1j * rng.standard_normal((2, 2, 2))
        eigenvalues = ghz_decompose(t).eigenvalues
        self.assertGreater(abs(eigenvalues[0] - eigenvalues[1]), 0)

    def test_real_integer_tensor(self):
        t = np.array([[[2.0, 1.0], [1.0, 1.0]], [[1.0, 2.0], [3.0, 5.0]]])
        self.assertLessEqual(ghz_decompose(t).relative_error(t), 1e-9)
        self.assertEqual(int(ghz_tensor(PrimeField(7))[1, 1, 1]), 1)

    def test_singular_first_slice(self):
        t = np.zeros((2, 2, 2))
        t[0] = [[1.0, 0.0], [0.0, 0.0]]
        t[1] = [[1.0, 2.0], [3.0, 4.0]]
        with self.assertRaises(DegenerateTensorError) as ctx:
            ghz_decompose(t)
        self.assertEqual(ctx.exception.condition, 1)

    def test_repeated_eigenvalue(self):
        t = np.zeros((2, 2, 2))
        t[0] = np.eye(2)
        t[1] = [[1.0, 1.0], [0.0, 1.0]]
        with self.assertRaises(DegenerateTensorError) as ctx:
            ghz_decompose(t)
        self.assertEqual(ctx.exception.condition, 2)

    def test_vanishing_off_diagonal(self):
        t = np.zeros((2, 2, 2))
        t[0] = np.eye(2)
        t[1] = np.diag([1.0, 2.0])
        with self.assertRaises(DegenerateTensorError) as ctx:
            ghz_decompose(t)
        self.assertEqual(ctx.exception.condition, 3)
        self.assertEqual(ctx.exception.invariant, "ghz-degenerate")

    def test_wrong_shape(self):
        with self.assertRaises(ParameterError):
            ghz_decompose(np.ones((2, 2)))


class TestRank3Symmetry(ConfigTestCase):
    """Test cases for the reduced square network."""

    def test_symmetry_over_many_seeds(self):
        report = verify_rk3_symmetry(200, seed=42)
        self.assertTrue(report.passed)
        self.assertEqual(report.symmetric, 200)
        self.assertEqual(report.closed_form_matches, 200)
        self.assertEqual(report.rank_counts, {3: 200})
        self.assertTrue(report.to_dict()["passed"])

    def test_closed_form_columns(self):
        phi = rk3_closed_form([[1, 2], [3, 4]], 101)
        self.assertEqual(phi.shape, (4, 4))
        self.assertTrue(np.all(phi[:, 1] == phi[:, 2]))
        self.assertEqual(phi[0, 0], 1)

    def test_small_prime(self):
        self.assertTrue(verify_rk3_symmetry(20, seed=0, prime=101).passed)

    def test_seed_count_must_be_positive(self):
        with self.assertRaises(ParameterError):
            verify_rk3_symmetry(0)


class TestFamilies(ConfigTestCase):
    """Test cases for the three-vertex family and capacity scaling."""

    def test_family_smallest_member(self):
        report = qmf_family_2n2jk(2, 1, 1, trials=20)
        self.assertEqual(report.qmc, 8)
        self.assertEqual(report.bound, 7)
        self.assertEqual(report.sampled, 7)
        self.assertAlmostEqual(report.ratio, 7 / 8)

    def test_family_grid(self):
        reports = qmf_family_grid(3, trials=5)
        self.assertEqual(len(reports), 4 + 9)
        for report in reports:
            with self.subTest(n=report.n, j=report.j, k=report.k):
                self.assertEqual(report.qmc, min(2 * report.n ** 2,
                                                 (2 * report.n - report.j) * (2 * report.n - report.k)))
                self.assertLessEqual(report.sampled, report.bound)

    def test_best_ratio_family(self):
        report = best_ratio_family(3, trials=5)
        self.assertEqual((report.j, report.k), (2, 2))
        self.assertEqual(report.qmc, 16)
        self.assertEqual(report.bound, 14)

    def test_family_parameter_ranges(self):
        for n, j, k in ((1, 0, 0), (3, 3, 0), (3, 0, -1)):
            with self.subTest(n=n, j=j, k=k):
                with self.assertRaises(ParameterError):
                    qmf_family_2n2jk(n, j, k, trials=1)

    def test_scaling_fig3(self):
        rows = scaling_experiment(fig3(), 2, trials=5)
        self.assertEqual([row.n for row in rows], [1, 2])
        self.assertEqual(rows[0].qmc, 8)
        self.assertEqual(rows[1].qmc, 36)
        for row in rows:
            self.assertLessEqual(row.qmf_sampled, row.qmc)
            self.assertEqual(row.gap, row.qmc - row.qmf_sampled)

    def test_scaling_guard_runs_before_sampling(self):
        with self.assertRaises(ResourceLimitError):
            scaling_experiment(fig3(), 3, trials=1, max_dim=1000)
        with self.assertRaises(ParameterError):
            scaling_experiment(fig3(), 0)


if __name__ == '__main__':
    unittest.main()
