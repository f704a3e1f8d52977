from fractions import Fraction

import numpy as np
import pytest

from graphon_sampling.graphon import (builtin, constant_graphon, discretize_gd1, induce_graphon,
                                      operator_distance, operator_norm)
from graphon_sampling.gsp import Graph
from graphon_sampling.intervals import IntervalSet
from graphon_sampling.sampling import SamplingSet, lambda_graph
from graphon_sampling.transfer import (TransferBudgetError, algorithm1_transfer, convergence_report,
                                       convergence_to_csv, induce_interval_set, sandwich,
                                       sequence_bounds, theta_bounds)

from conftest import random_graph


class TestInduce:
    def test_adjacent_cells_merge(self):
        assert induce_interval_set([1, 2], 4).to_pairs() == [[0.25, 0.75]]

    def test_full(self):
        assert induce_interval_set(range(7), 7) == IntervalSet.full()

    def test_gap(self):
        assert induce_interval_set([0, 2], 4).to_pairs() == [[0.0, 0.25], [0.5, 0.75]]


class TestAlgorithm1:
    def test_contained_cells(self):
        assert algorithm1_transfer(IntervalSet([(0.25, 0.75)]), 8, 4).indices == (2, 3, 4, 5)

    def test_fill_from_partial(self):
        s = algorithm1_transfer(IntervalSet([(Fraction(1, 4), Fraction(1, 2))]), 6, 2)
        assert s.indices == (1, 2)

    def test_fill_prefers_overlap(self):
        # cell 0 is 1/5 inside, cell 2 is 4/5 inside
        src = IntervalSet([(Fraction(4, 15), Fraction(1, 3)), (Fraction(2, 3), Fraction(14, 15))])
        assert algorithm1_transfer(src, 3, 1, "overlap").indices == (2,)
        assert algorithm1_transfer(src, 3, 1, "index").indices == (0,)

    def test_random_fill_seeded(self):
        src = IntervalSet([(0.05, 0.15), (0.25, 0.35), (0.45, 0.55), (0.65, 0.75)])
        a = algorithm1_transfer(src, 5, 2, "random", seed=4)
        assert a == algorithm1_transfer(src, 5, 2, "random", seed=4)
        assert len(a) == 2 and set(a) <= {0, 1, 2, 3}

    def test_stops_at_budget(self):
        assert algorithm1_transfer(IntervalSet.full(), 10, 3).indices == (0, 1, 2)

    def test_budget_error(self):
        with pytest.raises(TransferBudgetError) as exc:
            algorithm1_transfer(IntervalSet([(0, 0.25)]), 8, 3)
        assert exc.value.achievable == 2

    def test_unknown_rule(self):
        with pytest.raises(ValueError):
            algorithm1_transfer(IntervalSet.full(), 4, 1, "best")

    def test_identity(self, rng):
        for _ in range(30):
            n = int(rng.integers(1, 60))
            s = SamplingSet(rng.choice(n, int(rng.integers(1, n + 1)), replace=False))
            assert algorithm1_transfer(induce_interval_set(s, n), n, len(s)) == s

    def test_monotone_coverage(self, rng):
        for _ in range(20):
            src = induce_interval_set(rng.choice(7, 3, replace=False), 7)
            sets = [algorithm1_transfer(src, 20, m) for m in range(0, 9)]
            for a, b in zip(sets, sets[1:]):
                assert set(a) <= set(b)

    def test_nested_sizes_match_exactly(self, rng):
        s = SamplingSet(rng.choice(10, 4, replace=False))
        t = algorithm1_transfer(induce_interval_set(s, 10), 30, 12)
        assert induce_interval_set(t, 30) == induce_interval_set(s, 10)


class TestThetaBounds:
    def test_degenerate(self, rng):
        g = random_graph(rng, 10)
        s = SamplingSet([1, 4, 7])
        r = theta_bounds(g, g, s)
        lam = lambda_graph(g, s.complement(10)).value
        assert r.distance == 0
        assert r.theta1 == pytest.approx(lam, abs=1e-12) and r.theta2 == pytest.approx(lam, abs=1e-12)
        assert r.contains() and r.hypothesis_holds

    def test_edge_dropping(self, rng):
        g1 = random_graph(rng, 6)
        a = g1.adjacency.copy()
        a[1, 4] = a[4, 1] = a[1, 4] * 0.5
        g2 = Graph(a)
        r = theta_bounds(g1, g2, SamplingSet([0, 3]), SamplingSet([0, 3]))
        assert r.theta2 - r.theta1 <= 2 * 6 * r.distance + 1e-12
        assert r.contains()

    def test_gd1_pair(self):
        g1 = discretize_gd1(builtin("mean"), 16)
        g2 = discretize_gd1(builtin("mean"), 8)
        s2 = SamplingSet([0, 3, 5])
        r = theta_bounds(g1, g2, s2)
        assert r.hypothesis_holds
        assert r.theta1 <= r.theta2 + 1e-10
        assert r.contains() and r.swapped.contains()

    def test_mismatch_reported(self):
        g1 = discretize_gd1(builtin("mean"), 5)
        g2 = discretize_gd1(builtin("mean"), 3)
        r = theta_bounds(g1, g2, SamplingSet([1]))
        assert r.mismatch_measure > 0 and not r.hypothesis_holds

    def test_relabeling_formula(self, rng):
        g1, g2 = random_graph(rng, 8), random_graph(rng, 8)
        s2 = SamplingSet([2, 5])
        perm = rng.permutation(8)
        g2p = Graph(g2.adjacency[np.ix_(perm, perm)])
        r = theta_bounds(g1, g2p, s2, s2)
        d = operator_distance(induce_graphon(g1), induce_graphon(g2p))
        lam2 = lambda_graph(g2p, s2.complement(8)).value
        lo, hi = sandwich(lam2, d, operator_norm(induce_graphon(g1)), scale=8, ratio=1.0)
        assert (r.theta1, r.theta2) == (lo, hi)

    def test_random_nested_pairs(self, rng):
        for _ in range(20):
            n = int(rng.integers(2, 17))
            g2, g1 = random_graph(rng, n), random_graph(rng, 2 * n)
            s2 = SamplingSet(rng.choice(n, int(rng.integers(1, n)), replace=False))
            r = theta_bounds(g1, g2, s2)
            assert r.hypothesis_holds and r.contains() and r.swapped.contains()

    def test_json(self, rng):
        g = random_graph(rng, 4)
        out = theta_bounds(g, g, SamplingSet([0])).to_json()
        assert out["contains"] and "swapped" in out


class TestSequenceBounds:
    def test_identical(self):
        w = builtin("mean")
        r = sequence_bounds(w, w, IntervalSet([(0, 0.5)]), resolution=64)
        assert r.lower == pytest.approx(r.measured) and r.upper == pytest.approx(r.measured)

    def test_constants(self):
        r = sequence_bounds(constant_graphon(0.5), constant_graphon(0.25), IntervalSet([(0, 0.5)]))
        assert r.measured == pytest.approx(0.5 * np.sqrt(0.5), rel=1e-12)
        assert r.reference == pytest.approx(0.25 * np.sqrt(0.5), rel=1e-12)
        assert r.distance == pytest.approx(0.25, rel=1e-12)
        assert r.contains() and r.swapped.contains()

    def test_random_steps(self, rng):
        for _ in range(100):
            w1 = induce_graphon(random_graph(rng, int(rng.integers(1, 33))))
            w2 = induce_graphon(random_graph(rng, int(rng.integers(1, 33))))
            a, b = np.sort(rng.uniform(0, 1, 2))
            r = sequence_bounds(w1, w2, IntervalSet([(a, b)]))
            assert r.contains() and r.swapped.contains()

    def test_full_set_rejected(self):
        with pytest.raises(ValueError):
            sequence_bounds(constant_graphon(0.5), constant_graphon(0.5), IntervalSet.full())


class TestConvergence:
    def test_constant(self):
        recs = convergence_report(builtin("constant", c=0.5), [2, 4, 8], IntervalSet([(0.5, 1)]), 64)
        for r in recs:
            assert r.distance == pytest.approx(0.0, abs=1e-14)
            assert r.lam == pytest.approx(recs[0].lam, abs=1e-14)

    def test_mean(self):
        recs = convergence_report(builtin("mean"), [8, 16, 32, 64], IntervalSet([(0.5, 1)]))
        gaps = [r.gap for r in recs]
        assert all(b <= a + 1e-3 for a, b in zip(gaps, gaps[1:]))
        assert all(r.gap <= r.distance + 1e-8 for r in recs)
        assert all(r.aligned for r in recs)

    def test_unaligned_flag(self):
        recs = convergence_report(builtin("mean"), [3, 4], IntervalSet([(0.5, 1)]), 64)
        assert [r.aligned for r in recs] == [False, True]
        assert all(r.gap <= r.distance + 1e-8 for r in recs)

    def test_csv(self):
        recs = convergence_report(builtin("mean"), [4], IntervalSet([(0.5, 1)]), 64)
        lines = convergence_to_csv(recs).splitlines()
        assert lines[0] == "N,d_N,lambda_N,lambda_ref,aligned" and len(lines) == 2
