import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graphon_sampling.gsp import (Graph, bandwidth_omega, bwm4_response, generate_bandlimited, gft,
                                  graph_filter, igft, k_omega_for, ordered_eigh, spectral_decompose)

from conftest import random_graph

graphs = st.builds(lambda n, seed: random_graph(np.random.default_rng(seed), n),
                   st.integers(1, 64), st.integers(0, 2**32 - 1))


class TestGraph:
    def test_rejects_asymmetric(self):
        with pytest.raises(ValueError):
            Graph(np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_rejects_non_square(self):
        with pytest.raises(ValueError):
            Graph(np.zeros((2, 3)))

    def test_adjacency_is_read_only(self, k2):
        with pytest.raises(ValueError):
            k2.adjacency[0, 0] = 1.0


class TestSpectralDecompose:
    def test_k2(self, k2):
        b = spectral_decompose(k2)
        np.testing.assert_allclose(b.eigenvalues, [1, -1], atol=1e-15)
        s = 1 / np.sqrt(2)
        np.testing.assert_allclose(b.eigenvectors, [[s, s], [s, -s]], atol=1e-15)

    def test_k3(self, k3):
        b = spectral_decompose(k3)
        np.testing.assert_allclose(b.eigenvalues, [2, -1, -1], atol=1e-14)
        np.testing.assert_allclose(b.eigenvectors[:, 0], np.full(3, 1 / np.sqrt(3)), atol=1e-15)

    def test_degenerate_eigenspace_is_canonical(self, k3):
        # the -1 eigenspace is the zero-sum plane; first vector is the projection of e_0
        v = spectral_decompose(k3).eigenvectors[:, 1]
        np.testing.assert_allclose(v, np.array([2, -1, -1]) / np.sqrt(6), atol=1e-14)

    def test_empty_graph_gives_identity(self):
        b = spectral_decompose(Graph(np.zeros((4, 4))))
        np.testing.assert_array_equal(b.eigenvalues, np.zeros(4))
        np.testing.assert_allclose(b.eigenvectors, np.eye(4), atol=1e-15)

    def test_ties_on_magnitude_put_positive_first(self):
        # bipartite: eigenvalues come in +/- pairs
        a = np.zeros((4, 4))
        a[:2, 2:] = 1
        a[2:, :2] = 1
        lam = spectral_decompose(Graph(a)).eigenvalues
        np.testing.assert_allclose(lam, [2, -2, 0, 0], atol=1e-14)

    @settings(max_examples=50, deadline=None)
    @given(g=graphs)
    def test_ordering_and_orthonormality(self, g):
        b = spectral_decompose(g)
        assert np.all(np.diff(np.abs(b.eigenvalues)) <= 1e-12)
        np.testing.assert_allclose(b.eigenvectors.T @ b.eigenvectors, np.eye(g.n), atol=1e-10)
        np.testing.assert_allclose(b.eigenvectors * b.eigenvalues @ b.eigenvectors.T, g.adjacency, atol=1e-10)

    @settings(max_examples=30, deadline=None)
    @given(g=graphs)
    def test_sign_convention(self, g):
        v = spectral_decompose(g).eigenvectors
        for j in range(g.n):
            first = v[np.flatnonzero(np.abs(v[:, j]) > 1e-12)[0], j]
            assert first > 0

    def test_repeatable_bitwise(self, rng):
        g = random_graph(rng, 40)
        a, b = spectral_decompose(g), spectral_decompose(g)
        np.testing.assert_array_equal(a.eigenvalues, b.eigenvalues)
        np.testing.assert_array_equal(a.eigenvectors, b.eigenvectors)

    def test_ordered_eigh_rejects_asymmetric(self):
        with pytest.raises(ValueError):
            ordered_eigh(np.array([[0.0, 1.0], [2.0, 0.0]]))


class TestTransform:
    @settings(max_examples=50, deadline=None)
    @given(g=graphs, seed=st.integers(0, 2**32 - 1))
    def test_parseval_and_inverse(self, g, seed):
        x = np.random.default_rng(seed).normal(size=g.n)
        b = spectral_decompose(g)
        xh = gft(b, x)
        assert abs(np.linalg.norm(xh) - np.linalg.norm(x)) <= 1e-10 * max(1, np.linalg.norm(x))
        np.testing.assert_allclose(igft(b, xh), x, atol=1e-10)

    def test_length_mismatch(self, k2):
        with pytest.raises(ValueError):
            gft(spectral_decompose(k2), [1, 2, 3])


class TestFilter:
    def test_identity_and_shift(self, k2):
        x = np.array([1.0, 0.0])
        np.testing.assert_array_equal(graph_filter(k2, [1], x), x)
        np.testing.assert_array_equal(graph_filter(k2, [0, 1], x), [0, 1])
        np.testing.assert_array_equal(graph_filter(k2.adjacency, [0, 0, 1], x), x)

    def test_empty_coefficients(self, k2):
        with pytest.raises(ValueError):
            graph_filter(k2, [], [1, 0])

    @settings(max_examples=50, deadline=None)
    @given(g=graphs, seed=st.integers(0, 2**32 - 1), degree=st.integers(0, 5))
    def test_diagonalized_by_gft(self, g, seed, degree):
        rng = np.random.default_rng(seed)
        h, x = rng.normal(size=degree + 1), rng.normal(size=g.n)
        b = spectral_decompose(g)
        response = np.polynomial.polynomial.polyval(b.eigenvalues, h)
        lhs = gft(b, graph_filter(g, h, x))
        scale = max(1.0, np.abs(response).max()) * max(1.0, np.abs(x).max())
        np.testing.assert_allclose(lhs, response * gft(b, x), atol=1e-8 * scale)


class TestBandwidth:
    def test_omega_examples(self, k2, k3):
        assert bandwidth_omega(spectral_decompose(k2), 1) == pytest.approx(1.0)
        assert bandwidth_omega(spectral_decompose(k3), 2) == pytest.approx(1.0)

    def test_omega_one_is_operator_norm(self, rng):
        g = random_graph(rng, 20)
        assert bandwidth_omega(spectral_decompose(g), 1) == pytest.approx(np.linalg.norm(g.adjacency, 2), rel=1e-12)

    @pytest.mark.parametrize("model,m,k", [
        ("BWM1", 10, 10), ("BWM2", 10, 9), ("BWM2", 5, 4), ("BWM2", 15, 14),
        ("BWM3", 10, 8), ("BWM3", 10, 8), ("BWM3", 20, 17), ("BWM3", 2, 2), ("BWM4", 10, 9),
    ])
    def test_k_omega(self, model, m, k):
        # 0.9*5 = 4.5 -> 4 and 0.9*15 = 13.5 -> 14 under half-even; 0.85*10 = 8.5 -> 8
        assert k_omega_for(model, m) == k

    def test_k_omega_errors(self):
        with pytest.raises(ValueError):
            k_omega_for("BWM9", 10)
        with pytest.raises(ValueError):
            k_omega_for("BWM2", 0)

    def test_bwm4_response(self):
        h = bwm4_response(6, 3)
        np.testing.assert_array_equal(h[:3], 1.0)
        assert h[4] == pytest.approx(np.exp(-8))

    @pytest.mark.parametrize("model", ["BWM1", "BWM2", "BWM3"])
    def test_signals_are_bandlimited(self, rng, model):
        g = random_graph(rng, 50)
        b = spectral_decompose(g)
        k = k_omega_for(model, 10)
        for seed in range(20):
            xh = gft(b, generate_bandlimited(b, model, 10, seed))
            assert np.abs(xh[k:]).max() < 1e-12

    def test_bwm4_attenuates(self, rng):
        g = random_graph(rng, 50)
        b = spectral_decompose(g)
        xh = gft(b, generate_bandlimited(b, "BWM4", 10, 3))
        assert np.abs(xh[9:]).max() > 0
        assert np.abs(xh[12:]).max() < 1e-4 * np.abs(xh[:9]).max()

    def test_coefficient_statistics(self):
        b = spectral_decompose(Graph(np.zeros((400, 400))))
        xh = np.concatenate([gft(b, generate_bandlimited(b, "BWM1", 400, s)) for s in range(25)])
        # 10^4 draws: 4 standard errors on the mean and on the sample deviation
        assert xh.mean() == pytest.approx(1.0, abs=4 * 0.52 / 100)
        assert xh.std() == pytest.approx(0.52, abs=4 * 0.52 / np.sqrt(2 * 10**4))

    def test_seeded_and_generator_agree(self, k3):
        b = spectral_decompose(k3)
        np.testing.assert_array_equal(generate_bandlimited(b, "BWM1", 2, 5),
                                      generate_bandlimited(b, "BWM1", 2, np.random.default_rng(5)))
