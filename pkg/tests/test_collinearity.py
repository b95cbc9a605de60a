import numpy as np
import pytest

from colgibbs import (
    CollinearityMatrix,
    block_distribution,
    correlation_index,
    pair_probabilities,
    sample_block,
)
from colgibbs.collinearity import UndefinedCorrelationError


class TestCorrelationIndex:
    def test_identical(self):
        u = np.random.default_rng(0).standard_normal(100)
        assert correlation_index(u, u) == 1.0

    def test_negated(self):
        u = np.random.default_rng(1).standard_normal(100)
        assert np.isclose(correlation_index(u, -u), 1.0)

    def test_independent_white(self):
        rng = np.random.default_rng(2)
        a, b = rng.standard_normal(100_000), rng.standard_normal(100_000)
        assert correlation_index(a, b) < 0.02

    def test_constant_raises(self):
        with pytest.raises(UndefinedCorrelationError):
            correlation_index(np.ones(10), np.arange(10.0))

    def test_matrix_maps_constant_to_zero(self):
        rng = np.random.default_rng(3)
        with pytest.warns(RuntimeWarning):
            C = CollinearityMatrix.from_inputs([rng.standard_normal(50),
                                                np.full(50, 2.0)])
        assert C.c[0, 1] == 0.0
        assert C.c[0, 0] == 1.0


def chain_correlation_matrix(c=0.99, links=10, m=10):
    """Population correlations of the MA-chain family: c^|i-j| inside the
    chain, zero elsewhere."""
    C = np.eye(m)
    for i in range(links):
        for j in range(links):
            C[i, j] = c ** abs(i - j)
    return CollinearityMatrix(c=C)


class TestPairProbabilities:
    def test_two_channels(self):
        C = CollinearityMatrix(c=np.array([[1.0, 0.4], [0.4, 1.0]]))
        P = pair_probabilities(C, 100.0)
        assert P[(0, 1)] == 1.0

    def test_uniform_when_equal(self):
        m = 5
        c = np.full((m, m), 0.3)
        np.fill_diagonal(c, 1.0)
        P = pair_probabilities(CollinearityMatrix(c=c), 7.0)
        n_pairs = m * (m - 1) // 2
        assert np.allclose(P.probs, 1.0 / n_pairs)

    def test_chain_profile_beta100(self):
        # adjacent pairs get about 7% each, the far end-pair almost nothing
        P = pair_probabilities(chain_correlation_matrix(), 100.0)
        adjacent = [P[(i, i + 1)] for i in range(9)]
        assert all(abs(prob - 0.07) < 0.01 for prob in adjacent)
        far = P[(0, 9)]  # population correlation 0.99^9 = 0.9135
        assert far < 1e-4
        assert far > 0.0

    def test_zero_collinearity_fallback(self):
        C = CollinearityMatrix(c=np.eye(4))
        with pytest.warns(RuntimeWarning):
            P = pair_probabilities(C, 50.0)
        assert np.allclose(P.probs, 1.0 / 6)

    def test_monotone_in_c(self):
        base = np.full((4, 4), 0.2)
        np.fill_diagonal(base, 1.0)
        bumped = base.copy()
        bumped[0, 1] = bumped[1, 0] = 0.6
        P0 = pair_probabilities(CollinearityMatrix(c=base), 10.0)
        P1 = pair_probabilities(CollinearityMatrix(c=bumped), 10.0)
        assert P1[(0, 1)] > P0[(0, 1)]

    def test_transpose_invariance(self):
        rng = np.random.default_rng(4)
        raw = rng.uniform(0, 1, (5, 5))
        c = (raw + raw.T) / 2
        np.fill_diagonal(c, 1.0)
        P1 = pair_probabilities(CollinearityMatrix(c=c), 30.0)
        P2 = pair_probabilities(CollinearityMatrix(c=c.T.copy()), 30.0)
        assert np.allclose(P1.probs, P2.probs)

    def test_beta_positive_required(self):
        with pytest.raises(ValueError):
            pair_probabilities(chain_correlation_matrix(), 0.0)


class TestBlockDistribution:
    def test_two_channel_masses(self):
        C = CollinearityMatrix(c=np.array([[1.0, 1.0], [1.0, 1.0]]))
        P = pair_probabilities(C, 100.0)
        dist = block_distribution(P, 2, 2)
        probs = dict(zip(dist.labels, dist.probs))
        assert np.isclose(probs[0], 0.25)
        assert np.isclose(probs[1], 0.25)
        assert np.isclose(probs[(0, 1)], 0.5)

    def test_no_overlap_degenerates_to_uniform(self):
        dist = block_distribution(None, 6, 0)
        assert np.allclose(dist.probs, 1.0 / 6)
        assert dist.pair_mass == 0.0

    def test_pair_mass_fraction(self):
        P = pair_probabilities(chain_correlation_matrix(), 100.0)
        dist = block_distribution(P, 10, 10)
        assert np.isclose(dist.pair_mass, 0.5, atol=1e-12)

    @pytest.mark.parametrize("n_ob", [0, 1, 2, 10, 100])
    def test_normalization(self, n_ob):
        P = pair_probabilities(chain_correlation_matrix(), 100.0)
        dist = block_distribution(P, 10, n_ob)
        assert abs(dist.probs.sum() - 1.0) < 1e-12


class TestSampling:
    def test_point_mass(self):
        from colgibbs.collinearity import BlockDistribution
        dist = block_distribution(None, 3, 0)
        rng = np.random.default_rng(5)
        # collapse to a point mass by hand
        dist = BlockDistribution(labels=((1, 2),), probs=np.array([1.0]),
                                 m=3, n_ob=1, _cum=np.array([1.0]))
        assert all(sample_block(dist, rng) == (1, 2) for _ in range(50))

    def test_empirical_frequencies_two_channel(self):
        C = CollinearityMatrix(c=np.array([[1.0, 1.0], [1.0, 1.0]]))
        dist = block_distribution(pair_probabilities(C, 100.0), 2, 2)
        rng = np.random.default_rng(6)
        draws = [sample_block(dist, rng) for _ in range(100_000)]
        freq_pair = sum(isinstance(d, tuple) for d in draws) / 100_000
        assert abs(freq_pair - 0.5) < 0.005

    def test_empirical_pair_mass_chain(self):
        P = pair_probabilities(chain_correlation_matrix(), 100.0)
        dist = block_distribution(P, 10, 1)
        rng = np.random.default_rng(7)
        draws = [sample_block(dist, rng) for _ in range(100_000)]
        freq_pair = sum(isinstance(d, tuple) for d in draws) / 100_000
        assert abs(freq_pair - 1.0 / 11) < 0.005
