import math

import numpy as np
import pytest

from planarlab import models
from planarlab.models import OrderedBipartiteGraph, RngStream, WordPair


def test_stream_is_deterministic_and_trial_specific():
    a = RngStream(123, 4).generator().integers(0, 2**62, size=8)
    b = RngStream(123, 4).generator().integers(0, 2**62, size=8)
    c = RngStream(123, 5).generator().integers(0, 2**62, size=8)
    d = RngStream(124, 4).generator().integers(0, 2**62, size=8)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, c)
    assert not np.array_equal(a, d)


def test_stream_pinned_values():
    # guards against silent changes of the key layout
    got = RngStream(2024, 3).generator().integers(0, 1000, size=5).tolist()
    again = np.random.Generator(np.random.Philox(key=2024 | (3 << 64))).integers(0, 1000, size=5).tolist()
    assert got == again


def test_stream_rejects_negative_trial():
    with pytest.raises(ValueError):
        RngStream(1, -1)


class TestGraph:
    def test_rejects_unsorted_and_duplicates(self):
        with pytest.raises(ValueError):
            OrderedBipartiteGraph(2, 2, [(2, 1), (1, 1)])
        with pytest.raises(ValueError):
            OrderedBipartiteGraph(2, 2, [(1, 1), (1, 1)])
        with pytest.raises(ValueError):
            OrderedBipartiteGraph(2, 2, [(1, 3)])
        with pytest.raises(ValueError):
            OrderedBipartiteGraph(0, 2, [])

    def test_from_edges_sorts(self):
        g = OrderedBipartiteGraph.from_edges(3, 3, [(3, 1), (1, 2), (1, 1)])
        assert g.edge_list() == [(1, 1), (1, 2), (3, 1)]

    def test_complete(self):
        g = OrderedBipartiteGraph.complete(2, 3)
        assert g.num_edges == 6


class TestWords:
    def test_single_letter(self):
        w = models.sample_word_pair(3, 3, 1, RngStream(9, 0))
        assert w.word_a.tolist() == [1, 1, 1] and w.word_b.tolist() == [1, 1, 1]

    @pytest.mark.parametrize("r,s,k", [(0, 3, 2), (3, 0, 2), (3, 3, 0)])
    def test_rejects_zero(self, r, s, k):
        with pytest.raises(ValueError):
            models.sample_word_pair(r, s, k, RngStream(0, 0))

    def test_same_stream_same_words(self):
        assert models.sample_word_pair(50, 60, 7, RngStream(5, 11)) == models.sample_word_pair(50, 60, 7, RngStream(5, 11))

    def test_letter_frequencies(self):
        w = models.sample_word_pair(10_000, 10_000, 4, RngStream(31, 0))
        sigma = math.sqrt(10_000 * 0.25 * 0.75)
        for word in (w.word_a, w.word_b):
            counts = np.bincount(word, minlength=5)[1:]
            assert np.all(np.abs(counts - 2500) <= 5 * sigma)

    def test_rejects_bad_characters(self):
        with pytest.raises(ValueError):
            WordPair(2, [1, 3], [1])


class TestWordsToGraph:
    def test_hand_cases(self):
        assert models.words_to_graph(WordPair(2, [1, 2], [2, 1])).edge_list() == [(1, 2), (2, 1)]
        assert models.words_to_graph(WordPair(1, [1, 1], [1, 1])).num_edges == 4

    def test_matches_definition(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            a = rng.integers(1, 4, size=rng.integers(1, 9))
            b = rng.integers(1, 4, size=rng.integers(1, 9))
            g = models.words_to_graph(WordPair(3, a, b))
            want = [(i + 1, j + 1) for i in range(len(a)) for j in range(len(b)) if a[i] == b[j]]
            assert g.edge_list() == want

    def test_same_letter_same_neighbourhood(self):
        w = models.sample_word_pair(40, 40, 5, RngStream(2, 0))
        g = models.words_to_graph(w)
        nbrs = {i: set() for i in range(1, 41)}
        for a, b in g.edge_list():
            nbrs[a].add(b)
        for i in range(40):
            for j in range(40):
                if w.word_a[i] == w.word_a[j]:
                    assert nbrs[i + 1] == nbrs[j + 1]

    def test_edge_count(self):
        # pairwise independent indicators: Var |E| = (rs/k)(1 - 1/k)
        g = models.words_to_graph(models.sample_word_pair(1000, 1000, 100, RngStream(3, 0)))
        sigma = math.sqrt(10_000 * (1 - 1 / 100))
        assert abs(g.num_edges - 10_000) <= 5 * sigma


class TestBinomial:
    def test_degenerate(self):
        assert models.sample_binomial_graph(5, 7, 0.0, RngStream(0, 0)).num_edges == 0
        assert models.sample_binomial_graph(5, 7, 1.0, RngStream(0, 0)).num_edges == 35

    @pytest.mark.parametrize("p", [-0.1, 1.5])
    def test_rejects_p(self, p):
        with pytest.raises(ValueError):
            models.sample_binomial_graph(3, 3, p, RngStream(0, 0))

    def test_mean_edge_count_sparse(self):
        trials = 10_000
        counts = [models.sample_binomial_graph(2000, 2000, 0.001, RngStream(17, t)).num_edges for t in range(trials)]
        se = math.sqrt(4e6 * 0.001 * 0.999 / trials)
        assert abs(np.mean(counts) - 4000) <= 5 * se

    def test_dense_branch_mean(self):
        counts = [models.sample_binomial_graph(60, 50, 0.3, RngStream(4, t)).num_edges for t in range(400)]
        se = math.sqrt(3000 * 0.21 / 400)
        assert abs(np.mean(counts) - 900) <= 5 * se

    def test_sparse_positions_uniform_over_cells(self):
        # every cell should be hit with probability p
        hits = np.zeros((10, 10))
        trials = 20_000
        for t in range(trials):
            g = models.sample_binomial_graph(10, 10, 0.02, RngStream(8, t))
            for a, b in g.edges:
                hits[a - 1, b - 1] += 1
        se = math.sqrt(0.02 * 0.98 / trials)
        assert np.all(np.abs(hits / trials - 0.02) <= 5 * se)


class TestGeometric:
    def test_near_one_all_zero(self):
        g = models.sample_geometric_grid(100, 0.999999, RngStream(1, 0))
        assert g.weights.max() == 0

    def test_mean(self):
        g = models.sample_geometric_grid(1000, 0.5, RngStream(2, 0))
        se = math.sqrt(2.0 / 1e6)  # variance (1-p)/p^2
        assert abs(g.weights.mean() - 1.0) <= 5 * se

    def test_positive_fraction(self):
        g = models.sample_geometric_grid(1000, 0.3, RngStream(3, 0))
        se = math.sqrt(0.7 * 0.3 / 1e6)
        assert abs((g.weights > 0).mean() - 0.7) <= 5 * se

    def test_pmf(self):
        w = models.sample_geometric_grid(1000, 0.4, RngStream(4, 0)).weights.ravel()
        for j in range(4):
            pj = 0.6**j * 0.4
            assert abs(np.mean(w == j) - pj) <= 5 * math.sqrt(pj * (1 - pj) / w.size)

    @pytest.mark.parametrize("p", [0.0, 1.0, 2.0])
    def test_rejects_p(self, p):
        with pytest.raises(ValueError):
            models.sample_geometric_grid(3, p, RngStream(0, 0))

    def test_weights_to_graph(self):
        assert models.weights_to_graph(models.WeightedGrid(np.zeros((3, 3)))).num_edges == 0
        assert models.weights_to_graph(models.WeightedGrid(np.ones((3, 3)))).num_edges == 9
        with pytest.raises(ValueError):
            models.WeightedGrid(-np.ones((2, 2)))


class TestBernoulli:
    def test_degenerate(self):
        assert models.sample_bernoulli_matrix(4, 0.0, RngStream(0, 0)).entries.sum() == 0
        assert models.sample_bernoulli_matrix(4, 1.0, RngStream(0, 0)).entries.sum() == 16

    def test_count(self):
        m = models.sample_bernoulli_matrix(1000, 0.3, RngStream(5, 0))
        assert abs(int(m.entries.sum()) - 300_000) <= 5 * math.sqrt(1e6 * 0.21)

    def test_rejects(self):
        with pytest.raises(ValueError):
            models.sample_bernoulli_matrix(3, 1.2, RngStream(0, 0))
        with pytest.raises(ValueError):
            models.BernoulliMatrix(np.array([[0, 2]]))


@pytest.mark.parametrize(
    "sampler",
    [
        lambda st: models.sample_word_pair(30, 20, 4, st),
        lambda st: models.sample_binomial_graph(30, 20, 0.01, st),
        lambda st: models.sample_binomial_graph(30, 20, 0.4, st),
        lambda st: models.sample_geometric_grid(20, 0.3, st),
        lambda st: models.sample_bernoulli_matrix(20, 0.3, st),
    ],
)
def test_samplers_deterministic(sampler):
    assert sampler(RngStream(77, 3)) == sampler(RngStream(77, 3))


def test_permutation_is_permutation():
    p = models.sample_permutation(100, RngStream(1, 1))
    assert sorted(p.tolist()) == list(range(1, 101))
