import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from rgraph.errors import ValidationError
from rgraph.graph import Graph
from rgraph.models import BetaParams, KBetaParams, Labeling, sample_graph
from rgraph.spectral import nontrivial_count, spectrum

from conftest import graphs


def planted_design(n, k, a, seed):
    """Planted k-beta odds at density 1/2: ``b(i, c_i) = e^z``, else ``e^{-z/(k-1)}``."""
    rng = np.random.default_rng(seed)
    lab = rng.permutation(np.arange(n) % k)
    z = rng.uniform(-a, a, n)
    b = np.exp(-z / (k - 1))[:, None] * np.ones((n, k))
    b[np.arange(n), lab] = np.exp(z)
    return KBetaParams(b, Labeling.from_index(lab, k))


def test_small_known_spectra():
    assert np.allclose(spectrum(Graph.from_edges(2, [(0, 1)])).eigenvalues, [1, -1])
    assert np.allclose(sorted(spectrum(Graph.complete(3)).eigenvalues), [-1, -1, 2])
    c4 = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3), (0, 3)])
    rep = spectrum(c4)
    # the 4-cycle adjacency is circulant: eigenvalues 2 cos(2 pi j / 4)
    oracle = sorted(2 * math.cos(2 * math.pi * j / 4) for j in range(4))
    assert np.allclose(sorted(rep.eigenvalues), oracle, atol=1e-12)
    assert abs(rep.eigenvalues[0]) == pytest.approx(2)
    assert rep.ratio == pytest.approx(1.0)


def test_empty_graph():
    rep = spectrum(Graph.empty(6))
    assert rep.nontrivial_count == 0 and rep.ratio == 0.0
    assert np.all(rep.eigenvalues == 0)
    assert spectrum(Graph.empty(1)).eigenvalues.tolist() == [0.0]


def test_sorted_by_absolute_value_and_json():
    g = Graph.from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 2)])
    rep = spectrum(g)
    mags = np.abs(rep.eigenvalues)
    assert np.all(mags[:-1] >= mags[1:] - 1e-12)
    doc = rep.to_dict()
    assert set(doc) == {"eigenvalues", "nontrivial_count", "threshold", "ratio"}
    assert len(doc["eigenvalues"]) == 5


def test_threshold_validation_and_guard(monkeypatch):
    rep = spectrum(Graph.complete(4))
    with pytest.raises(ValidationError):
        nontrivial_count(rep, 0.0)
    import rgraph.spectral as sp
    monkeypatch.setattr(sp, "MAX_N", 3)
    with pytest.raises(ValidationError):
        sp.spectrum(Graph.complete(4))


@given(graphs(min_n=1, max_n=12))
def test_trace_identities(g):
    lam = spectrum(g).eigenvalues
    assert len(lam) == g.n
    assert abs(lam.sum()) <= 1e-8 * g.n
    assert np.sum(lam ** 2) == pytest.approx(2 * g.m, rel=1e-6, abs=1e-9)


@given(graphs(min_n=2, max_n=12), st.integers(0, 2**32 - 1))
def test_relabeling_invariance(g, seed):
    perm = np.random.default_rng(seed).permutation(g.n)
    a = np.sort(spectrum(g).eigenvalues)
    b = np.sort(spectrum(g.permute(perm)).eigenvalues)
    assert np.allclose(a, b, atol=1e-9)


@given(graphs(min_n=1, max_n=12))
def test_top_eigenvalue_at_least_average_degree(g):
    lam = spectrum(g).eigenvalues
    assert lam.max() >= g.degrees().mean() - 1e-9


def test_beta_graph_has_one_structural_eigenvalue():
    n = 400
    for seed in range(5):
        beta = np.random.default_rng(seed).uniform(0.5, 2, n)
        rep = spectrum(sample_graph(BetaParams(beta), seed=seed))
        assert rep.eigenvalues[0] > 3 * math.sqrt(n)  # the order-n eigenvalue is seen
        assert rep.nontrivial_count == 1
        assert rep.ratio < 0.2


def test_planted_two_color_graph_has_three():
    n = 400
    for seed in range(3):
        rep = spectrum(sample_graph(planted_design(n, 2, 2.0, seed), seed=seed + 50))
        assert rep.nontrivial_count == 3
        assert nontrivial_count(rep, 3.0) == 3
