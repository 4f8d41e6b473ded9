import numpy as np
import pytest

from shorttm.corpus import corpus_from_lines
from shorttm.models.cooccurrence import (btm_conditional, btm_counts, btm_phi, btm_theta,
                                         btm_topic_prior, build_word_network, extract_biterms,
                                         network_to_pseudodocs, wntm_phi, wntm_theta,
                                         wntm_word_topic)


def test_biterms_position_pairs():
    c = corpus_from_lines(["a a b"])
    bt = extract_biterms(c)
    a, b = c.vocab["a"], c.vocab["b"]
    assert sorted(bt.pairs()) == sorted([(a, a), (a, b), (a, b)])
    assert len(bt) == 3


def test_biterm_window_and_short_docs():
    c = corpus_from_lines(["a b c d", "x", ""])
    assert len(extract_biterms(c)) == 6
    assert len(extract_biterms(c, window_c=2)) == 3  # adjacent pairs only
    assert len(extract_biterms(c, window_c=10)) == 6
    assert (extract_biterms(c).doc == 0).all()


def test_btm_conditional_cases():
    nk = np.zeros(3)
    nkw = np.zeros((3, 4))
    p = btm_conditional(0, 1, nk, nkw, 1.0, 0.1)
    np.testing.assert_allclose(p / p.sum(), 1 / 3)
    p1 = btm_conditional(0, 1, np.zeros(1), np.zeros((1, 4)), 1.0, 0.1)
    assert p1.shape == (1,)
    # one biterm (0, 1) assigned to topic 0, query (0, 2) with V=4, alpha=1, beta=0.1
    nk = np.array([1, 0])
    nkw = np.array([[1, 1, 0, 0], [0, 0, 0, 0]])
    p = btm_conditional(0, 2, nk, nkw, 1.0, 0.1)
    k0 = 2.0 * 1.1 * 0.1 / (2.4 * 3.4)
    k1 = 1.0 * 0.1 * 0.1 / (0.4 * 1.4)
    np.testing.assert_allclose(p, [k0, k1], rtol=1e-14)


def test_btm_phi_theta():
    nk = np.array([2, 0])
    nkw = np.array([[3, 1, 0], [0, 0, 0]])
    phi = btm_phi(nkw, nk, 0.5)
    np.testing.assert_allclose(phi[0], [3.5 / 5.5, 1.5 / 5.5, 0.5 / 5.5])
    np.testing.assert_allclose(phi.sum(axis=1), 1.0)
    c = corpus_from_lines(["a b", "c"])
    bt = extract_biterms(c)
    prior = btm_topic_prior(nk, 0.5)
    theta = btm_theta(bt, c.N, phi, prior)
    pzb = prior * phi[:, 0] * phi[:, 1]
    np.testing.assert_allclose(theta[0], pzb / pzb.sum())
    np.testing.assert_allclose(theta[1], 0.5)


def test_btm_counts_conserve():
    c = corpus_from_lines(["a b c", "b c"])
    bt = extract_biterms(c)
    z = np.array([0, 1, 1, 0])
    nk, nkw = btm_counts(bt, z, 2, c.V)
    assert nk.sum() == 4 and nkw.sum() == 8
    np.testing.assert_array_equal(nkw.sum(axis=1), 2 * nk)


def test_word_network_and_pseudodocs():
    c = corpus_from_lines(["a b c", "a b", "d"])
    g = build_word_network(c, window_c=10)
    a, b, cc, d = (c.vocab[x] for x in "abcd")
    assert g.weight(a, b) == 2 and g.weight(b, a) == 2
    assert g.weight(a, cc) == 1 and g.weight(a, d) == 0 and g.weight(a, a) == 0
    # windows of "a b c" start at a, b and c, so (b, c) is seen twice
    assert g.weight(b, cc) == 2
    assert g.total_weight == 5
    pseudo, owners = network_to_pseudodocs(g, c.vocab)
    assert owners.tolist() == [a, b, cc]
    assert sorted(pseudo.docs[0].tolist()) == [b, b, cc]


def test_word_network_sliding_window_counts_unique_pairs():
    c = corpus_from_lines(["a b a"])
    g = build_word_network(c, window_c=2)
    # windows [a b], [b a], [a]
    assert g.weight(0, 1) == 2
    g3 = build_word_network(c, window_c=3)
    # windows [a b a], [b a], [a]; the repeated a does not double count
    assert g3.weight(0, 1) == 2


def test_wntm_psi_phi_theta():
    ndk = np.array([[3, 1], [0, 0]])
    psi = wntm_word_topic(ndk, np.array([0, 2]), 3, 0.5)
    np.testing.assert_allclose(psi[0], [3.5 / 5, 1.5 / 5])
    np.testing.assert_allclose(psi[1], 0.5)  # no pseudo-doc
    np.testing.assert_allclose(psi[2], 0.5)
    phi = wntm_phi(psi)
    np.testing.assert_allclose(phi.sum(axis=1), 1.0)
    c = corpus_from_lines(["x", "x y y"])
    psi2 = np.array([[0.9, 0.1], [0.2, 0.8]])
    theta = wntm_theta(c, psi2)
    np.testing.assert_allclose(theta[0], psi2[0])
    np.testing.assert_allclose(theta[1], (psi2[0] + 2 * psi2[1]) / 3)


def test_single_word_vocabulary_phi():
    psi = np.array([[0.3, 0.7]])
    np.testing.assert_allclose(wntm_phi(psi), [[1.0], [1.0]])


def test_window_validation():
    c = corpus_from_lines(["a b"])
    with pytest.raises(ValueError):
        extract_biterms(c, window_c=1)
    with pytest.raises(ValueError):
        build_word_network(c, window_c=1)
