import math

import numpy as np
import pytest

from shorttm import kernels
from shorttm.corpus import corpus_from_lines
from shorttm.embeddings import PromotionIndex
from shorttm.models.dmm import (dmm_counts, gpu_gate_prob, gpu_tf_add, gsdmm_conditional,
                                gsdmm_phi, lf_softmax, lfdmm_doc_conditional, lfdmm_indicator,
                                lfdmm_objective_grad, optimize_topic_vectors, pdmm_candidates,
                                pdmm_doc_topic, pdmm_sample_td, pdmm_subset_log_score,
                                pdmm_subsets, promoted, truncated_poisson_pmf)
from shorttm.models.lda import lda_conditional, lda_counts, lda_phi, lda_theta
from shorttm.synthetic import disjoint_topic_corpus

BACKENDS = kernels.available()


# ---------------------------------------------------------------- LDA

def test_lda_conditional_oracle():
    ndk = np.array([1, 0])
    nkw = np.array([[1, 0, 0], [0, 0, 0]])
    nk = np.array([1, 0])
    w = lda_conditional(ndk, nkw, nk, 0, 0.1, 0.1)
    np.testing.assert_allclose(w, [1.1 * 1.1 / 1.3, 0.1 * 0.1 / 0.3], rtol=1e-15)
    assert w[0] == pytest.approx(0.930769230769, abs=1e-12)
    assert w[1] == pytest.approx(0.033333333333, abs=1e-12)


def test_lda_phi_theta_shapes_and_zero_counts():
    phi = lda_phi(np.zeros((2, 4)), np.zeros(2), 0.01)
    np.testing.assert_allclose(phi, 0.25)
    theta = lda_theta(np.array([[3, 0]]), np.array([3]), 0.5)
    np.testing.assert_allclose(theta, [[3.5 / 4, 0.5 / 4]])


def _lda_oracle_sweep(docs, z, ndk, nkw, nk, alpha, beta, u):
    t = 0
    for d, doc in enumerate(docs):
        for w in doc:
            k = z[t]
            ndk[d, k] -= 1
            nkw[k, w] -= 1
            nk[k] -= 1
            p = lda_conditional(ndk[d], nkw, nk, w, alpha, beta)
            c = np.cumsum(p)
            k = min(int(np.searchsorted(c, u[t] * c[-1], side="right")), len(p) - 1)
            z[t] = k
            ndk[d, k] += 1
            nkw[k, w] += 1
            nk[k] += 1
            t += 1


@pytest.mark.parametrize("backend", BACKENDS)
def test_lda_sweep_matches_enumeration_oracle(backend):
    c = corpus_from_lines(["a b a c", "c c d", "b d a", "e"])
    K = 3
    rng = np.random.default_rng(5)
    z = rng.integers(0, K, c.n_tokens)
    z_ref = z.copy()
    ndk, nkw, nk = lda_counts(c.doc_ptr, c.words, z, K, c.V)
    ref = [x.copy() for x in (ndk, nkw, nk)]
    kern = kernels.get_backend(backend)
    for _ in range(5):
        u = rng.random(c.n_tokens)
        kern.lda_sweep(c.doc_ptr, c.words, z, ndk, nkw, nk, 0.1, 0.01, u)
        _lda_oracle_sweep(c.docs, z_ref, *ref, 0.1, 0.01, u)
        np.testing.assert_array_equal(z, z_ref)
    np.testing.assert_array_equal(ndk, ref[0])


# ---------------------------------------------------------------- GSDMM

def test_gsdmm_phi_fixture():
    c = corpus_from_lines(["a a b", "b c"])
    mk, nkw, nk = dmm_counts(c.doc_ptr, c.words, np.array([0, 0]), 2, 3)
    phi = gsdmm_phi(nkw, nk, 0.1)
    np.testing.assert_allclose(phi[0], [2.1 / 5.3, 2.1 / 5.3, 1.1 / 5.3], rtol=1e-15)
    np.testing.assert_allclose(phi[1], 1 / 3)


def test_gsdmm_log_space_agrees_with_direct_product():
    rng = np.random.default_rng(0)
    K, V = 4, 12
    nkw = rng.integers(0, 5, (K, V))
    nk = nkw.sum(axis=1)
    mk = rng.integers(1, 6, K)
    ws = rng.integers(0, V, 30)  # long enough for the log-space path
    p = gsdmm_conditional(ws, mk, nkw, nk, 0.1, 0.1, int(mk.sum()) + 1)
    lp = np.log((mk + 0.1) / (mk.sum() + K * 0.1))
    seen = {}
    for i, w in enumerate(ws):
        j = seen.get(w, 0)
        seen[w] = j + 1
        lp += np.log((nkw[:, w] + 0.1 + j) / (nk + V * 0.1 + i))
    want = np.exp(lp - lp.max())
    np.testing.assert_allclose(p / p.sum(), want / want.sum(), rtol=1e-12)


def _dmm_oracle_sweep(docs, zd, mk, nkw, nk, alpha, beta, u):
    n_act = sum(1 for d in docs if len(d))
    for d, doc in enumerate(docs):
        if len(doc) == 0:
            continue
        k = zd[d]
        mk[k] -= 1
        np.subtract.at(nkw[k], doc, 1)
        nk[k] -= len(doc)
        p = gsdmm_conditional(doc, mk, nkw, nk, alpha, beta, n_act)
        c = np.cumsum(p)
        k = min(int(np.searchsorted(c, u[d] * c[-1], side="right")), len(p) - 1)
        zd[d] = k
        mk[k] += 1
        np.add.at(nkw[k], doc, 1)
        nk[k] += len(doc)


@pytest.mark.parametrize("backend", BACKENDS)
def test_dmm_sweep_matches_enumeration_oracle(backend):
    c, _ = disjoint_topic_corpus(n_docs=30, n_topics=2, words_per_topic=5, doc_len=6, seed=1,
                                 min_len=1)
    K = 3
    rng = np.random.default_rng(9)
    zd = rng.integers(0, K, c.N)
    zr = zd.copy()
    mk, nkw, nk = dmm_counts(c.doc_ptr, c.words, zd, K, c.V)
    ref = [x.copy() for x in (mk, nkw, nk)]
    kern = kernels.get_backend(backend)
    occ = c.occurrence_index()
    for _ in range(5):
        u = rng.random(c.N)
        kern.dmm_sweep(c.doc_ptr, c.words, occ, zd, mk, nkw, nk, 0.1, 0.1, u)
        _dmm_oracle_sweep(c.docs, zr, *ref, 0.1, 0.1, u)
        np.testing.assert_array_equal(zd, zr)


# ---------------------------------------------------------------- LF-DMM

def test_softmax_uniform_and_shift_invariance(rng):
    X = rng.normal(size=(5, 3))
    cov = np.array([True, True, False, True, True])
    s = lf_softmax(np.zeros(3), X, cov)
    np.testing.assert_allclose(s, [0.25, 0.25, 0, 0.25, 0.25])
    Xc = np.hstack([X, np.ones((5, 1))])
    tau = rng.normal(size=4)
    shifted = tau + np.array([0, 0, 0, 7.5])  # adds 7.5 to every logit
    np.testing.assert_allclose(lf_softmax(tau, Xc), lf_softmax(shifted, Xc), rtol=1e-12)


def test_softmax_two_word_table():
    X = np.array([[1.0, 0.0], [0.0, 1.0]])
    s = lf_softmax(np.array([math.log(3.0), 0.0]), X)
    np.testing.assert_allclose(s, [0.75, 0.25], rtol=1e-14)


def test_lfdmm_limits(rng):
    K, V = 3, 6
    nkw = rng.integers(0, 4, (K, V))
    nk = nkw.sum(axis=1)
    mk = rng.integers(0, 5, K)
    ws = np.array([0, 3, 3, 5])
    sigma = rng.dirichlet(np.ones(V), K)
    n = int(mk.sum()) + 1
    np.testing.assert_allclose(lfdmm_doc_conditional(ws, mk, nkw, nk, sigma, 0.0, 0.1, 0.01, n),
                               gsdmm_conditional(ws, mk, nkw, nk, 0.1, 0.01, n), rtol=1e-15)
    uni = np.full((K, V), 1 / V)
    p = lfdmm_doc_conditional(ws, mk, nkw, nk, uni, 1.0, 0.1, 0.01, n)
    want = (mk + 0.1) * V ** -4.0
    np.testing.assert_allclose(p / p.sum(), want / want.sum(), rtol=1e-12)
    for u in rng.random(50):
        assert lfdmm_indicator(2, 1, nkw, nk, sigma, 0.0, 0.01, u) == 0
        assert lfdmm_indicator(2, 1, nkw, nk, sigma, 1.0, 0.01, u) == 1


def test_indicator_monte_carlo(rng):
    nkw = np.array([[3, 1]])
    nk = np.array([4])
    sigma = np.array([[0.2, 0.8]])
    lam = 0.6
    a = (1 - lam) * (3 + 0.01) / (4 + 0.02)
    b = lam * 0.2
    draws = [lfdmm_indicator(0, 0, nkw, nk, sigma, lam, 0.01, u) for u in rng.random(40000)]
    assert np.mean(draws) == pytest.approx(b / (a + b), abs=0.01)


def test_objective_zero_counts_and_descent(rng):
    X = rng.normal(size=(6, 3))
    tau = rng.normal(size=3)
    L, g = lfdmm_objective_grad(tau, np.zeros(6), X, 0.3)
    assert L == pytest.approx(0.3 * tau @ tau)
    np.testing.assert_allclose(g, 0.6 * tau)
    F = rng.integers(0, 5, 6).astype(float)
    L0, g0 = lfdmm_objective_grad(tau, F, X, 0.01)
    for step in (1e-3, 1e-4):
        assert lfdmm_objective_grad(tau - step * g0, F, X, 0.01)[0] < L0


def test_optimizer_zero_counts_and_convex_minimum():
    X = np.eye(3)
    tau = np.array([[1.0, -2.0, 0.5]])
    out = optimize_topic_vectors(tau, np.zeros((1, 3)), X, np.ones(3, bool), 0.1, max_steps=50)
    np.testing.assert_allclose(out, 0.0, atol=1e-6)
    F = np.array([[6.0, 3.0, 1.0]])
    out = optimize_topic_vectors(np.zeros((1, 3)), F, X, np.ones(3, bool), 0.05, max_steps=200)
    # stationarity: F_w = ftot * sigma_w + 2 mu tau_w
    _, g = lfdmm_objective_grad(out[0], F[0], X, 0.05)
    assert np.linalg.norm(g) < 1e-5
    L_start = lfdmm_objective_grad(np.zeros(3), F[0], X, 0.05)[0]
    assert lfdmm_objective_grad(out[0], F[0], X, 0.05)[0] <= L_start


# ---------------------------------------------------------------- GPU-DMM

def test_gate_probability():
    mk = np.array([2, 1])
    nkw = np.array([[3, 0], [1, 1]])
    nk = nkw.sum(axis=1)
    p = gpu_gate_prob(0, 0, mk, nkw, nk, 0.1, 0.01)
    assert p == 1.0  # topic 0 is the argmax for word 0
    prior = (mk + 0.1) / (mk.sum() + 1 + 0.2)
    pw = prior * (nkw[:, 0] + 0.01) / (nk + 0.02)
    assert gpu_gate_prob(0, 1, mk, nkw, nk, 0.1, 0.01) == pytest.approx(pw[1] / pw[0], rel=1e-14)
    sym = np.array([[1, 1], [1, 1]])
    assert gpu_gate_prob(1, 1, np.array([1, 1]), sym, sym.sum(1), 0.1, 0.1) == 1.0


def test_single_pair_promotion():
    index = PromotionIndex.from_pairs(2, [(0, 1)], 0.1)
    nkw = np.zeros((1, 2), dtype=np.int64)
    gkw = np.zeros_like(nkw)
    nk = np.zeros(1, dtype=np.int64)
    gk = np.zeros_like(nk)
    mk = np.zeros(1, dtype=np.int64)
    gpu_tf_add(nkw, gkw, nk, gk, mk, np.array([0]), np.array([1]), 0, index)
    pkw, pk = promoted(nkw, gkw, nk, gk, 0.1)
    np.testing.assert_allclose(pkw, [[1.0, 0.1]])
    assert pk[0] == pytest.approx(1.1)
    # ungated token: no promotion
    gpu_tf_add(nkw, gkw, nk, gk, mk, np.array([0]), np.array([0]), 0, index)
    np.testing.assert_allclose(promoted(nkw, gkw, nk, gk, 0.1)[0], [[2.0, 0.1]])


# ---------------------------------------------------------------- GPU-PDMM

def test_truncated_poisson(rng):
    assert truncated_poisson_pmf(1.5, 1).tolist() == [1.0]
    pmf = truncated_poisson_pmf(1.5, 3)
    assert pmf.sum() == pytest.approx(1.0, abs=1e-15)
    raw = np.array([1.5, 1.5 ** 2 / 2, 1.5 ** 3 / 6])
    np.testing.assert_allclose(pmf, raw / raw.sum(), rtol=1e-13)
    draws = np.array([pdmm_sample_td(rng, 1.5, 3) for _ in range(40000)])
    freq = np.bincount(draws, minlength=4)[1:] / len(draws)
    np.testing.assert_allclose(freq, pmf, atol=0.01)


def test_candidates_and_doc_topic():
    nkw = np.array([[5, 0, 1], [0, 4, 1], [1, 1, 1]])
    nk = nkw.sum(axis=1)
    ck = nk
    assert sorted(pdmm_candidates([0, 1], ck, nkw, nk, 0.1, 0.01, 3)) == [0, 1, 2]
    one = pdmm_candidates([1], ck, nkw, nk, 0.1, 0.01, 3)
    pw = (ck + 0.1) * (nkw[:, 1] + 0.01) / (nk + 0.03)
    assert one == sorted(range(3), key=lambda k: (-pw[k], k))
    p = pdmm_doc_topic([1], ck, nkw, nk, 0.1, 0.01)
    np.testing.assert_allclose(p, pw / pw.sum(), rtol=1e-14)
    # ties go to the lowest id
    flat = np.ones((3, 3), dtype=np.int64)
    assert pdmm_candidates([0], flat.sum(1), flat, flat.sum(1), 0.1, 0.1, 2) == [0, 1]


def test_subset_enumeration():
    subsets, sizes = pdmm_subsets(4, 2)
    assert len(subsets) == 4 + 6
    assert sizes.tolist() == [1] * 4 + [2] * 6
    assert (subsets[:4, 1] == -1).all()


def test_subset_scores_symmetric_and_finite():
    K, V = 3, 4
    nkw = np.full((K, V), 2, dtype=np.int64)
    nk = nkw.sum(axis=1)
    ws = [0, 1, 1]
    sc = []
    for zc in ([0], [1], [2]):
        assign = [zc[0]] * 3
        sc.append(pdmm_subset_log_score(ws, assign, zc, nk, nkw, nk, 0.1, 0.01, 1.5))
    assert all(np.isfinite(sc))
    assert sc[0] == pytest.approx(sc[1]) == pytest.approx(sc[2])


def test_subset_score_single_topic_hand_value():
    # one topic set {0}: lam * (c_0 + alpha) / (C + K alpha) * prod of word terms
    K, V = 2, 3
    nkw = np.array([[2, 1, 0], [0, 0, 3]])
    nk = nkw.sum(axis=1)
    ws = [0, 0, 1]
    got = pdmm_subset_log_score(ws, [0, 0, 0], [0], nk, nkw, nk, 0.5, 0.1, 1.5)
    want = (math.log(1.5) + math.log(3 + 0.5) - math.log(6 + 1.0)
            + math.log(2.1) + math.log(3.1) + math.log(1.1)
            - math.log(3.3) - math.log(4.3) - math.log(5.3))
    assert got == pytest.approx(want, abs=1e-12)
